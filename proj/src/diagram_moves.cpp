#include <algorithm>
#include <random>
#include <set>

#include "qvo/diagrams.hpp"

namespace qvo {

namespace {

using Row = std::vector<Tile>;

[[noreturn]] void not_applicable(const MoveSpec& m, const std::string& why) {
  fail(ErrorCode::MoveNotApplicable, m.name + " at slice " + std::to_string(m.slice) + ", position " +
                                         std::to_string(m.position) + ": " + why);
}

Obj sub(const Obj& o, std::size_t from, std::size_t to) {
  return Obj(o.begin() + static_cast<long>(from), o.begin() + static_cast<long>(to));
}

Row padded(const Obj& pre, Tile t, const Obj& post) {
  Row row;
  if (!pre.empty()) row.push_back(Tile::id(pre));
  row.push_back(std::move(t));
  if (!post.empty()) row.push_back(Tile::id(post));
  return row;
}

// Object between slice k-1 and slice k (k = slices.size() gives the top).
Obj boundary_at(const Diagram& d, int k) {
  if (k < 0 || k > static_cast<int>(d.slices.size())) return {};
  if (k < static_cast<int>(d.slices.size())) return row_source(d.slices[static_cast<std::size_t>(k)]);
  return d.slices.empty() ? Obj{} : row_target(d.slices.back());
}

// A row whose tiles are identities except one; reports that tile and its first input position.
struct Single {
  Tile tile;
  int pos = 0;
  Obj source;
};

std::optional<Single> single_tile(const Row& row) {
  std::optional<Single> s;
  int pos = 0;
  for (const auto& t : row) {
    if (t.kind != TileKind::Id) {
      if (s) return std::nullopt;
      s = Single{t, pos, {}};
    }
    pos += static_cast<int>(tile_source(t).size());
  }
  if (s) s->source = row_source(row);
  return s;
}

Row around(const Obj& src, int pos, int width, Tile t) {
  return padded(sub(src, 0, static_cast<std::size_t>(pos)), std::move(t),
                sub(src, static_cast<std::size_t>(pos + width), src.size()));
}

void replace_rows(Diagram& d, int at, int count, const std::vector<Row>& rows) {
  auto it = d.slices.begin() + at;
  it = d.slices.erase(it, it + count);
  d.slices.insert(it, rows.begin(), rows.end());
}

void keep_width(Diagram& d, const Obj& boundary) {
  if (d.slices.empty() && !boundary.empty()) d.slices.push_back({Tile::id(boundary)});
}

std::optional<Single> single_at(const Diagram& d, int s) {
  if (s < 0 || s >= static_cast<int>(d.slices.size())) return std::nullopt;
  return single_tile(d.slices[static_cast<std::size_t>(s)]);
}

bool is_cross(const Tile& t) { return t.kind == TileKind::Cross || t.kind == TileKind::CrossInv; }
bool is_twist(const Tile& t) { return t.kind == TileKind::Twist || t.kind == TileKind::TwistInv; }

std::string paren(const std::string& n) {
  return n.find("∘") != std::string::npos || n.find("⊗") != std::string::npos ? "(" + n + ")" : n;
}

bool finite_leaf(const Color& c, const ColoringEnv& env) {
  return !c.is_bundle && c.sign > 0 && env.module(c.module)->is_finite();
}

Diagram insert_pair(const Diagram& d, const MoveSpec& m, int width, const std::function<std::pair<Tile, Tile>(const Obj&)>& make) {
  Obj b = boundary_at(d, m.slice);
  if (m.slice < 0 || m.slice > static_cast<int>(d.slices.size())) not_applicable(m, "no such slice");
  if (m.position < 0 || m.position + width > static_cast<int>(b.size())) not_applicable(m, "not enough strands");
  auto [t1, t2] = make(sub(b, static_cast<std::size_t>(m.position), static_cast<std::size_t>(m.position + width)));
  Row r1 = around(b, m.position, width, t1);
  Obj mid = row_target(r1);
  Row r2 = around(mid, m.position, static_cast<int>(tile_source(t2).size()), t2);
  Diagram out = d;
  replace_rows(out, m.slice, 0, {r1, r2});
  return out;
}

Diagram cancel_pair(const Diagram& d, const MoveSpec& m, const std::function<bool(const Tile&, const Tile&)>& inverse) {
  auto a = single_at(d, m.slice), b = single_at(d, m.slice + 1);
  if (!a || !b) not_applicable(m, "needs two single-tile slices");
  if (a->pos != b->pos || !inverse(a->tile, b->tile)) not_applicable(m, "tiles do not cancel");
  Diagram out = d;
  replace_rows(out, m.slice, 2, {});
  keep_width(out, a->source);
  return out;
}

// ---------------------------------------------------------------- the moves

Diagram r2_insert(const Diagram& d, const MoveSpec& m, bool inv) {
  return insert_pair(d, m, 2, [&](const Obj& o) {
    return std::make_pair(Tile::cross(o[0], o[1], inv), Tile::cross(o[1], o[0], !inv));
  });
}

Diagram r2_cancel(const Diagram& d, const MoveSpec& m) {
  return cancel_pair(d, m, [](const Tile& a, const Tile& b) {
    return is_cross(a) && is_cross(b) && a.kind != b.kind && a.a == b.b && a.b == b.a;
  });
}

Diagram r3(const Diagram& d, const MoveSpec& m) {
  auto s1 = single_at(d, m.slice), s2 = single_at(d, m.slice + 1), s3 = single_at(d, m.slice + 2);
  if (!s1 || !s2 || !s3) not_applicable(m, "needs three single-tile slices");
  TileKind k = s1->tile.kind;
  if (!is_cross(s1->tile) || s2->tile.kind != k || s3->tile.kind != k) not_applicable(m, "needs three crossings of one kind");
  int p = s1->pos;
  int q;
  if (s2->pos == p + 1 && s3->pos == p) q = p;          // σ_p σ_{p+1} σ_p
  else if (s2->pos == p - 1 && s3->pos == p) q = p - 1;  // σ_{p+1} σ_p σ_{p+1}
  else not_applicable(m, "crossings are not a braid triple");
  bool inv = k == TileKind::CrossInv;
  std::vector<int> order = s1->pos == q ? std::vector<int>{q + 1, q, q + 1} : std::vector<int>{q, q + 1, q};
  Obj cur = s1->source;
  std::vector<Row> rows;
  for (int pos : order) {
    auto up = static_cast<std::size_t>(pos);
    rows.push_back(around(cur, pos, 2, Tile::cross(cur[up], cur[up + 1], inv)));
    std::swap(cur[up], cur[up + 1]);
  }
  Diagram out = d;
  replace_rows(out, m.slice, 3, rows);
  return out;
}

Diagram twist_insert(const Diagram& d, const MoveSpec& m, bool inv) {
  return insert_pair(d, m, 1, [&](const Obj& o) { return std::make_pair(Tile::twist(o[0], inv), Tile::twist(o[0], !inv)); });
}

Diagram twist_cancel(const Diagram& d, const MoveSpec& m) {
  return cancel_pair(d, m, [](const Tile& a, const Tile& b) {
    return is_twist(a) && is_twist(b) && a.kind != b.kind && a.a == b.a;
  });
}

bool is_intertwiner(const std::string& name, const ColoringEnv& env) {
  GradedMap g = env.coupon(name);
  if (!g.degree.is_zero()) return false;
  for (int i = 0; i < env.cartan()->rank(); ++i) {
    if (!compare_maps(compose(e_map(g.target, i), g), compose(g, e_map(g.source, i))).pass) return false;
    if (!compare_maps(compose(f_map(g.target, i), g), compose(g, f_map(g.source, i))).pass) return false;
  }
  return true;
}

// A one-strand tile (twist or intertwining coupon V -> W) slides through an adjacent crossing.
Diagram slide(const Diagram& d, const MoveSpec& m, bool coupons, const ColoringEnv& env) {
  auto s1 = single_at(d, m.slice), s2 = single_at(d, m.slice + 1);
  if (!s1 || !s2) not_applicable(m, "needs two single-tile slices");
  if (coupons) {
    const Tile& t = s1->tile.kind == TileKind::Coupon ? s1->tile : s2->tile;
    if (t.kind == TileKind::Coupon && !is_intertwiner(t.name, env)) not_applicable(m, "coupon is not a module map");
  }
  auto one_strand = [&](const Tile& t) {
    if (coupons) return t.kind == TileKind::Coupon && t.in.size() == 1 && t.out.size() == 1;
    return is_twist(t);
  };
  Diagram out = d;
  if (one_strand(s1->tile) && is_cross(s2->tile)) {
    // tile below the crossing -> crossing first, then tile
    int p = s1->pos, q = s2->pos;
    if (p != q && p != q + 1) not_applicable(m, "tile is not on a crossing strand");
    Obj src = s1->source;
    Obj before = src;
    auto up = static_cast<std::size_t>(p);
    before[up] = tile_source(s1->tile)[0];
    auto uq = static_cast<std::size_t>(q);
    Row c = around(before, q, 2, Tile::cross(before[uq], before[uq + 1], s2->tile.kind == TileKind::CrossInv));
    Obj mid = row_target(c);
    int np = p == q ? q + 1 : q;
    Row t = around(mid, np, 1, s1->tile);
    replace_rows(out, m.slice, 2, {c, t});
    return out;
  }
  if (is_cross(s1->tile) && one_strand(s2->tile)) {
    int q = s1->pos, p = s2->pos;
    if (p != q && p != q + 1) not_applicable(m, "tile is not on a crossing strand");
    int np = p == q ? q + 1 : q;
    Obj src = s1->source;
    Row t = around(src, np, 1, s2->tile);
    Obj mid = row_target(t);
    auto uq = static_cast<std::size_t>(q);
    Row c = around(mid, q, 2, Tile::cross(mid[uq], mid[uq + 1], s1->tile.kind == TileKind::CrossInv));
    replace_rows(out, m.slice, 2, {t, c});
    return out;
  }
  not_applicable(m, "no tile next to a crossing");
}

Diagram melt(const Diagram& d, const MoveSpec& m) {
  auto s1 = single_at(d, m.slice), s2 = single_at(d, m.slice + 1);
  if (!s1 || !s2 || s1->tile.kind != TileKind::Coupon || s2->tile.kind != TileKind::Coupon)
    not_applicable(m, "needs two stacked coupons");
  if (s1->pos != s2->pos || s1->tile.out != s2->tile.in) not_applicable(m, "coupons are not composable");
  Tile t = Tile::coupon(paren(s2->tile.name) + "∘" + paren(s1->tile.name), s1->tile.in, s2->tile.out);
  Diagram out = d;
  replace_rows(out, m.slice, 2, {around(s1->source, s1->pos, static_cast<int>(s1->tile.in.size()), t)});
  return out;
}

Diagram melt_side(const Diagram& d, const MoveSpec& m) {
  if (m.slice < 0 || m.slice >= static_cast<int>(d.slices.size())) not_applicable(m, "no such slice");
  const Row& row = d.slices[static_cast<std::size_t>(m.slice)];
  auto k = static_cast<std::size_t>(m.position);
  if (k + 1 >= row.size() || row[k].kind != TileKind::Coupon || row[k + 1].kind != TileKind::Coupon)
    not_applicable(m, "needs two adjacent coupons");
  Obj in = row[k].in, out_obj = row[k].out;
  in.insert(in.end(), row[k + 1].in.begin(), row[k + 1].in.end());
  out_obj.insert(out_obj.end(), row[k + 1].out.begin(), row[k + 1].out.end());
  Tile t = Tile::coupon(paren(row[k].name) + "⊗" + paren(row[k + 1].name), in, out_obj);
  Diagram out = d;
  Row& r = out.slices[static_cast<std::size_t>(m.slice)];
  r.erase(r.begin() + static_cast<long>(k), r.begin() + static_cast<long>(k) + 2);
  r.insert(r.begin() + static_cast<long>(k), t);
  return out;
}

Diagram zip_insert(const Diagram& d, const MoveSpec& m) {
  return insert_pair(d, m, 2, [](const Obj& o) { return std::make_pair(Tile::zip(o), Tile::zip(o, true)); });
}

Diagram unzip_insert(const Diagram& d, const MoveSpec& m) {
  Obj b = boundary_at(d, m.slice);
  if (m.position < 0 || m.position >= static_cast<int>(b.size()) || !b[static_cast<std::size_t>(m.position)].is_bundle)
    not_applicable(m, "no bundle here");
  return insert_pair(d, m, 1, [](const Obj& o) {
    return std::make_pair(Tile::zip(o[0].bundle, true), Tile::zip(o[0].bundle));
  });
}

Diagram zip_cancel(const Diagram& d, const MoveSpec& m) {
  return cancel_pair(d, m, [](const Tile& a, const Tile& b) {
    bool zu = a.kind == TileKind::Zip && b.kind == TileKind::Unzip;
    bool uz = a.kind == TileKind::Unzip && b.kind == TileKind::Zip;
    return (zu || uz) && a.obj == b.obj;
  });
}

// Bundled crossing or twist -> unzip, single-strand tiles, zip.
Diagram expand_bundle(const Diagram& d, const MoveSpec& m) {
  auto s = single_at(d, m.slice);
  if (!s || !(is_cross(s->tile) || is_twist(s->tile))) not_applicable(m, "needs a crossing or twist");
  Obj ins = tile_source(s->tile);
  bool bundled = std::any_of(ins.begin(), ins.end(), [](const Color& c) { return c.is_bundle; });
  if (!bundled) not_applicable(m, "no bundled strand");
  Obj pre = sub(s->source, 0, static_cast<std::size_t>(s->pos));
  Obj post = sub(s->source, static_cast<std::size_t>(s->pos) + ins.size(), s->source.size());
  auto wrap = [&](std::vector<Row> rows) {
    for (auto& r : rows) {
      if (!pre.empty()) r.insert(r.begin(), Tile::id(pre));
      if (!post.empty()) r.push_back(Tile::id(post));
    }
    return rows;
  };
  std::vector<Row> rows = wrap(unzip_rows(ins, false));
  Diagram local;
  local.mode = d.mode;
  local.slices.push_back({s->tile});
  Diagram ex = expand_bundles(local);
  auto mid = wrap(ex.slices);
  rows.insert(rows.end(), mid.begin(), mid.end());
  auto z = wrap(unzip_rows(tile_target(s->tile), true));
  rows.insert(rows.end(), z.begin(), z.end());
  Diagram out = d;
  replace_rows(out, m.slice, 1, rows);
  return out;
}

// id_V = (id_V ⊗ e_V)(ι_V ⊗ id_V), or its right-handed counterpart.
Diagram zigzag_insert(const Diagram& d, const MoveSpec& m, const ColoringEnv& env, bool right) {
  if (d.mode == DiagramMode::Braid) not_applicable(m, "braid diagrams have no caps");
  Obj b = boundary_at(d, m.slice);
  if (m.slice < 0 || m.slice > static_cast<int>(d.slices.size())) not_applicable(m, "no such slice");
  if (m.position < 0 || m.position >= static_cast<int>(b.size())) not_applicable(m, "no such strand");
  const Color& v = b[static_cast<std::size_t>(m.position)];
  if (!finite_leaf(v, env)) not_applicable(m, "strand is not a finite positive leaf");
  Obj pre = sub(b, 0, static_cast<std::size_t>(m.position));
  Obj post = sub(b, static_cast<std::size_t>(m.position) + 1, b.size());
  Row r1, r2;
  if (!right) {
    Obj vpost{v};
    vpost.insert(vpost.end(), post.begin(), post.end());
    r1 = padded(pre, Tile::cup(v, false), vpost);
    Obj prev = pre;
    prev.push_back(v);
    r2 = padded(prev, Tile::cap(v, false), post);
  } else {
    Obj prev = pre;
    prev.push_back(v);
    r1 = padded(prev, Tile::cup(v, true), post);
    Obj vpost{v};
    vpost.insert(vpost.end(), post.begin(), post.end());
    r2 = padded(pre, Tile::cap(v, true), vpost);
  }
  Diagram out = d;
  replace_rows(out, m.slice, 0, {r1, r2});
  return out;
}

// (id_X ⊗ e_V) = (e_V ⊗ id_X)(id ⊗ c_{X,V})(c_{X,V*} ⊗ id): a cap pulled across a strand on its left.
Diagram cap_pull(const Diagram& d, const MoveSpec& m, bool under) {
  auto s = single_at(d, m.slice);
  if (!s || s->tile.kind != TileKind::CapL) not_applicable(m, "needs a left cap");
  if (s->pos < 1) not_applicable(m, "no strand left of the cap");
  const Obj& src = s->source;
  int p = s->pos - 1;
  auto up = static_cast<std::size_t>(p);
  Color x = src[up];
  std::vector<Row> rows;
  Obj cur = src;
  rows.push_back(around(cur, p, 2, Tile::cross(cur[up], cur[up + 1], under)));
  std::swap(cur[up], cur[up + 1]);
  rows.push_back(around(cur, p + 1, 2, Tile::cross(cur[up + 1], cur[up + 2], under)));
  std::swap(cur[up + 1], cur[up + 2]);
  Obj pre = sub(cur, 0, up), post = sub(cur, up + 2, cur.size());
  rows.push_back(padded(pre, s->tile, post));
  Diagram out = d;
  replace_rows(out, m.slice, 1, rows);
  return out;
}

// e_W (id ⊗ A) = e_V (A* ⊗ id) for a coupon A : V -> W feeding a left cap.
Diagram coupon_through_cap(const Diagram& d, const MoveSpec& m, const ColoringEnv& env) {
  auto s1 = single_at(d, m.slice), s2 = single_at(d, m.slice + 1);
  if (!s1 || !s2 || s1->tile.kind != TileKind::Coupon || s2->tile.kind != TileKind::CapL)
    not_applicable(m, "needs a coupon under a left cap");
  const Tile& a = s1->tile;
  if (a.in.size() != 1 || a.out.size() != 1) not_applicable(m, "coupon is not one-strand");
  if (s2->pos != s1->pos - 1 || s2->tile.a != a.out[0]) not_applicable(m, "coupon does not feed the cap");
  if (!finite_leaf(a.in[0], env) || !finite_leaf(a.out[0], env)) not_applicable(m, "coupon strands must be finite leaves");
  Color v = a.in[0], w = a.out[0];
  Tile dual = Tile::coupon(paren(a.name) + "*", {Color::leaf(w.module, -1)}, {Color::leaf(v.module, -1)});
  const Obj& src = s1->source;
  int p = s2->pos;
  Obj pre = sub(src, 0, static_cast<std::size_t>(p));
  Obj post = sub(src, static_cast<std::size_t>(p) + 2, src.size());
  Obj vpost{v};
  vpost.insert(vpost.end(), post.begin(), post.end());
  Row r1 = padded(pre, dual, vpost);
  Row r2 = padded(pre, Tile::cap(v, false), post);
  Diagram out = d;
  replace_rows(out, m.slice, 2, {r1, r2});
  return out;
}

}  // namespace

const std::vector<std::string>& move_names() {
  static const std::vector<std::string> names{
      "r2_insert",    "r2_insert_inv", "r2_cancel",   "r3",          "twist_insert",  "twist_insert_inv",
      "twist_cancel", "twist_slide",   "coupon_slide", "melt",       "melt_side",     "zip_insert",
      "unzip_insert", "zip_cancel",    "expand_bundle", "zigzag_left", "zigzag_right", "cap_pull",
      "cap_pull_under", "coupon_through_cap"};
  return names;
}

Diagram apply_move(const Diagram& d, const MoveSpec& m, const ColoringEnv& env) {
  static const std::set<std::string> located_by_slice{"r2_cancel",  "r3",    "twist_cancel",  "twist_slide",
                                                      "coupon_slide", "melt", "zip_cancel",   "expand_bundle",
                                                      "cap_pull",   "cap_pull_under", "coupon_through_cap"};
  if (located_by_slice.count(m.name) && m.position != 0) not_applicable(m, "position must be 0");
  Diagram out = [&]() -> Diagram {
    const std::string& n = m.name;
    if (n == "r2_insert") return r2_insert(d, m, false);
    if (n == "r2_insert_inv") return r2_insert(d, m, true);
    if (n == "r2_cancel") return r2_cancel(d, m);
    if (n == "r3") return r3(d, m);
    if (n == "twist_insert") return twist_insert(d, m, false);
    if (n == "twist_insert_inv") return twist_insert(d, m, true);
    if (n == "twist_cancel") return twist_cancel(d, m);
    if (n == "twist_slide") return slide(d, m, false, env);
    if (n == "coupon_slide") return slide(d, m, true, env);
    if (n == "melt") return melt(d, m);
    if (n == "melt_side") return melt_side(d, m);
    if (n == "zip_insert") return zip_insert(d, m);
    if (n == "unzip_insert") return unzip_insert(d, m);
    if (n == "zip_cancel") return zip_cancel(d, m);
    if (n == "expand_bundle") return expand_bundle(d, m);
    if (n == "zigzag_left") return zigzag_insert(d, m, env, false);
    if (n == "zigzag_right") return zigzag_insert(d, m, env, true);
    if (n == "cap_pull") return cap_pull(d, m, false);
    if (n == "cap_pull_under") return cap_pull(d, m, true);
    if (n == "coupon_through_cap") return coupon_through_cap(d, m, env);
    fail(ErrorCode::UnknownName, "unknown move '" + n + "'");
  }();
  try {
    typecheck(out, env);
  } catch (const Error& e) {
    not_applicable(m, std::string("result does not typecheck: ") + e.what());
  }
  return out;
}

std::vector<MoveSpec> applicable_moves(const Diagram& d, const ColoringEnv& env) {
  std::vector<MoveSpec> out;
  int n = static_cast<int>(d.slices.size());
  int width = 0;
  for (int k = 0; k <= n; ++k) width = std::max(width, static_cast<int>(boundary_at(d, k).size()));
  for (int k = 0; k < n; ++k) width = std::max(width, static_cast<int>(d.slices[static_cast<std::size_t>(k)].size()));
  for (const auto& name : move_names()) {
    for (int s = 0; s <= n; ++s) {
      for (int p = 0; p <= width; ++p) {
        MoveSpec m{name, s, p};
        try {
          apply_move(d, m, env);
          out.push_back(m);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::MoveNotApplicable) throw;
        }
      }
    }
  }
  return out;
}

Diagram random_diagram(std::uint64_t seed, int size, const Palette& palette, const ColoringEnv& env) {
  if (palette.modules.empty()) fail(ErrorCode::InvalidArgument, "empty palette");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)); };
  bool rt = palette.mode != DiagramMode::Braid;
  Obj cur;
  std::size_t w = 1 + pick(3);
  for (std::size_t k = 0; k < w; ++k) cur.push_back(Color::leaf(palette.modules[pick(palette.modules.size())]));
  Diagram d;
  d.mode = palette.mode;
  if (size <= 0) return identity_diagram(cur, d.mode);
  while (static_cast<int>(d.slices.size()) < size) {
    int choice = static_cast<int>(pick(10));
    std::size_t n = cur.size();
    Row row;
    switch (choice) {
      case 0:
      case 1: {
        if (n < 2) continue;
        std::size_t p = pick(n - 1);
        row = around(cur, static_cast<int>(p), 2, Tile::cross(cur[p], cur[p + 1], choice == 1));
        break;
      }
      case 2:
      case 3: {
        if (n < 1) continue;
        std::size_t p = pick(n);
        row = around(cur, static_cast<int>(p), 1, Tile::twist(cur[p], choice == 3));
        break;
      }
      case 4: {
        std::vector<std::pair<std::size_t, std::string>> opts;
        for (std::size_t p = 0; p < n; ++p)
          for (const auto& [name, mod] : palette.coupons)
            if (!cur[p].is_bundle && cur[p].sign > 0 && cur[p].module == mod) opts.emplace_back(p, name);
        if (opts.empty()) continue;
        auto [p, name] = opts[pick(opts.size())];
        row = around(cur, static_cast<int>(p), 1, Tile::coupon(name, {cur[p]}, {cur[p]}));
        break;
      }
      case 5: {
        if (!rt || n > 3) continue;
        std::vector<std::string> fin;
        for (const auto& id : palette.modules)
          if (env.module(id)->is_finite()) fin.push_back(id);
        if (fin.empty()) continue;
        std::size_t p = pick(n + 1);
        Tile t = Tile::cup(Color::leaf(fin[pick(fin.size())]), pick(2) == 1);
        row = padded(sub(cur, 0, p), t, sub(cur, p, n));
        break;
      }
      case 6:
      case 7: {
        if (!rt) continue;
        std::vector<std::pair<std::size_t, bool>> opts;
        for (std::size_t p = 0; p + 1 < n; ++p) {
          const Color &x = cur[p], &y = cur[p + 1];
          if (x.is_bundle || y.is_bundle || x.module != y.module || x.sign == y.sign || !env.module(x.module)->is_finite())
            continue;
          opts.emplace_back(p, x.sign > 0);  // (V, V*) takes a right cap
        }
        if (opts.empty()) continue;
        auto [p, right] = opts[pick(opts.size())];
        const Color& v = right ? cur[p] : cur[p + 1];
        row = around(cur, static_cast<int>(p), 2, Tile::cap(v, right));
        break;
      }
      case 8: {
        if (n < 2) continue;
        std::size_t p = pick(n - 1);
        row = around(cur, static_cast<int>(p), 2, Tile::zip(sub(cur, p, p + 2)));
        break;
      }
      case 9: {
        std::vector<std::size_t> opts;
        for (std::size_t p = 0; p < n; ++p)
          if (cur[p].is_bundle) opts.push_back(p);
        if (opts.empty()) continue;
        std::size_t p = opts[pick(opts.size())];
        row = around(cur, static_cast<int>(p), 1, Tile::zip(cur[p].bundle, true));
        break;
      }
    }
    cur = row_target(row);
    d.slices.push_back(std::move(row));
  }
  return d;
}

}  // namespace qvo
