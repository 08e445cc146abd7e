#include "qvo/diagrams.hpp"

#include <cctype>
#include <sstream>

#include "qvo/duality.hpp"
#include "qvo/rmatrix.hpp"

namespace qvo {

using json = nlohmann::json;

const char* mode_name(DiagramMode m) {
  switch (m) {
    case DiagramMode::Braid: return "braid";
    case DiagramMode::RT: return "rt";
    case DiagramMode::Graded: return "graded";
  }
  return "?";
}

DiagramMode parse_mode(const std::string& s) {
  if (s == "braid") return DiagramMode::Braid;
  if (s == "rt") return DiagramMode::RT;
  if (s == "graded") return DiagramMode::Graded;
  fail(ErrorCode::ParseError, "unknown diagram mode '" + s + "'");
}

// ---------------------------------------------------------------- colors and tiles

Color Color::leaf(std::string id, int sign) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  Color c;
  c.module = std::move(id);
  c.sign = sign;
  return c;
}

Color Color::bundled(std::vector<Color> parts) {
  Color c;
  c.is_bundle = true;
  c.bundle = std::move(parts);
  return c;
}

bool Color::operator==(const Color& o) const {
  if (is_bundle != o.is_bundle) return false;
  if (is_bundle) return bundle == o.bundle;
  return module == o.module && sign == o.sign;
}

std::string Color::str() const {
  if (!is_bundle) return sign > 0 ? module : module + "*";
  std::string s = "(";
  for (std::size_t k = 0; k < bundle.size(); ++k) s += (k ? "," : "") + bundle[k].str();
  return s + ")";
}

Obj flatten(const Color& c) {
  if (!c.is_bundle) return {c};
  Obj out;
  for (const auto& p : c.bundle) {
    Obj f = flatten(p);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

Obj flatten(const Obj& o) {
  Obj out;
  for (const auto& c : o) {
    Obj f = flatten(c);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::string obj_str(const Obj& o) {
  std::string s = "(";
  for (std::size_t k = 0; k < o.size(); ++k) s += (k ? "," : "") + o[k].str();
  return s + ")";
}

const char* tile_name(TileKind k) {
  switch (k) {
    case TileKind::Id: return "id";
    case TileKind::Cross: return "cross";
    case TileKind::CrossInv: return "cross_inv";
    case TileKind::Twist: return "twist";
    case TileKind::TwistInv: return "twist_inv";
    case TileKind::CapL: return "cap_l";
    case TileKind::CapR: return "cap_r";
    case TileKind::CupL: return "cup_l";
    case TileKind::CupR: return "cup_r";
    case TileKind::Coupon: return "coupon";
    case TileKind::Zip: return "zip";
    case TileKind::Unzip: return "unzip";
    case TileKind::Src: return "src";
    case TileKind::Snk: return "snk";
  }
  return "?";
}

namespace {

TileKind parse_tile_kind(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(TileKind::Snk); ++k)
    if (s == tile_name(static_cast<TileKind>(k))) return static_cast<TileKind>(k);
  fail(ErrorCode::ParseError, "unknown tile '" + s + "'");
}

Color flipped(const Color& c) { return Color::leaf(c.module, -c.sign); }

}  // namespace

Tile Tile::id(Obj o) {
  Tile t;
  t.obj = std::move(o);
  return t;
}

Tile Tile::cross(Color a, Color b, bool inverse) {
  Tile t;
  t.kind = inverse ? TileKind::CrossInv : TileKind::Cross;
  t.a = std::move(a);
  t.b = std::move(b);
  return t;
}

Tile Tile::twist(Color a, bool inverse) {
  Tile t;
  t.kind = inverse ? TileKind::TwistInv : TileKind::Twist;
  t.a = std::move(a);
  return t;
}

Tile Tile::cap(Color v, bool right) {
  Tile t;
  t.kind = right ? TileKind::CapR : TileKind::CapL;
  t.a = std::move(v);
  return t;
}

Tile Tile::cup(Color v, bool right) {
  Tile t;
  t.kind = right ? TileKind::CupR : TileKind::CupL;
  t.a = std::move(v);
  return t;
}

Tile Tile::coupon(std::string name, Obj in, Obj out) {
  Tile t;
  t.kind = TileKind::Coupon;
  t.name = std::move(name);
  t.in = std::move(in);
  t.out = std::move(out);
  return t;
}

Tile Tile::zip(Obj o, bool unzip) {
  Tile t;
  t.kind = unzip ? TileKind::Unzip : TileKind::Zip;
  t.obj = std::move(o);
  return t;
}

Tile Tile::boundary(std::string label, Color c, bool source) {
  Tile t;
  t.kind = source ? TileKind::Src : TileKind::Snk;
  t.name = std::move(label);
  t.a = std::move(c);
  return t;
}

bool Tile::operator==(const Tile& o) const {
  return kind == o.kind && a == o.a && b == o.b && obj == o.obj && name == o.name && in == o.in && out == o.out;
}

Obj tile_source(const Tile& t) {
  switch (t.kind) {
    case TileKind::Id:
    case TileKind::Zip: return t.obj;
    case TileKind::Unzip: return {Color::bundled(t.obj)};
    case TileKind::Cross:
    case TileKind::CrossInv: return {t.a, t.b};
    case TileKind::Twist:
    case TileKind::TwistInv:
    case TileKind::Snk: return {t.a};
    case TileKind::CapL: return {flipped(t.a), t.a};
    case TileKind::CapR: return {t.a, flipped(t.a)};
    case TileKind::CupL:
    case TileKind::CupR:
    case TileKind::Src: return {};
    case TileKind::Coupon: return t.in;
  }
  return {};
}

Obj tile_target(const Tile& t) {
  switch (t.kind) {
    case TileKind::Id:
    case TileKind::Unzip: return t.obj;
    case TileKind::Zip: return {Color::bundled(t.obj)};
    case TileKind::Cross:
    case TileKind::CrossInv: return {t.b, t.a};
    case TileKind::Twist:
    case TileKind::TwistInv:
    case TileKind::Src: return {t.a};
    case TileKind::CupL: return {t.a, flipped(t.a)};
    case TileKind::CupR: return {flipped(t.a), t.a};
    case TileKind::CapL:
    case TileKind::CapR:
    case TileKind::Snk: return {};
    case TileKind::Coupon: return t.out;
  }
  return {};
}

Obj row_source(const std::vector<Tile>& row) {
  Obj o;
  for (const auto& t : row) {
    Obj s = tile_source(t);
    o.insert(o.end(), s.begin(), s.end());
  }
  return o;
}

Obj row_target(const std::vector<Tile>& row) {
  Obj o;
  for (const auto& t : row) {
    Obj s = tile_target(t);
    o.insert(o.end(), s.begin(), s.end());
  }
  return o;
}

// ---------------------------------------------------------------- scalar text

namespace {

Frac parse_frac_text(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Frac(std::stoll(s));
    return Frac(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::logic_error&) {
    fail(ErrorCode::ParseError, "bad number '" + s + "'");
  }
}

// Laurent polynomial text: terms like 3, -q, 2*q^2, q^(-1/2), q^-1 joined by + and -.
LaurentQ parse_laurent_text(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail(ErrorCode::ParseError, "empty scalar");
  LaurentQ out;
  std::size_t i = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/')) ++j;
    Frac coef = j > i ? parse_frac_text(s.substr(i, j - i)) : Frac(1);
    i = j;
    if (i < s.size() && s[i] == '*') ++i;
    Frac e(0);
    if (i < s.size() && s[i] == 'q') {
      ++i;
      e = Frac(1);
      if (i < s.size() && s[i] == '^') {
        ++i;
        if (i < s.size() && s[i] == '(') {
          std::size_t close = s.find(')', i);
          if (close == std::string::npos) fail(ErrorCode::ParseError, "unbalanced exponent in '" + text + "'");
          e = parse_frac_text(s.substr(i + 1, close - i - 1));
          i = close + 1;
        } else {
          std::size_t k = i;
          if (k < s.size() && s[k] == '-') ++k;
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          e = parse_frac_text(s.substr(i, k - i));
          i = k;
        }
      }
    } else if (j == i && coef == Frac(1) && i < s.size()) {
      fail(ErrorCode::ParseError, "cannot read scalar '" + text + "'");
    }
    mpq_class c(mpz_class(std::to_string(coef.num())), mpz_class(std::to_string(coef.den())));
    c.canonicalize();
    out += LaurentQ::q_power(e, sign > 0 ? c : mpq_class(-c));
    if (i < s.size() && s[i] != '+' && s[i] != '-') fail(ErrorCode::ParseError, "cannot read scalar '" + text + "'");
  }
  return out;
}

Scalar scalar_from_json(const json& j, const QMode& mode) {
  if (j.is_number_integer()) return Scalar::lift(RatQ(j.get<long>()), mode);
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    // "(P)/(Q)" with Laurent polynomials P and Q
    if (!s.empty() && s.front() == '(') {
      int depth = 0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        depth += s[k] == '(' ? 1 : s[k] == ')' ? -1 : 0;
        if (depth == 0) {
          if (k + 1 < s.size() && s[k + 1] == '/') {
            LaurentQ n = parse_laurent_text(s.substr(1, k - 1));
            std::string rest = s.substr(k + 2);
            if (rest.size() >= 2 && rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
            return Scalar::lift(RatQ(n, parse_laurent_text(rest)), mode);
          }
          break;
        }
      }
    }
    return Scalar::lift(RatQ(parse_laurent_text(s)), mode);
  }
  return Scalar::from_json(j, mode);
}

std::vector<Scalar> vector_from_json(const json& j, const QMode& mode) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "vector must be an array");
  std::vector<Scalar> v;
  for (const auto& x : j) v.push_back(scalar_from_json(x, mode));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- JSON

Color color_from_json(const json& j) {
  if (j.is_string()) return Color::leaf(j.get<std::string>());
  if (j.is_array()) {
    std::vector<Color> parts;
    for (const auto& x : j) parts.push_back(color_from_json(x));
    return Color::bundled(std::move(parts));
  }
  if (j.is_object() && j.contains("module")) {
    int sign = j.value("sign", 1);
    if (sign != 1 && sign != -1) fail(ErrorCode::ParseError, "sign must be 1 or -1");
    return Color::leaf(j["module"].get<std::string>(), sign);
  }
  fail(ErrorCode::ParseError, "bad color " + j.dump());
}

json color_to_json(const Color& c) {
  if (c.is_bundle) {
    json a = json::array();
    for (const auto& p : c.bundle) a.push_back(color_to_json(p));
    return a;
  }
  if (c.sign > 0) return c.module;
  return json{{"module", c.module}, {"sign", c.sign}};
}

Obj obj_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "object must be an array of colors");
  Obj o;
  for (const auto& x : j) o.push_back(color_from_json(x));
  return o;
}

json obj_to_json(const Obj& o) {
  json a = json::array();
  for (const auto& c : o) a.push_back(color_to_json(c));
  return a;
}

namespace {

Tile tile_from_json(const json& j, std::size_t slice, std::size_t index) {
  std::string where = "slice " + std::to_string(slice) + ", tile " + std::to_string(index);
  if (!j.is_object() || !j.contains("tile") || !j["tile"].is_string())
    fail(ErrorCode::ParseError, where + ": tile needs a 'tile' field");
  try {
    TileKind k = parse_tile_kind(j["tile"].get<std::string>());
    auto need = [&](const char* key) -> const json& {
      if (!j.contains(key)) fail(ErrorCode::ArityError, where + ": " + tile_name(k) + " needs '" + key + "'");
      return j[key];
    };
    switch (k) {
      case TileKind::Id: return Tile::id(obj_from_json(need("obj")));
      case TileKind::Zip:
      case TileKind::Unzip: return Tile::zip(obj_from_json(need("obj")), k == TileKind::Unzip);
      case TileKind::Cross:
      case TileKind::CrossInv:
        return Tile::cross(color_from_json(need("a")), color_from_json(need("b")), k == TileKind::CrossInv);
      case TileKind::Twist:
      case TileKind::TwistInv: return Tile::twist(color_from_json(need("a")), k == TileKind::TwistInv);
      case TileKind::CapL:
      case TileKind::CapR: return Tile::cap(color_from_json(need("a")), k == TileKind::CapR);
      case TileKind::CupL:
      case TileKind::CupR: return Tile::cup(color_from_json(need("a")), k == TileKind::CupR);
      case TileKind::Coupon:
        return Tile::coupon(need("name").get<std::string>(), obj_from_json(need("in")), obj_from_json(need("out")));
      case TileKind::Src:
      case TileKind::Snk:
        return Tile::boundary(need("label").get<std::string>(), color_from_json(need("a")), k == TileKind::Src);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, where + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::ArityError) {
      std::string msg = e.what();
      if (msg.find("slice ") == std::string::npos) fail(e.code(), where + ": " + msg);
    }
    throw;
  }
  fail(ErrorCode::ParseError, where);
}

json tile_to_json(const Tile& t) {
  json j{{"tile", tile_name(t.kind)}};
  switch (t.kind) {
    case TileKind::Id:
    case TileKind::Zip:
    case TileKind::Unzip: j["obj"] = obj_to_json(t.obj); break;
    case TileKind::Cross:
    case TileKind::CrossInv:
      j["a"] = color_to_json(t.a);
      j["b"] = color_to_json(t.b);
      break;
    case TileKind::Twist:
    case TileKind::TwistInv:
    case TileKind::CapL:
    case TileKind::CapR:
    case TileKind::CupL:
    case TileKind::CupR: j["a"] = color_to_json(t.a); break;
    case TileKind::Coupon:
      j["name"] = t.name;
      j["in"] = obj_to_json(t.in);
      j["out"] = obj_to_json(t.out);
      break;
    case TileKind::Src:
    case TileKind::Snk:
      j["label"] = t.name;
      j["a"] = color_to_json(t.a);
      break;
  }
  return j;
}

}  // namespace

Diagram diagram_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "diagram must be a JSON object");
  Diagram d;
  d.mode = parse_mode(j.value("mode", std::string("braid")));
  if (j.contains("slices")) {
    if (!j["slices"].is_array()) fail(ErrorCode::ParseError, "'slices' must be an array");
    std::size_t s = 0;
    for (const auto& row : j["slices"]) {
      if (!row.is_array()) fail(ErrorCode::ParseError, "slice " + std::to_string(s) + " must be an array");
      std::vector<Tile> tiles;
      std::size_t k = 0;
      for (const auto& t : row) tiles.push_back(tile_from_json(t, s, k++));
      d.slices.push_back(std::move(tiles));
      ++s;
    }
  }
  return d;
}

Diagram parse_diagram(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return diagram_from_json(j);
}

json diagram_to_json(const Diagram& d) {
  json slices = json::array();
  for (const auto& row : d.slices) {
    json r = json::array();
    for (const auto& t : row) r.push_back(tile_to_json(t));
    slices.push_back(r);
  }
  return json{{"mode", mode_name(d.mode)}, {"slices", slices}};
}

std::string serialize_diagram(const Diagram& d) { return diagram_to_json(d).dump(); }

// ---------------------------------------------------------------- environment

void ColoringEnv::add_module(const std::string& id, ModulePtr m) {
  if (id.empty() || id.back() == '*') fail(ErrorCode::InvalidArgument, "module id '" + id + "' is reserved");
  modules_[id] = std::move(m);
}

void ColoringEnv::add_coupon(const std::string& name, GradedMap g) { coupons_[name] = std::move(g); }
void ColoringEnv::add_boundary(const std::string& label, BoundaryData b) { boundaries_[label] = std::move(b); }

ModulePtr ColoringEnv::module(const std::string& id) const {
  auto it = modules_.find(id);
  if (it != modules_.end()) return it->second;
  if (!id.empty() && id.back() == '*') {
    std::string base = id.substr(0, id.size() - 1);
    ModulePtr v = module(base);
    if (!v->is_finite()) fail(ErrorCode::InfiniteDualError, "module " + base + " has no dual here");
    std::lock_guard<std::mutex> lock(*mu_);
    auto d = duals_.find(id);
    if (d != duals_.end()) return d->second;
    ModulePtr m = restricted_dual(v);
    duals_[id] = m;
    return m;
  }
  fail(ErrorCode::UnknownName, "unknown module '" + id + "'");
}

ModulePtr ColoringEnv::leaf_module(const Color& c) const {
  if (c.is_bundle) fail(ErrorCode::TypeMismatch, "expected a single strand, got bundle " + c.str());
  return c.sign > 0 ? module(c.module) : module(c.module + "*");
}

std::vector<ModulePtr> ColoringEnv::obj_modules(const Obj& o) const {
  std::vector<ModulePtr> out;
  for (const auto& c : flatten(o)) out.push_back(leaf_module(c));
  return out;
}

ModulePtr ColoringEnv::color_module(const Color& c) const {
  if (!c.is_bundle) return leaf_module(c);
  return tensor_all(obj_modules({c}), cartan_, mode_);
}

int ColoringEnv::obj_dim(const Obj& o) const {
  int d = 1;
  for (const auto& m : obj_modules(o)) d *= m->dim();
  return d;
}

const BoundaryData& ColoringEnv::boundary(const std::string& label) const {
  auto it = boundaries_.find(label);
  if (it == boundaries_.end()) fail(ErrorCode::UnknownName, "unknown boundary label '" + label + "'");
  return it->second;
}

std::vector<std::string> ColoringEnv::module_ids() const {
  std::vector<std::string> v;
  for (const auto& [k, m] : modules_) v.push_back(k);
  return v;
}

std::vector<std::string> ColoringEnv::coupon_names() const {
  std::vector<std::string> v;
  for (const auto& [k, m] : coupons_) v.push_back(k);
  return v;
}

GradedMap ColoringEnv::memo(const std::string& key, const std::function<GradedMap()>& make) const {
  {
    std::lock_guard<std::mutex> lock(*mu_);
    auto it = derived_.find(key);
    if (it != derived_.end()) return it->second;
  }
  GradedMap g = make();
  std::lock_guard<std::mutex> lock(*mu_);
  return derived_.emplace(key, std::move(g)).first->second;
}

namespace {

const std::string kCirc = "∘";
const std::string kOtimes = "⊗";

// Splits at top-level occurrences of op (outside parentheses and brackets).
std::vector<std::string> split_top(const std::string& s, const std::string& op) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size();) {
    char ch = s[k];
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (depth == 0 && s.compare(k, op.size(), op) == 0) {
      parts.push_back(s.substr(start, k - start));
      k += op.size();
      start = k;
      continue;
    }
    ++k;
  }
  parts.push_back(s.substr(start));
  return parts;
}

bool wrapped(const std::string& s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
  int depth = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    depth += s[k] == '(' ? 1 : s[k] == ')' ? -1 : 0;
    if (depth == 0 && k + 1 < s.size()) return false;
  }
  return true;
}

std::string key_of(const void* p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace

bool ColoringEnv::has_coupon(const std::string& name) const {
  try {
    coupon(name);
    return true;
  } catch (const Error&) {
    return false;
  }
}

GradedMap ColoringEnv::coupon(const std::string& name) const {
  auto it = coupons_.find(name);
  if (it != coupons_.end()) return it->second;
  return memo("coupon:" + name, [&]() -> GradedMap {
    std::vector<std::string> parts = split_top(name, kCirc);
    if (parts.size() > 1) {
      GradedMap g = coupon(parts.back());
      for (std::size_t k = parts.size() - 1; k-- > 0;) g = compose(coupon(parts[k]), g);
      return g;
    }
    parts = split_top(name, kOtimes);
    if (parts.size() > 1) {
      GradedMap g = coupon(parts[0]);
      for (std::size_t k = 1; k < parts.size(); ++k) g = tensor_maps(g, coupon(parts[k]));
      return g;
    }
    if (wrapped(name)) return coupon(name.substr(1, name.size() - 2));
    if (!name.empty() && name.back() == '*') {
      GradedMap a = coupon(name.substr(0, name.size() - 1));
      return dual_morphism(a);
    }
    auto lb = name.find('[');
    if (lb != std::string::npos && name.back() == ']') {
      std::string op = name.substr(0, lb);
      std::vector<std::string> args;
      std::string inner = name.substr(lb + 1, name.size() - lb - 2);
      std::stringstream ss(inner);
      for (std::string a; std::getline(ss, a, ',');) args.push_back(a);
      auto arity = [&](std::size_t n) {
        if (args.size() != n) fail(ErrorCode::ArityError, "builtin " + op + " takes " + std::to_string(n) + " modules");
      };
      if (op == "e" || op == "et" || op == "i" || op == "it") {
        arity(1);
        DualityData d = make_duality(module(args[0]), module(args[0] + "*"));
        return op == "e" ? d.eval : op == "et" ? d.right_eval : op == "i" ? d.inj : d.right_inj;
      }
      if (op == "c") {
        arity(2);
        return braiding(module(args[0]), module(args[1]));
      }
      if (op == "ci") {
        arity(2);
        return braiding_inverse(module(args[1]), module(args[0]));
      }
      if (op == "theta" || op == "thetai") {
        arity(1);
        return ribbon_op(module(args[0]), op == "thetai");
      }
      if (op == "id") {
        arity(1);
        return identity_map(module(args[0]));
      }
    }
    fail(ErrorCode::UnknownName, "unknown coupon '" + name + "'");
  });
}

ColoringEnv ColoringEnv::from_json(const json& j, const CartanPtr& c, const QMode& mode, int H) {
  ColoringEnv env(c, mode);
  if (!j.is_object()) fail(ErrorCode::ParseError, "environment must be a JSON object");
  if (j.contains("modules")) {
    for (const auto& [id, spec] : j["modules"].items()) {
      std::string s = spec.get<std::string>();
      if (!s.empty() && s[0] == 'M' && s.find(':') == std::string::npos) s += ":" + std::to_string(H);
      env.add_module(id, module_from_spec(c, s, mode));
      env.specs_[id] = s;
    }
  }
  if (j.contains("coupons")) {
    for (const auto& [name, cj] : j["coupons"].items()) {
      if (cj.is_string()) {
        env.add_coupon(name, env.coupon(cj.get<std::string>()));
        continue;
      }
      Obj in = obj_from_json(cj.at("in")), out = obj_from_json(cj.at("out"));
      ModulePtr src = tensor_all(env.obj_modules(in), c, mode);
      ModulePtr tgt = tensor_all(env.obj_modules(out), c, mode);
      const json& rows = cj.at("matrix");
      if (!rows.is_array() || static_cast<int>(rows.size()) != tgt->dim())
        fail(ErrorCode::ShapeMismatch, "coupon " + name + " needs " + std::to_string(tgt->dim()) + " rows");
      Matrix m(tgt->dim(), src->dim());
      for (int r = 0; r < tgt->dim(); ++r) {
        std::vector<Scalar> row = vector_from_json(rows[static_cast<std::size_t>(r)], mode);
        if (static_cast<int>(row.size()) != src->dim())
          fail(ErrorCode::ShapeMismatch, "coupon " + name + " row " + std::to_string(r) + " has wrong length");
        for (int k = 0; k < src->dim(); ++k)
          if (!row[static_cast<std::size_t>(k)].is_zero()) m.set(r, k, row[static_cast<std::size_t>(k)]);
      }
      env.add_coupon(name, GradedMap{src, tgt, std::move(m), c->zero(), {}});
    }
  }
  if (j.contains("boundaries")) {
    for (const auto& [label, bj] : j["boundaries"].items()) {
      BoundaryData b{color_from_json(bj.at("color")), vector_from_json(bj.at("vector"), mode)};
      if (static_cast<int>(b.vec.size()) != env.obj_dim({b.color}))
        fail(ErrorCode::ShapeMismatch, "boundary " + label + " has wrong length");
      env.add_boundary(label, std::move(b));
    }
  }
  return env;
}

json ColoringEnv::to_json() const {
  json mods = json::object(), cps = json::object(), bds = json::object();
  for (const auto& [id, s] : specs_) mods[id] = s;
  for (const auto& [name, g] : coupons_) {
    json rows = json::array();
    for (int r = 0; r < g.mat.rows(); ++r) {
      json row = json::array();
      for (int k = 0; k < g.mat.cols(); ++k) row.push_back(g.mat.get(r, k).to_json());
      rows.push_back(row);
    }
    cps[name] = json{{"matrix", rows}, {"source", g.source ? g.source->name : ""}};
  }
  for (const auto& [label, b] : boundaries_) {
    json v = json::array();
    for (const auto& s : b.vec) v.push_back(s.to_json());
    bds[label] = json{{"color", color_to_json(b.color)}, {"vector", v}};
  }
  return json{{"modules", mods}, {"coupons", cps}, {"boundaries", bds}};
}

// ---------------------------------------------------------------- typecheck

namespace {

std::string at_slice(std::size_t s) { return "slice " + std::to_string(s) + ": "; }

void check_leaf_signs(const Obj& o, const Diagram& d, const ColoringEnv& env, std::size_t s) {
  for (const auto& c : flatten(o)) {
    if (c.sign < 0) {
      if (d.mode == DiagramMode::Braid)
        fail(ErrorCode::TypeMismatch, at_slice(s) + "braid diagrams have downward strands only (" + c.str() + ")");
      if (!env.module(c.module)->is_finite())
        fail(ErrorCode::InfiniteDualError, at_slice(s) + "strand " + c.module + " cannot be reversed");
    } else {
      env.module(c.module);
    }
  }
}

std::vector<Weight> obj_weights(const std::vector<ModulePtr>& ms, const CartanPtr& c) {
  std::vector<Weight> w{c->zero()};
  for (const auto& m : ms) {
    std::vector<Weight> next;
    next.reserve(w.size() * static_cast<std::size_t>(m->dim()));
    for (const auto& a : w)
      for (int b = 0; b < m->dim(); ++b) next.push_back(a + m->weight(b));
    w = std::move(next);
  }
  return w;
}

void check_tile(const Tile& t, const Diagram& d, const ColoringEnv& env, std::size_t s) {
  check_leaf_signs(tile_source(t), d, env, s);
  check_leaf_signs(tile_target(t), d, env, s);
  switch (t.kind) {
    case TileKind::CapL:
    case TileKind::CapR:
    case TileKind::CupL:
    case TileKind::CupR: {
      if (d.mode == DiagramMode::Braid)
        fail(ErrorCode::TypeMismatch, at_slice(s) + "caps and cups need rt or graded mode");
      if (t.a.is_bundle || t.a.sign < 0)
        fail(ErrorCode::TypeMismatch, at_slice(s) + "caps and cups take a single positive strand, got " + t.a.str());
      if (!env.module(t.a.module)->is_finite())
        fail(ErrorCode::InfiniteDualError, at_slice(s) + "strand " + t.a.module + " cannot be capped");
      break;
    }
    case TileKind::Coupon: {
      GradedMap g = env.coupon(t.name);
      auto ins = env.obj_modules(t.in), outs = env.obj_modules(t.out);
      int di = 1, dout = 1;
      for (const auto& m : ins) di *= m->dim();
      for (const auto& m : outs) dout *= m->dim();
      if (g.mat.cols() != di || g.mat.rows() != dout)
        fail(ErrorCode::TypeMismatch, at_slice(s) + "coupon " + t.name + " does not fit " + obj_str(t.in) + " -> " +
                                          obj_str(t.out));
      const CartanPtr& c = env.cartan();
      if (g.source && g.source->dim() == di) {
        auto w = obj_weights(ins, c);
        for (int k = 0; k < di; ++k)
          if (!(g.source->weight(k) == w[static_cast<std::size_t>(k)]))
            fail(ErrorCode::TypeMismatch, at_slice(s) + "coupon " + t.name + " source weights differ from " + obj_str(t.in));
      }
      if (g.target && g.target->dim() == dout) {
        auto w = obj_weights(outs, c);
        for (int k = 0; k < dout; ++k)
          if (!(g.target->weight(k) == w[static_cast<std::size_t>(k)]))
            fail(ErrorCode::TypeMismatch, at_slice(s) + "coupon " + t.name + " target weights differ from " + obj_str(t.out));
      }
      break;
    }
    case TileKind::Src:
    case TileKind::Snk: {
      const BoundaryData& b = env.boundary(t.name);
      if (flatten(b.color) != flatten(t.a))
        fail(ErrorCode::TypeMismatch, at_slice(s) + "boundary " + t.name + " is colored " + b.color.str());
      break;
    }
    default: break;
  }
}

}  // namespace

Boundary typecheck(const Diagram& d, const ColoringEnv& env) {
  Boundary b;
  for (std::size_t s = 0; s < d.slices.size(); ++s) {
    const auto& row = d.slices[s];
    for (const auto& t : row) check_tile(t, d, env, s);
    Obj src = row_source(row);
    if (s == 0) b.source = src;
    else if (src != b.target)
      fail(ErrorCode::TypeMismatch, at_slice(s) + "expects " + obj_str(src) + " but receives " + obj_str(b.target));
    b.target = row_target(row);
  }
  return b;
}

// ---------------------------------------------------------------- evaluation

namespace {

std::vector<char> kron_mask(const std::vector<char>& va, int na, const std::vector<char>& vb, int nb) {
  if (va.empty() && vb.empty()) return {};
  std::vector<char> r(static_cast<std::size_t>(na) * static_cast<std::size_t>(nb));
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      r[static_cast<std::size_t>(a) * static_cast<std::size_t>(nb) + static_cast<std::size_t>(b)] =
          (va.empty() || va[static_cast<std::size_t>(a)]) && (vb.empty() || vb[static_cast<std::size_t>(b)]);
  return r;
}

struct Piece {
  Matrix mat;
  std::vector<char> valid;
  Weight degree;
};

Weight vec_degree(const ModulePtr& m, const std::vector<Scalar>& v, const CartanPtr& c) {
  std::optional<Weight> w;
  for (int b = 0; b < m->dim(); ++b) {
    if (v[static_cast<std::size_t>(b)].is_zero()) continue;
    if (!w) w = m->weight(b);
    else if (!(*w == m->weight(b))) return c->zero();
  }
  return w ? *w : c->zero();
}

Piece tile_piece(const Tile& t, DiagramMode mode, const ColoringEnv& env) {
  const CartanPtr& c = env.cartan();
  auto from = [&](const GradedMap& g) { return Piece{g.mat, g.valid, g.degree}; };
  bool graded = mode == DiagramMode::Graded;
  switch (t.kind) {
    case TileKind::Id:
    case TileKind::Zip:
    case TileKind::Unzip: return Piece{Matrix::identity(env.obj_dim(t.obj)), {}, c->zero()};
    case TileKind::Cross:
    case TileKind::CrossInv: {
      ModulePtr a = env.color_module(t.a), b = env.color_module(t.b);
      if (graded) return Piece{flip_matrix(a->dim(), b->dim()), {}, c->zero()};
      bool inv = t.kind == TileKind::CrossInv;
      std::string key = std::string(inv ? "ci:" : "c:") + key_of(a.get()) + ":" + key_of(b.get());
      return from(env.memo(key, [&] { return inv ? braiding_inverse(b, a) : braiding(a, b); }));
    }
    case TileKind::Twist:
    case TileKind::TwistInv: {
      bool inv = t.kind == TileKind::TwistInv;
      if (graded) return Piece{Matrix::identity(env.obj_dim({t.a})), {}, c->zero()};
      if (!t.a.is_bundle && t.a.sign < 0) {
        ModulePtr v = env.module(t.a.module), vd = env.leaf_module(t.a);
        std::string key = std::string(inv ? "ti*:" : "t*:") + key_of(v.get());
        return from(env.memo(key, [&] { return dual_morphism(ribbon_op(v, inv), vd, vd); }));
      }
      ModulePtr m = env.color_module(t.a);
      std::string key = std::string(inv ? "ti:" : "t:") + key_of(m.get());
      return from(env.memo(key, [&] { return ribbon_op(m, inv); }));
    }
    case TileKind::CapL:
    case TileKind::CapR:
    case TileKind::CupL:
    case TileKind::CupR: {
      ModulePtr v = env.module(t.a.module), vd = env.leaf_module(flipped(t.a));
      DualityData dd = make_duality(v, vd);
      switch (t.kind) {
        case TileKind::CapL: return from(dd.eval);
        case TileKind::CupL: return from(dd.inj);
        case TileKind::CapR: return graded ? Piece{dd.eval.mat, {}, c->zero()} : from(dd.right_eval);
        default: return graded ? Piece{dd.inj.mat, {}, c->zero()} : from(dd.right_inj);
      }
    }
    case TileKind::Coupon: return from(env.coupon(t.name));
    case TileKind::Src:
    case TileKind::Snk: {
      const BoundaryData& b = env.boundary(t.name);
      ModulePtr m = env.color_module(b.color);
      int n = m->dim();
      bool src = t.kind == TileKind::Src;
      Matrix mat = src ? Matrix(n, 1) : Matrix(1, n);
      for (int k = 0; k < n; ++k) {
        const Scalar& x = b.vec[static_cast<std::size_t>(k)];
        if (x.is_zero()) continue;
        if (src) mat.set(k, 0, x);
        else mat.set(0, k, x);
      }
      Weight w = vec_degree(m, b.vec, c);
      return Piece{std::move(mat), {}, src ? w : -w};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown tile");
}

}  // namespace

GradedMap evaluate(const Diagram& d, const ColoringEnv& env) {
  Boundary bd = typecheck(d, env);
  const CartanPtr& c = env.cartan();
  int n0 = env.obj_dim(bd.source);
  Matrix cur = Matrix::identity(n0);
  std::vector<char> valid;
  Weight degree = c->zero();
  for (const auto& row : d.slices) {
    Matrix rm = Matrix::identity(1);
    std::vector<char> rv;
    for (const auto& t : row) {
      Piece p = tile_piece(t, d.mode, env);
      rv = kron_mask(rv, rm.cols(), p.valid, p.mat.cols());
      rm = kron(rm, p.mat);
      degree += p.degree;
    }
    valid = compose_valid(cur, rv, valid);
    cur = rm * cur;
  }
  ModulePtr src = tensor_all(env.obj_modules(bd.source), c, env.mode());
  ModulePtr tgt = tensor_all(env.obj_modules(bd.target), c, env.mode());
  GradedMap g{src, tgt, std::move(cur), degree, std::move(valid)};
  if (!g.valid.empty() && g.all_valid()) g.valid.clear();
  return g;
}

DotResult dot_equal(const Diagram& a, const Diagram& b, const ColoringEnv& env) {
  Boundary ba = typecheck(a, env), bb = typecheck(b, env);
  if (flatten(ba.source) != flatten(bb.source) || flatten(ba.target) != flatten(bb.target))
    fail(ErrorCode::BoundaryMismatch, obj_str(ba.source) + " -> " + obj_str(ba.target) + " vs " + obj_str(bb.source) +
                                          " -> " + obj_str(bb.target));
  GradedMap ea = evaluate(a, env), eb = evaluate(b, env);
  CompareResult r = compare_maps(ea, eb);
  DotResult out;
  out.equal = r.pass;
  out.max_residual = r.max_residual;
  if (!r.pass)
    out.witness = "entry (" + std::to_string(r.row) + "," + std::to_string(r.col) + "): " + r.lhs + " vs " + r.rhs;
  return out;
}

// ---------------------------------------------------------------- combinators

Diagram identity_diagram(const Obj& o, DiagramMode mode) {
  Diagram d;
  d.mode = mode;
  if (!o.empty()) d.slices.push_back({Tile::id(o)});
  return d;
}

Diagram stack(const Diagram& a, const Diagram& b) {
  if (a.mode != b.mode) fail(ErrorCode::TypeMismatch, "cannot stack diagrams of different modes");
  Diagram d = a;
  d.slices.insert(d.slices.end(), b.slices.begin(), b.slices.end());
  return d;
}

Diagram side_by_side(const Diagram& a, const Diagram& b) {
  if (a.mode != b.mode) fail(ErrorCode::TypeMismatch, "cannot juxtapose diagrams of different modes");
  auto top = [](const Diagram& d) { return d.slices.empty() ? Obj{} : row_target(d.slices.back()); };
  std::size_t n = std::max(a.slices.size(), b.slices.size());
  Diagram d;
  d.mode = a.mode;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Tile> row;
    for (const Diagram* x : {&a, &b}) {
      if (s < x->slices.size()) row.insert(row.end(), x->slices[s].begin(), x->slices[s].end());
      else {
        Obj o = top(*x);
        if (!o.empty()) row.push_back(Tile::id(o));
      }
    }
    d.slices.push_back(std::move(row));
  }
  return d;
}

namespace {

using Rows = std::vector<std::vector<Tile>>;

std::vector<Tile> padded(const Obj& pre, Tile t, const Obj& post) {
  std::vector<Tile> row;
  if (!pre.empty()) row.push_back(Tile::id(pre));
  row.push_back(std::move(t));
  if (!post.empty()) row.push_back(Tile::id(post));
  return row;
}

Obj slice_of(const Obj& o, std::size_t from, std::size_t to) {
  return Obj(o.begin() + static_cast<long>(from), o.begin() + static_cast<long>(to));
}

// Rows crossing leaves xs past leaves ys: (xs, ys) -> (ys, xs).
Rows cross_rows(const Obj& xs, const Obj& ys, bool inverse) {
  Rows rows;
  std::size_t n = xs.size(), m = ys.size();
  Obj cur = xs;
  cur.insert(cur.end(), ys.begin(), ys.end());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = n; l-- > 0;) {
      std::size_t p = j + l;
      rows.push_back(padded(slice_of(cur, 0, p), Tile::cross(cur[p], cur[p + 1], inverse), slice_of(cur, p + 2, cur.size())));
      std::swap(cur[p], cur[p + 1]);
    }
  }
  return rows;
}

Rows twist_rows(const Obj& leaves, bool inverse) {
  if (leaves.empty()) return {};
  if (leaves.size() == 1) return {{Tile::twist(leaves[0], inverse)}};
  Obj head = slice_of(leaves, 0, leaves.size() - 1);
  Obj last{leaves.back()};
  Rows inner = twist_rows(head, inverse);
  for (auto& r : inner) r.push_back(Tile::id(last));
  inner.push_back(padded(head, Tile::twist(leaves.back(), inverse), {}));
  Rows out;
  if (!inverse) {
    Rows c1 = cross_rows(head, last, false), c2 = cross_rows(last, head, false);
    out.insert(out.end(), c1.begin(), c1.end());
    out.insert(out.end(), c2.begin(), c2.end());
    out.insert(out.end(), inner.begin(), inner.end());
  } else {
    Rows c1 = cross_rows(head, last, true), c2 = cross_rows(last, head, true);
    out.insert(out.end(), inner.begin(), inner.end());
    out.insert(out.end(), c1.begin(), c1.end());
    out.insert(out.end(), c2.begin(), c2.end());
  }
  return out;
}

}  // namespace

Rows unzip_rows(const Obj& o, bool zip) {
  std::vector<Obj> stages{o};
  Rows rows;
  while (true) {
    const Obj& cur = stages.back();
    bool any = false;
    std::vector<Tile> row;
    Obj next;
    for (const auto& c : cur) {
      if (c.is_bundle) {
        any = true;
        row.push_back(Tile::zip(c.bundle, true));
        next.insert(next.end(), c.bundle.begin(), c.bundle.end());
      } else {
        row.push_back(Tile::id({c}));
        next.push_back(c);
      }
    }
    if (!any) break;
    rows.push_back(std::move(row));
    stages.push_back(std::move(next));
  }
  if (zip) {
    std::reverse(rows.begin(), rows.end());
    for (auto& r : rows)
      for (auto& t : r)
        if (t.kind == TileKind::Unzip) t.kind = TileKind::Zip;
  }
  return rows;
}

Diagram expand_bundles(const Diagram& d) {
  Diagram out;
  out.mode = d.mode;
  for (const auto& row : d.slices) {
    Obj src = flatten(row_source(row));
    Rows rows;
    // tiles act on disjoint strands, so expand them one after another
    Obj done;  // flattened targets of the tiles already expanded
    for (std::size_t k = 0; k < row.size(); ++k) {
      const Tile& t = row[k];
      Obj rest;
      for (std::size_t l = k + 1; l < row.size(); ++l) {
        Obj f = flatten(tile_source(row[l]));
        rest.insert(rest.end(), f.begin(), f.end());
      }
      Rows local;
      switch (t.kind) {
        case TileKind::Id:
        case TileKind::Zip:
        case TileKind::Unzip: break;
        case TileKind::Cross:
        case TileKind::CrossInv: local = cross_rows(flatten(t.a), flatten(t.b), t.kind == TileKind::CrossInv); break;
        case TileKind::Twist:
        case TileKind::TwistInv: local = twist_rows(flatten(t.a), t.kind == TileKind::TwistInv); break;
        case TileKind::Coupon: local = {{Tile::coupon(t.name, flatten(t.in), flatten(t.out))}}; break;
        case TileKind::Src: {
          local = {{t}};
          Rows u = unzip_rows({t.a}, false);
          local.insert(local.end(), u.begin(), u.end());
          break;
        }
        case TileKind::Snk: {
          local = unzip_rows({t.a}, true);
          local.push_back({t});
          break;
        }
        default: local = {{t}}; break;
      }
      for (auto& r : local) {
        std::vector<Tile> full;
        if (!done.empty()) full.push_back(Tile::id(done));
        full.insert(full.end(), r.begin(), r.end());
        if (!rest.empty()) full.push_back(Tile::id(rest));
        rows.push_back(std::move(full));
      }
      Obj f = flatten(tile_target(t));
      done.insert(done.end(), f.begin(), f.end());
    }
    if (rows.empty() && !src.empty()) rows.push_back({Tile::id(src)});
    out.slices.insert(out.slices.end(), rows.begin(), rows.end());
  }
  return out;
}

namespace {

Color desugar_color(const Color& c) {
  if (c.is_bundle) {
    std::vector<Color> parts;
    for (const auto& p : c.bundle) parts.push_back(desugar_color(p));
    return Color::bundled(std::move(parts));
  }
  return c.sign > 0 ? c : Color::leaf(c.module + "*");
}

Obj desugar_obj(const Obj& o) {
  Obj r;
  for (const auto& c : o) r.push_back(desugar_color(c));
  return r;
}

}  // namespace

Diagram desugar(const Diagram& d) {
  Diagram out;
  out.mode = d.mode == DiagramMode::RT ? DiagramMode::Braid : d.mode;
  for (const auto& row : d.slices) {
    std::vector<Tile> r;
    for (const auto& t : row) {
      Tile u = t;
      u.a = desugar_color(t.a);
      u.b = desugar_color(t.b);
      u.obj = desugar_obj(t.obj);
      u.in = desugar_obj(t.in);
      u.out = desugar_obj(t.out);
      const std::string& v = t.a.module;
      Color pos = Color::leaf(v), neg = Color::leaf(v + "*");
      switch (t.kind) {
        case TileKind::CapL: u = Tile::coupon("e[" + v + "]", {neg, pos}, {}); break;
        case TileKind::CapR: u = Tile::coupon("et[" + v + "]", {pos, neg}, {}); break;
        case TileKind::CupL: u = Tile::coupon("i[" + v + "]", {}, {pos, neg}); break;
        case TileKind::CupR: u = Tile::coupon("it[" + v + "]", {}, {neg, pos}); break;
        default: break;
      }
      r.push_back(std::move(u));
    }
    out.slices.push_back(std::move(r));
  }
  return out;
}

std::string ascii(const Diagram& d) {
  std::ostringstream os;
  os << "[" << mode_name(d.mode) << "]\n";
  for (std::size_t s = d.slices.size(); s-- > 0;) {
    os << s << ": ";
    for (const auto& t : d.slices[s]) {
      switch (t.kind) {
        case TileKind::Id: os << std::string(flatten(t.obj).size(), '|'); break;
        case TileKind::Cross: os << "X"; break;
        case TileKind::CrossInv: os << "x"; break;
        case TileKind::Twist: os << "@"; break;
        case TileKind::TwistInv: os << "@'"; break;
        case TileKind::CapL: os << "n"; break;
        case TileKind::CapR: os << "n~"; break;
        case TileKind::CupL: os << "u"; break;
        case TileKind::CupR: os << "u~"; break;
        case TileKind::Coupon: os << "[" << t.name << "]"; break;
        case TileKind::Zip: os << ">"; break;
        case TileKind::Unzip: os << "<"; break;
        case TileKind::Src: os << "(" << t.name << ")"; break;
        case TileKind::Snk: os << "<" << t.name << ">"; break;
      }
      os << ' ';
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qvo
