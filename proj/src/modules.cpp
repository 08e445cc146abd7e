#include "qvo/modules.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qvo {

using json = nlohmann::json;

// ---------------------------------------------------------------- WeightModule

bool WeightModule::is_finite() const {
  return std::all_of(basis.begin(), basis.end(), [](const BasisVector& b) { return b.margin >= kExactMargin; });
}

int WeightModule::spread() const {
  switch (kind) {
    case ModuleKind::Verma: return 0;
    case ModuleKind::Tensor: return left->spread() + right->spread();
    default: break;
  }
  if (basis.empty()) return 0;
  Frac lo = cartan->height(basis[0].weight), hi = lo;
  for (const auto& b : basis) {
    Frac h = cartan->height(b.weight);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return static_cast<int>((hi - lo).floor());
}

int WeightModule::min_margin() const {
  int m = kExactMargin;
  for (const auto& b : basis) m = std::min(m, b.margin);
  return m;
}

std::map<Weight, std::vector<int>> WeightModule::weight_spaces() const {
  std::map<Weight, std::vector<int>> s;
  for (int b = 0; b < dim(); ++b) s[weight(b)].push_back(b);
  return s;
}

Matrix WeightModule::q_diag(const std::function<Frac(const Weight&)>& f) const {
  std::vector<Scalar> d;
  d.reserve(basis.size());
  for (const auto& b : basis) d.push_back(Scalar::q_pow(f(b.weight), mode));
  return Matrix::diagonal(d);
}

Matrix WeightModule::K(int i, int power) const {
  Weight a = cartan->simple_root(i);
  return q_diag([&](const Weight& w) { return Frac(power) * cartan->pairing(w, a); });
}

std::vector<char> WeightModule::f_valid() const {
  if (is_finite()) return {};
  std::vector<char> v(basis.size());
  for (std::size_t b = 0; b < basis.size(); ++b) v[b] = basis[b].margin >= 1;
  return v;
}

namespace {

const char* kind_name(ModuleKind k) {
  switch (k) {
    case ModuleKind::Trivial: return "trivial";
    case ModuleKind::Verma: return "verma";
    case ModuleKind::Simple: return "simple";
    case ModuleKind::Tensor: return "tensor";
    case ModuleKind::Dual: return "dual";
    case ModuleKind::Custom: return "custom";
  }
  return "custom";
}

}  // namespace

json WeightModule::to_json() const {
  json b = json::array();
  for (const auto& v : basis) {
    json e{{"label", v.label}, {"weight", v.weight.to_json()}};
    if (v.margin < kExactMargin) e["margin"] = v.margin;
    b.push_back(e);
  }
  json es = json::array(), fs = json::array();
  for (const auto& m : E) es.push_back(m.to_json());
  for (const auto& m : F) fs.push_back(m.to_json());
  json out{{"name", name}, {"kind", kind_name(kind)}, {"cartan", cartan->to_json()["cartan"]},
           {"mode", mode.str()}, {"basis", b}, {"E", es}, {"F", fs}};
  if (truncation >= 0) out["truncation"] = truncation;
  if (highest_weight) out["highest_weight"] = highest_weight->to_json();
  return out;
}

bool GradedMap::all_valid() const {
  return std::all_of(valid.begin(), valid.end(), [](char c) { return c != 0; });
}

int GradedMap::valid_count() const {
  if (valid.empty()) return mat.cols();
  return static_cast<int>(std::count(valid.begin(), valid.end(), 1));
}

json GradedMap::to_json() const {
  json out{{"source", source ? source->name : ""},
           {"target", target ? target->name : ""},
           {"degree", degree.to_json()},
           {"matrix", mat.to_json()}};
  if (!valid.empty()) {
    json v = json::array();
    for (char c : valid) v.push_back(c != 0);
    out["valid"] = v;
  }
  return out;
}

// ---------------------------------------------------------------- construction

ModulePtr trivial_module(const CartanPtr& c, const QMode& mode) {
  auto m = std::make_shared<WeightModule>();
  m->cartan = c;
  m->mode = mode;
  m->kind = ModuleKind::Trivial;
  m->name = "1";
  m->basis.push_back({"1", c->zero(), kExactMargin, -1, -1});
  for (int i = 0; i < c->rank(); ++i) {
    m->E.emplace_back(1, 1);
    m->F.emplace_back(1, 1);
  }
  m->highest_weight = c->zero();
  m->highest_index = 0;
  return m;
}

namespace {

using SVec = std::map<int, Scalar>;

void axpy(SVec& y, const Scalar& a, const SVec& x) {
  for (const auto& [k, v] : x) {
    auto it = y.find(k);
    if (it == y.end()) {
      Scalar p = a * v;
      if (!p.is_zero()) y.emplace(k, p);
    } else {
      it->second += a * v;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

std::string f_label(const CartanPtr& c, int i, const std::string& rest) {
  std::string g = c->rank() == 1 ? "F" : "F" + std::to_string(i + 1);
  return g + " " + rest;
}

// Highest-weight module built as F-words modulo the radical of the
// contravariant form, height by height.
ModulePtr build_highest_weight(const Weight& lambda, int H, bool finite, const QMode& mode) {
  const CartanPtr& c = lambda.cartan();
  int r = c->rank();
  std::vector<BasisVector> basis;
  std::vector<std::vector<SVec>> e(static_cast<std::size_t>(r)), f(static_cast<std::size_t>(r));
  std::map<Weight, std::vector<int>> space;
  std::map<Weight, std::vector<std::vector<Scalar>>> gram;
  std::vector<int> pos;  // position of a basis vector inside its weight space
  std::vector<int> height;

  auto add_vector = [&](BasisVector b, int h) {
    int idx = static_cast<int>(basis.size());
    auto& sp = space[b.weight];
    pos.push_back(static_cast<int>(sp.size()));
    sp.push_back(idx);
    height.push_back(h);
    basis.push_back(std::move(b));
    for (int i = 0; i < r; ++i) {
      e[static_cast<std::size_t>(i)].emplace_back();
      f[static_cast<std::size_t>(i)].emplace_back();
    }
    return idx;
  };

  add_vector({"m", lambda, kExactMargin, -1, -1}, 0);
  gram[lambda] = {{Scalar(1)}};
  std::vector<int> prev{0};
  bool terminated = false;

  auto qint_at = [&](const Weight& w, int i) {
    return Scalar::lift(q_int(w.coroot(i), Frac(c->d(i))), mode);
  };

  for (int h = 1; h <= H; ++h) {
    struct Cand {
      int gen;
      int parent;
    };
    std::map<Weight, std::vector<Cand>> groups;
    for (int b : prev)
      for (int i = 0; i < r; ++i) groups[basis[static_cast<std::size_t>(b)].weight - c->simple_root(i)].push_back({i, b});
    std::vector<int> level;
    for (auto& [nu, cands] : groups) {
      std::size_t n = cands.size();
      // y[c][i] = E_i F_{gen} parent, a vector in M[nu + α_i].
      std::vector<std::vector<SVec>> y(n, std::vector<SVec>(static_cast<std::size_t>(r)));
      for (std::size_t a = 0; a < n; ++a) {
        int j = cands[a].gen, b2 = cands[a].parent;
        for (int i = 0; i < r; ++i) {
          SVec& out = y[a][static_cast<std::size_t>(i)];
          for (const auto& [k, v] : e[static_cast<std::size_t>(i)][static_cast<std::size_t>(b2)])
            axpy(out, v, f[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
          if (i == j) {
            Scalar s = qint_at(basis[static_cast<std::size_t>(b2)].weight, i);
            if (!s.is_zero()) axpy(out, s, SVec{{b2, Scalar(1)}});
          }
        }
      }
      std::vector<std::vector<Scalar>> G(n, std::vector<Scalar>(n));
      for (std::size_t a = 0; a < n; ++a) {
        int i = cands[a].gen, b1 = cands[a].parent;
        const auto& g = gram[basis[static_cast<std::size_t>(b1)].weight];
        const auto& row = g[static_cast<std::size_t>(pos[static_cast<std::size_t>(b1)])];
        for (std::size_t b = 0; b < n; ++b) {
          Scalar s;
          for (const auto& [k, v] : y[b][static_cast<std::size_t>(i)])
            s += row[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])] * v;
          G[a][b] = s;
        }
      }
      std::vector<int> piv = rref(G, static_cast<int>(n)).pivots;
      if (piv.empty()) continue;
      std::size_t m = piv.size();
      std::vector<int> idx;
      for (int p : piv) {
        const Cand& cd = cands[static_cast<std::size_t>(p)];
        BasisVector bv{f_label(c, cd.gen, basis[static_cast<std::size_t>(cd.parent)].label), nu, kExactMargin,
                       cd.parent, cd.gen};
        int k = add_vector(std::move(bv), h);
        idx.push_back(k);
        level.push_back(k);
        for (int i = 0; i < r; ++i)
          e[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)];
      }
      Matrix GBB(static_cast<int>(m), static_cast<int>(m)), GB(static_cast<int>(m), static_cast<int>(n));
      std::vector<std::vector<Scalar>> gbb(m, std::vector<Scalar>(m));
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          gbb[a][b] = G[static_cast<std::size_t>(piv[a])][static_cast<std::size_t>(piv[b])];
          GBB.set(static_cast<int>(a), static_cast<int>(b), gbb[a][b]);
        }
        for (std::size_t b = 0; b < n; ++b)
          GB.set(static_cast<int>(a), static_cast<int>(b), G[static_cast<std::size_t>(piv[a])][b]);
      }
      SolveResult sol = solve(GBB, GB);
      if (!sol.unique || !sol.consistent) fail(ErrorCode::Singular, "Gram block not invertible");
      for (std::size_t b = 0; b < n; ++b) {
        SVec coords;
        for (std::size_t a = 0; a < m; ++a) {
          Scalar v = sol.x.get(static_cast<int>(a), static_cast<int>(b));
          if (!v.is_zero()) coords.emplace(idx[a], v);
        }
        f[static_cast<std::size_t>(cands[b].gen)][static_cast<std::size_t>(cands[b].parent)] = std::move(coords);
      }
      gram[nu] = std::move(gbb);
    }
    if (level.empty()) {
      terminated = true;
      break;
    }
    prev = std::move(level);
  }
  if (finite && !terminated) fail(ErrorCode::InfiniteDimensional, "highest-weight quotient did not terminate");

  auto mod = std::make_shared<WeightModule>();
  mod->cartan = c;
  mod->mode = mode;
  int n = static_cast<int>(basis.size());
  for (int i = 0; i < r; ++i) {
    Matrix Em(n, n), Fm(n, n);
    for (int b = 0; b < n; ++b) {
      for (const auto& [k, v] : e[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]) Em.set(k, b, v);
      for (const auto& [k, v] : f[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]) Fm.set(k, b, v);
    }
    mod->E.push_back(std::move(Em));
    mod->F.push_back(std::move(Fm));
  }
  if (!finite)
    for (int b = 0; b < n; ++b) basis[static_cast<std::size_t>(b)].margin = H - height[static_cast<std::size_t>(b)];
  mod->basis = std::move(basis);
  mod->highest_weight = lambda;
  mod->highest_index = 0;
  return mod;
}

}  // namespace

ModulePtr verma(const Weight& lambda, int H, const QMode& mode) {
  if (H < 0) fail(ErrorCode::InvalidArgument, "truncation height must be >= 0");
  auto m = std::const_pointer_cast<WeightModule>(build_highest_weight(lambda, H, false, mode));
  m->kind = ModuleKind::Verma;
  m->truncation = H;
  m->name = "M" + lambda.str() + ":" + std::to_string(H);
  if (!lambda.cartan()->is_verma_irreducible(lambda))
    m->warnings.push_back("NotGeneric: Verma module at " + lambda.str() + " is reducible");
  return m;
}

ModulePtr simple_fd(const Weight& lambda, const QMode& mode) {
  const CartanPtr& c = lambda.cartan();
  if (!c->is_dominant_integral(lambda))
    fail(ErrorCode::NotDominantIntegral, "highest weight " + lambda.str() + " is not dominant integral");
  Frac ht = c->height(lambda);
  int bound = static_cast<int>((Frac(2) * ht).floor()) + 2;
  auto m = std::const_pointer_cast<WeightModule>(build_highest_weight(lambda, bound, true, mode));
  m->kind = lambda.is_zero() ? ModuleKind::Trivial : ModuleKind::Simple;
  m->name = lambda.is_zero() ? "1" : "L" + lambda.str();
  if (lambda.is_zero()) m->basis[0].label = "1";
  return m;
}

ModulePtr tensor(const ModulePtr& m, const ModulePtr& n) {
  if (m->cartan->matrix() != n->cartan->matrix()) fail(ErrorCode::RankMismatch, "tensor over different Cartan data");
  auto t = std::make_shared<WeightModule>();
  t->cartan = m->cartan;
  t->mode = m->mode.exact ? n->mode : m->mode;
  t->kind = ModuleKind::Tensor;
  t->name = m->name + "⊗" + n->name;
  t->left = m;
  t->right = n;
  t->basis.reserve(static_cast<std::size_t>(m->dim() * n->dim()));
  for (const auto& a : m->basis)
    for (const auto& b : n->basis)
      t->basis.push_back({a.label + "⊗" + b.label, a.weight + b.weight, std::min(a.margin, b.margin), -1, -1});
  Matrix Im = Matrix::identity(m->dim()), In = Matrix::identity(n->dim());
  for (int i = 0; i < m->rank(); ++i) {
    t->E.push_back(kron(m->E[static_cast<std::size_t>(i)], n->K(i)) + kron(Im, n->E[static_cast<std::size_t>(i)]));
    t->F.push_back(kron(m->F[static_cast<std::size_t>(i)], In) + kron(m->K(i, -1), n->F[static_cast<std::size_t>(i)]));
  }
  return t;
}

ModulePtr tensor_all(const std::vector<ModulePtr>& ms, const CartanPtr& c, const QMode& mode) {
  if (ms.empty()) return trivial_module(c, mode);
  ModulePtr t = ms[0];
  for (std::size_t k = 1; k < ms.size(); ++k) t = tensor(t, ms[k]);
  return t;
}

ModulePtr restricted_dual(const ModulePtr& v) {
  if (!v->is_finite()) fail(ErrorCode::InfiniteDimensional, "restricted dual of a truncated module");
  auto d = std::make_shared<WeightModule>();
  d->cartan = v->cartan;
  d->mode = v->mode;
  d->kind = v->kind == ModuleKind::Trivial ? ModuleKind::Trivial : ModuleKind::Dual;
  d->name = v->kind == ModuleKind::Trivial ? v->name : v->name + "*";
  d->left = v;
  for (const auto& b : v->basis) d->basis.push_back({b.label + "*", -b.weight, kExactMargin, -1, -1});
  for (int i = 0; i < v->rank(); ++i) {
    const Matrix& E = v->E[static_cast<std::size_t>(i)];
    const Matrix& F = v->F[static_cast<std::size_t>(i)];
    d->E.push_back((-(E * v->K(i, -1))).transpose());
    d->F.push_back((-(v->K(i) * F)).transpose());
  }
  return d;
}

ModulePtr module_from_json(const json& j, const QMode& mode) {
  CartanPtr c = CartanData::from_json(j.at("cartan"));
  auto m = std::make_shared<WeightModule>();
  m->cartan = c;
  m->mode = mode;
  m->kind = ModuleKind::Custom;
  m->name = j.value("name", std::string("custom"));
  for (const auto& b : j.at("basis")) {
    BasisVector v{b.value("label", std::string()), Weight::from_json(c, b.at("weight")), b.value("margin", kExactMargin),
                  -1, -1};
    m->basis.push_back(std::move(v));
  }
  for (const auto& e : j.at("E")) m->E.push_back(Matrix::from_json(e, mode));
  for (const auto& f : j.at("F")) m->F.push_back(Matrix::from_json(f, mode));
  if (static_cast<int>(m->E.size()) != c->rank() || static_cast<int>(m->F.size()) != c->rank())
    fail(ErrorCode::ParseError, "module needs one E and one F matrix per simple root");
  for (int i = 0; i < c->rank(); ++i)
    if (m->E[static_cast<std::size_t>(i)].rows() != m->dim() || m->F[static_cast<std::size_t>(i)].rows() != m->dim() ||
        m->E[static_cast<std::size_t>(i)].cols() != m->dim() || m->F[static_cast<std::size_t>(i)].cols() != m->dim())
      fail(ErrorCode::ParseError, "generator matrix size does not match the basis");
  return m;
}

ModulePtr module_from_spec(const CartanPtr& c, const std::string& spec_in, const QMode& mode) {
  std::string spec = spec_in;
  bool dual = false;
  if (!spec.empty() && spec.back() == '*') {
    dual = true;
    spec.pop_back();
  }
  ModulePtr m;
  if (spec == "1") {
    m = trivial_module(c, mode);
  } else if (spec.size() > 3 && (spec[0] == 'L' || spec[0] == 'M') && spec[1] == '(') {
    auto close = spec.find(')');
    if (close == std::string::npos) fail(ErrorCode::ParseError, "module spec '" + spec_in + "'");
    std::string inner = spec.substr(2, close - 2);
    std::vector<Frac> coords;
    std::size_t start = 0;
    while (start <= inner.size()) {
      auto comma = inner.find(',', start);
      std::string part = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      coords.push_back(Frac::parse(part));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    Weight w = Weight::from_fund(c, coords);
    if (spec[0] == 'L') {
      m = simple_fd(w, mode);
    } else {
      int H = 4;
      if (close + 1 < spec.size()) {
        if (spec[close + 1] != ':') fail(ErrorCode::ParseError, "module spec '" + spec_in + "'");
        H = static_cast<int>(Frac::parse(spec.substr(close + 2)).num());
      }
      m = verma(w, H, mode);
    }
  } else {
    fail(ErrorCode::ParseError, "module spec '" + spec_in + "' (expected 1, L(..), M(..):H)");
  }
  return dual ? restricted_dual(m) : m;
}

// ---------------------------------------------------------------- maps

std::vector<char> compose_valid(const Matrix& b, const std::vector<char>& va, const std::vector<char>& vb) {
  if (va.empty() && vb.empty()) return {};
  std::vector<char> r = vb.empty() ? std::vector<char>(static_cast<std::size_t>(b.cols()), 1) : vb;
  if (!va.empty())
    for (int k = 0; k < b.rows(); ++k)
      if (!va[static_cast<std::size_t>(k)])
        for (const auto& [j, v] : b.row(k)) r[static_cast<std::size_t>(j)] = 0;
  if (std::all_of(r.begin(), r.end(), [](char c) { return c != 0; })) return {};
  return r;
}

GradedMap identity_map(const ModulePtr& m) {
  return GradedMap{m, m, Matrix::identity(m->dim()), m->cartan->zero(), {}};
}

GradedMap make_map(const ModulePtr& src, const ModulePtr& tgt, Matrix mat, const Weight& degree) {
  if (mat.rows() != tgt->dim() || mat.cols() != src->dim())
    fail(ErrorCode::ShapeMismatch, "map matrix " + std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()) +
                                       " does not fit " + src->name + " -> " + tgt->name);
  return GradedMap{src, tgt, std::move(mat), degree, {}};
}

GradedMap compose(const GradedMap& a, const GradedMap& b) {
  if (a.mat.cols() != b.mat.rows())
    fail(ErrorCode::ShapeMismatch, "cannot compose " + (a.source ? a.source->name : std::string("?")) + " with target " +
                                       (b.target ? b.target->name : std::string("?")));
  GradedMap r;
  r.source = b.source;
  r.target = a.target;
  r.mat = a.mat * b.mat;
  r.degree = a.degree + b.degree;
  r.valid = compose_valid(b.mat, a.valid, b.valid);
  return r;
}

namespace {

std::vector<char> kron_valid(const std::vector<char>& va, int na, const std::vector<char>& vb, int nb) {
  if (va.empty() && vb.empty()) return {};
  std::vector<char> r(static_cast<std::size_t>(na * nb));
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      r[static_cast<std::size_t>(i * nb + j)] =
          (va.empty() || va[static_cast<std::size_t>(i)]) && (vb.empty() || vb[static_cast<std::size_t>(j)]);
  return r;
}

}  // namespace

GradedMap tensor_maps(const GradedMap& a, const GradedMap& b, const ModulePtr& src, const ModulePtr& tgt) {
  GradedMap r;
  r.source = src;
  r.target = tgt;
  r.mat = kron(a.mat, b.mat);
  r.degree = a.degree + b.degree;
  r.valid = kron_valid(a.valid, a.mat.cols(), b.valid, b.mat.cols());
  return r;
}

GradedMap tensor_maps(const GradedMap& a, const GradedMap& b) {
  ModulePtr src = tensor(a.source, b.source);
  ModulePtr tgt = tensor(a.target, b.target);
  return tensor_maps(a, b, src, tgt);
}

GradedMap add_maps(const GradedMap& a, const GradedMap& b) {
  GradedMap r = a;
  r.mat = a.mat + b.mat;
  if (!b.valid.empty()) {
    if (r.valid.empty()) r.valid = b.valid;
    else
      for (std::size_t j = 0; j < r.valid.size(); ++j) r.valid[j] = r.valid[j] && b.valid[j];
  }
  return r;
}

GradedMap scale_map(const GradedMap& a, const Scalar& s) {
  GradedMap r = a;
  r.mat = a.mat.scaled(s);
  return r;
}

CompareResult compare_maps(const GradedMap& a, const GradedMap& b) {
  std::vector<char> mask;
  if (!a.valid.empty() || !b.valid.empty()) {
    mask.assign(static_cast<std::size_t>(a.mat.cols()), 1);
    for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = a.is_valid(static_cast<int>(j)) && b.is_valid(static_cast<int>(j));
  }
  const QMode& mode = a.source ? a.source->mode : QMode::Exact();
  return compare(a.mat, b.mat, mask, mode.exact ? 0.0 : mode.tol);
}

GradedMap e_map(const ModulePtr& m, int i) {
  return GradedMap{m, m, m->E[static_cast<std::size_t>(i)], m->cartan->simple_root(i), {}};
}

GradedMap f_map(const ModulePtr& m, int i) {
  return GradedMap{m, m, m->F[static_cast<std::size_t>(i)], -m->cartan->simple_root(i), m->f_valid()};
}

// ---------------------------------------------------------------- checks

bool ModuleReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.pass; });
}

json ModuleReport::to_json() const {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"relation", c.relation},
                 {"pass", c.pass},
                 {"max_residual", c.max_residual},
                 {"compared", c.compared},
                 {"untestable", c.untestable},
                 {"witness", c.witness}});
  return json{{"pass", pass()}, {"checks", a}};
}

namespace {

RelationCheck from_compare(const std::string& name, const CompareResult& r) {
  RelationCheck c;
  c.relation = name;
  c.pass = r.pass;
  c.max_residual = r.max_residual;
  c.compared = r.compared_columns;
  c.untestable = r.skipped_columns;
  if (!r.pass)
    c.witness = "entry (" + std::to_string(r.row) + "," + std::to_string(r.col) + "): " + r.lhs + " vs " + r.rhs;
  return c;
}

}  // namespace

ModuleReport check_module(const WeightModule& m_in) {
  ModuleReport rep;
  auto m = std::make_shared<WeightModule>(m_in);
  const CartanPtr& c = m->cartan;
  int r = c->rank();
  int n = m->dim();
  Weight zero = c->zero();

  // Weight ladder.
  {
    RelationCheck ladder;
    ladder.relation = "weight ladder";
    for (int i = 0; i < r && ladder.pass; ++i) {
      Weight a = c->simple_root(i);
      for (int row = 0; row < n && ladder.pass; ++row) {
        for (const auto& [col, v] : m->E[static_cast<std::size_t>(i)].row(row))
          if (!(m->weight(row) - m->weight(col) == a)) {
            ladder.pass = false;
            ladder.witness = "E" + std::to_string(i + 1) + " entry (" + std::to_string(row) + "," + std::to_string(col) + ")";
            break;
          }
        for (const auto& [col, v] : m->F[static_cast<std::size_t>(i)].row(row))
          if (!(m->weight(col) - m->weight(row) == a) && ladder.pass) {
            ladder.pass = false;
            ladder.witness = "F" + std::to_string(i + 1) + " entry (" + std::to_string(row) + "," + std::to_string(col) + ")";
            break;
          }
      }
    }
    ladder.compared = n;
    rep.checks.push_back(ladder);
  }

  // q^h commutation: K_j X_i K_j^{-1} = q^{±⟨α_i,α_j⟩} X_i.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Frac p = c->pairing(c->simple_root(i), c->simple_root(j));
      GradedMap Ei = e_map(m, i), Fi = f_map(m, i);
      GradedMap Kj{m, m, m->K(j), zero, {}}, Kjinv{m, m, m->K(j, -1), zero, {}};
      auto lhsE = compose(Kj, compose(Ei, Kjinv));
      auto rhsE = scale_map(Ei, Scalar::q_pow(p, m->mode));
      rep.checks.push_back(from_compare("K" + std::to_string(j + 1) + " E" + std::to_string(i + 1) + " K^-1", compare_maps(lhsE, rhsE)));
      auto lhsF = compose(Kj, compose(Fi, Kjinv));
      auto rhsF = scale_map(Fi, Scalar::q_pow(-p, m->mode));
      rep.checks.push_back(from_compare("K" + std::to_string(j + 1) + " F" + std::to_string(i + 1) + " K^-1", compare_maps(lhsF, rhsF)));
    }

  // [E_i, F_j] = δ_ij [h_i]_{q_i}.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      GradedMap Ei = e_map(m, i), Fj = f_map(m, j);
      GradedMap lhs = add_maps(compose(Ei, Fj), scale_map(compose(Fj, Ei), Scalar(-1)));
      Matrix rhs_m(n, n);
      if (i == j)
        for (int b = 0; b < n; ++b)
          rhs_m.set(b, b, Scalar::lift(q_int(m->weight(b).coroot(i), Frac(c->d(i))), m->mode));
      GradedMap rhs{m, m, rhs_m, lhs.degree, {}};
      rep.checks.push_back(from_compare("[E" + std::to_string(i + 1) + ",F" + std::to_string(j + 1) + "]", compare_maps(lhs, rhs)));
    }

  // Serre relations.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (i == j) continue;
      int deg = 1 - c->a(i, j);
      for (int which = 0; which < 2; ++which) {
        GradedMap Xi = which == 0 ? e_map(m, i) : f_map(m, i);
        GradedMap Xj = which == 0 ? e_map(m, j) : f_map(m, j);
        std::vector<GradedMap> pw{identity_map(m)};
        for (int k = 1; k <= deg; ++k) pw.push_back(compose(Xi, pw.back()));
        GradedMap sum;
        bool first = true;
        for (int k = 0; k <= deg; ++k) {
          Scalar coeff = Scalar::lift(q_binomial(deg, k, Frac(c->d(i))), m->mode);
          if (k % 2) coeff = -coeff;
          GradedMap term = scale_map(compose(pw[static_cast<std::size_t>(deg - k)], compose(Xj, pw[static_cast<std::size_t>(k)])), coeff);
          if (first) {
            sum = term;
            first = false;
          } else {
            sum = add_maps(sum, term);
          }
        }
        GradedMap zero_map{m, m, Matrix(n, n), sum.degree, {}};
        std::string name = std::string("Serre ") + (which == 0 ? "E" : "F") + std::to_string(i + 1) + "," + std::to_string(j + 1);
        rep.checks.push_back(from_compare(name, compare_maps(sum, zero_map)));
      }
    }
  return rep;
}

}  // namespace qvo
