#include "qvo/vertexops.hpp"

#include <chrono>
#include <map>
#include <mutex>

#include "qvo/duality.hpp"
#include "qvo/rmatrix.hpp"

namespace qvo {

using json = nlohmann::json;

// ---------------------------------------------------------------- helpers

ModulePtr cached_verma(const Weight& lambda, int H, const QMode& mode) {
  static std::mutex mu;
  static std::map<std::string, ModulePtr> cache;
  json key{lambda.cartan()->to_json(), lambda.to_json(), H, mode.exact, mode.q0};
  std::string k = key.dump();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
  }
  ModulePtr m = verma(lambda, H, mode);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(k, m).first->second;
}

Vec unit_vector(int dim, int index) {
  if (index < 0 || index >= dim) fail(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(index));
  Vec v(static_cast<std::size_t>(dim));
  v[static_cast<std::size_t>(index)] = Scalar(1);
  return v;
}

Weight vector_weight(const ModulePtr& v, const Vec& x) {
  if (static_cast<int>(x.size()) != v->dim()) fail(ErrorCode::ShapeMismatch, "vector does not fit " + v->name);
  std::optional<Weight> w;
  for (int b = 0; b < v->dim(); ++b) {
    if (x[static_cast<std::size_t>(b)].is_zero()) continue;
    if (!w) w = v->weight(b);
    else if (!(*w == v->weight(b))) fail(ErrorCode::InvalidArgument, "vector is not a weight vector of " + v->name);
  }
  if (!w) fail(ErrorCode::InvalidArgument, "zero vector has no weight");
  return *w;
}

namespace {

using Clock = std::chrono::steady_clock;
using SVec = std::map<int, Scalar>;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int total_dim(const std::vector<ModulePtr>& ms) {
  int d = 1;
  for (const auto& m : ms) d *= m->dim();
  return d;
}

std::vector<int> split_index(const std::vector<ModulePtr>& ms, int t) {
  std::vector<int> out(ms.size());
  for (int k = static_cast<int>(ms.size()) - 1; k >= 0; --k) {
    int d = ms[static_cast<std::size_t>(k)]->dim();
    out[static_cast<std::size_t>(k)] = t % d;
    t /= d;
  }
  return out;
}

void require_generic(const Weight& w, const std::string& what) {
  if (!w.cartan()->is_generic(w)) fail(ErrorCode::NotGeneric, what + " = " + w.str() + " is not generic");
}

// Expands a per-column mask of A to kron(A, I_n).
std::vector<char> kron_mask_left(const std::vector<char>& va, int n) {
  if (va.empty()) return {};
  std::vector<char> r(va.size() * static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < va.size(); ++a)
    for (int j = 0; j < n; ++j) r[a * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = va[a];
  return r;
}

// Expands a per-column mask of A to kron(I_n, A).
std::vector<char> kron_mask_right(const std::vector<char>& va, int n) {
  if (va.empty()) return {};
  std::vector<char> r(va.size() * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (std::size_t a = 0; a < va.size(); ++a) r[static_cast<std::size_t>(j) * va.size() + a] = va[a];
  return r;
}

// Builds one-point operators and shares them across k-point assemblies.
class Builder {
 public:
  const GradedMap& one_point(const ModulePtr& src, const ModulePtr& tgt_verma, const ModulePtr& v, const Vec& vec) {
    json key{src->name, tgt_verma->name, reinterpret_cast<std::uintptr_t>(v.get()), json::array()};
    for (const auto& s : vec) key[3].push_back(s.to_json());
    std::string k = key.dump();
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(k, build(src, tgt_verma, v, vec)).first->second;
  }

 private:
  ModulePtr tensor_of(const ModulePtr& a, const ModulePtr& b) {
    auto key = std::make_pair(a.get(), b.get());
    auto it = tensors_.find(key);
    if (it != tensors_.end()) return it->second.first;
    ModulePtr t = tensor(a, b);
    std::vector<Matrix> ft;
    for (const auto& f : t->F) ft.push_back(f.transpose());
    tensors_.emplace(key, std::make_pair(t, std::move(ft)));
    return t;
  }

  GradedMap build(const ModulePtr& src, const ModulePtr& tgt_verma, const ModulePtr& v, const Vec& vec) {
    const CartanPtr& c = src->cartan;
    Weight lambda = *src->highest_weight;
    Weight nu = vector_weight(v, vec);
    Weight mu = lambda - nu;
    if (!(*tgt_verma->highest_weight == mu))
      fail(ErrorCode::InvalidArgument, "target Verma " + tgt_verma->name + " does not have highest weight " + mu.str());
    int need = 0;
    for (const auto& b : v->basis) {
      Frac h = c->height(b.weight - nu);
      if (h.is_integer()) need = std::max(need, static_cast<int>(h.num()));
    }
    if (tgt_verma->truncation < need)
      fail(ErrorCode::TruncationTooSmall, "target " + tgt_verma->name + " needs depth " + std::to_string(need));
    ModulePtr t = tensor_of(tgt_verma, v);
    const auto& ft = tensors_.at({tgt_verma.get(), v.get()}).second;
    int dv = v->dim();
    std::vector<int> lead, unknown;
    for (int idx = 0; idx < t->dim(); ++idx) {
      if (!(t->weight(idx) == lambda)) continue;
      (idx / dv == 0 ? lead : unknown).push_back(idx);
    }
    SVec x;
    for (int b = 0; b < dv; ++b)
      if (!vec[static_cast<std::size_t>(b)].is_zero()) x[b] = vec[static_cast<std::size_t>(b)];
    if (!unknown.empty()) {
      std::vector<int> rows;
      for (int i = 0; i < c->rank(); ++i) {
        Weight up = lambda + c->simple_root(i);
        for (int idx = 0; idx < t->dim(); ++idx)
          if (t->weight(idx) == up) rows.push_back(i * t->dim() + idx);
      }
      int nr = static_cast<int>(rows.size());
      Matrix A(nr, static_cast<int>(unknown.size())), rhs(nr, 1);
      for (int r = 0; r < nr; ++r) {
        int i = rows[static_cast<std::size_t>(r)] / t->dim(), row = rows[static_cast<std::size_t>(r)] % t->dim();
        const Matrix& E = t->E[static_cast<std::size_t>(i)];
        for (std::size_t u = 0; u < unknown.size(); ++u) {
          Scalar e = E.get(row, unknown[u]);
          if (!e.is_zero()) A.set(r, static_cast<int>(u), e);
        }
        Scalar s;
        for (const auto& [col, val] : x) s += E.get(row, col) * val;
        if (!s.is_zero()) rhs.set(r, 0, -s);
      }
      SolveResult sol = solve(A, rhs);
      if (!sol.consistent) fail(ErrorCode::Inconsistent, "no singular vector with leading term in " + v->name + " at λ = " + lambda.str());
      if (!sol.unique) fail(ErrorCode::NonUniqueSolution, "singular vector not unique at λ = " + lambda.str());
      for (std::size_t u = 0; u < unknown.size(); ++u) {
        Scalar y = sol.x.get(static_cast<int>(u), 0);
        if (!y.is_zero()) x[unknown[u]] = y;
      }
    }
    std::vector<char> fv = t->f_valid();
    int n = src->dim();
    std::vector<SVec> img(static_cast<std::size_t>(n));
    std::vector<char> valid(static_cast<std::size_t>(n), 1);
    img[0] = x;
    for (int b = 1; b < n; ++b) {
      const BasisVector& bv = src->basis[static_cast<std::size_t>(b)];
      const SVec& prev = img[static_cast<std::size_t>(bv.parent)];
      bool ok = valid[static_cast<std::size_t>(bv.parent)] != 0;
      SVec out;
      for (const auto& [k, val] : prev) {
        if (!fv.empty() && !fv[static_cast<std::size_t>(k)]) ok = false;
        for (const auto& [r, f] : ft[static_cast<std::size_t>(bv.parent_gen)].row(k)) {
          auto it = out.find(r);
          if (it == out.end()) out.emplace(r, val * f);
          else it->second += val * f;
        }
      }
      for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
      img[static_cast<std::size_t>(b)] = std::move(out);
      valid[static_cast<std::size_t>(b)] = ok;
    }
    Matrix mat(t->dim(), n);
    for (int b = 0; b < n; ++b)
      for (const auto& [r, val] : img[static_cast<std::size_t>(b)]) mat.set(r, b, val);
    GradedMap g{src, t, std::move(mat), c->zero(), {}};
    if (std::any_of(valid.begin(), valid.end(), [](char ch) { return ch == 0; })) g.valid = valid;
    return g;
  }

  std::map<std::string, GradedMap> memo_;
  std::map<std::pair<const WeightModule*, const WeightModule*>, std::pair<ModulePtr, std::vector<Matrix>>> tensors_;
};

VertexOp assemble(Builder& bld, const Weight& lambda, const std::vector<ModulePtr>& spins, const std::vector<Vec>& vecs,
                  int H, int extra, bool build_target) {
  const CartanPtr& c = lambda.cartan();
  std::size_t k = spins.size();
  if (vecs.size() != k) fail(ErrorCode::ArityError, "expected " + std::to_string(k) + " vectors");
  QMode mode = spins.empty() ? QMode::Exact() : spins[0]->mode;
  std::vector<Weight> lam(k + 1);
  std::vector<int> depth(k + 1);
  lam[k] = lambda;
  depth[k] = H;
  for (std::size_t j = k; j >= 1; --j) {
    lam[j - 1] = lam[j] - vector_weight(spins[j - 1], vecs[j - 1]);
    depth[j - 1] = depth[j] + height_span(*spins[j - 1]) + (j == 1 ? extra : 0);
  }
  for (std::size_t j = 0; j <= k; ++j) require_generic(lam[j], "λ_" + std::to_string(j));
  std::vector<ModulePtr> vermas(k + 1);
  for (std::size_t j = 0; j <= k; ++j) vermas[j] = cached_verma(lam[j], depth[j], mode);

  VertexOp op;
  op.lambda = lambda;
  op.mu = lam[0];
  op.spins = spins;
  op.source = vermas[k];
  op.target_verma = vermas[0];
  if (k == 0) {
    op.map = identity_map(op.source);
    op.expectation = {Scalar(1)};
    return op;
  }
  const GradedMap& last = bld.one_point(vermas[k], vermas[k - 1], spins[k - 1], vecs[k - 1]);
  Matrix cur = last.mat;
  std::vector<char> cur_valid = last.valid;
  int rest = spins[k - 1]->dim();
  for (std::size_t j = k - 1; j >= 1; --j) {
    const GradedMap& phi = bld.one_point(vermas[j], vermas[j - 1], spins[j - 1], vecs[j - 1]);
    Matrix a = kron(phi.mat, Matrix::identity(rest));
    cur_valid = compose_valid(cur, kron_mask_left(phi.valid, rest), cur_valid);
    cur = a * cur;
    rest *= spins[j - 1]->dim();
  }
  ModulePtr target;
  if (build_target) {
    std::vector<ModulePtr> legs{vermas[0]};
    legs.insert(legs.end(), spins.begin(), spins.end());
    target = tensor_all(legs, c, mode);
  }
  op.expectation.assign(static_cast<std::size_t>(rest), Scalar());
  for (int s = 0; s < rest; ++s) op.expectation[static_cast<std::size_t>(s)] = cur.get(s, 0);
  op.map = GradedMap{op.source, target, std::move(cur), c->zero(), std::move(cur_valid)};
  return op;
}

}  // namespace

VertexOp vertex_from_ev(const Weight& lambda, const ModulePtr& v, const Vec& vec, int H, int extra) {
  Builder bld;
  return assemble(bld, lambda, {v}, {vec}, H, extra, true);
}

Vec expectation_value(const VertexOp& op) { return op.expectation; }

VertexOp k_point(const Weight& lambda, const std::vector<ModulePtr>& spins, const std::vector<Vec>& vecs, int H,
                 int extra) {
  Builder bld;
  return assemble(bld, lambda, spins, vecs, H, extra, true);
}

GradedMap fusion_operator(const Weight& lambda, const std::vector<ModulePtr>& spins) {
  const CartanPtr& c = lambda.cartan();
  QMode mode = spins.empty() ? QMode::Exact() : spins[0]->mode;
  ModulePtr full = tensor_all(spins, c, mode);
  int n = full->dim();
  Matrix j(n, n);
  Builder bld;
  for (int t = 0; t < n; ++t) {
    std::vector<int> idx = split_index(spins, t);
    std::vector<Vec> vecs;
    for (std::size_t l = 0; l < spins.size(); ++l) vecs.push_back(unit_vector(spins[l]->dim(), idx[l]));
    VertexOp op = assemble(bld, lambda, spins, vecs, 0, 0, false);
    for (int r = 0; r < n; ++r)
      if (!op.expectation[static_cast<std::size_t>(r)].is_zero()) j.set(r, t, op.expectation[static_cast<std::size_t>(r)]);
  }
  return GradedMap{full, full, std::move(j), c->zero(), {}};
}

GradedMap shifted_fusion(const Weight& lambda, const std::vector<ModulePtr>& spins) {
  if (spins.empty()) fail(ErrorCode::ArityError, "shifted fusion needs at least one module");
  const CartanPtr& c = lambda.cartan();
  ModulePtr full = tensor_all(spins, c, spins[0]->mode);
  const ModulePtr& vk = spins.back();
  std::vector<ModulePtr> head(spins.begin(), spins.end() - 1);
  int dk = vk->dim();
  int n = full->dim();
  Matrix out(n, n);
  for (const auto& [nu, idx] : vk->weight_spaces()) {
    GradedMap jh = fusion_operator(lambda - nu, head);
    for (int r = 0; r < jh.mat.rows(); ++r)
      for (const auto& [col, v] : jh.mat.row(r))
        for (int b : idx) out.set(r * dk + b, col * dk + b, v);
  }
  return GradedMap{full, full, std::move(out), c->zero(), {}};
}

GradedMap q2theta(const Weight& lambda, const ModulePtr& v) {
  const CartanPtr& c = v->cartan;
  Weight shift = Frac(2) * (lambda + c->rho());
  GradedMap g = identity_map(v);
  g.mat = v->q_diag([&](const Weight& mu) { return c->pairing(shift - mu, mu); });
  return g;
}

// ---------------------------------------------------------------- checks

namespace {

json spin_names(const std::vector<ModulePtr>& spins) {
  json a = json::array();
  for (const auto& s : spins) a.push_back(s->name);
  return a;
}

CheckResult begin(const std::string& id, const Weight& lambda, const std::vector<ModulePtr>& spins) {
  CheckResult r;
  r.identity = id;
  r.params = json{{"lambda", lambda.str()}, {"spins", spin_names(spins)}};
  r.mode = (spins.empty() || spins[0]->mode.exact) ? "exact" : "float";
  return r;
}

double tol_of(const std::vector<ModulePtr>& spins) {
  return (spins.empty() || spins[0]->mode.exact) ? 0.0 : spins[0]->mode.tol;
}

Matrix column_matrix(const Vec& v) {
  Matrix m(static_cast<int>(v.size()), 1);
  for (std::size_t r = 0; r < v.size(); ++r)
    if (!v[r].is_zero()) m.set(static_cast<int>(r), 0, v[r]);
  return m;
}

// Composite of maps given left to right (leftmost applied last).
GradedMap chain(const std::vector<GradedMap>& ms) {
  GradedMap r = ms.back();
  for (std::size_t k = ms.size() - 1; k-- > 0;) r = compose(ms[k], r);
  return r;
}

// Operator on legs (p, p+1) of a flattened product, embedded with identities.
GradedMap on_adjacent(const std::vector<ModulePtr>& legs, int p, const GradedMap& op) {
  int before = 1, after = 1;
  for (int k = 0; k < p; ++k) before *= legs[static_cast<std::size_t>(k)]->dim();
  for (std::size_t k = static_cast<std::size_t>(p) + 2; k < legs.size(); ++k) after *= legs[k]->dim();
  GradedMap g;
  g.mat = kron(Matrix::identity(before), kron(op.mat, Matrix::identity(after)));
  g.degree = op.degree;
  g.valid = kron_mask_right(kron_mask_left(op.valid, after), before);
  return g;
}

}  // namespace

CheckResult round_trip_check(const Weight& lambda, const ModulePtr& v, int H) {
  auto t0 = Clock::now();
  CheckResult res = begin("ev_round_trip", lambda, {v});
  for (int b = 0; b < v->dim(); ++b) {
    VertexOp op = vertex_from_ev(lambda, v, unit_vector(v->dim(), b), H);
    res.absorb(compare(column_matrix(op.expectation), column_matrix(unit_vector(v->dim(), b)), {}, tol_of({v})),
               "basis vector " + std::to_string(b));
    CheckResult it = intertwiner_check(op);
    res.max_residual = std::max(res.max_residual, it.max_residual);
    if (!it.pass) res.fail_with("intertwining: " + it.witness);
  }
  res.seconds = since(t0);
  return res;
}

CheckResult intertwiner_check(const VertexOp& op) {
  auto t0 = Clock::now();
  CheckResult res = begin("vertex_intertwines", op.lambda, op.spins);
  for (int i = 0; i < op.source->rank(); ++i) {
    res.absorb(compare_maps(compose(e_map(op.map.target, i), op.map), compose(op.map, e_map(op.source, i))),
               "E" + std::to_string(i + 1));
    res.absorb(compare_maps(compose(f_map(op.map.target, i), op.map), compose(op.map, f_map(op.source, i))),
               "F" + std::to_string(i + 1));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult kto1_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int H) {
  auto t0 = Clock::now();
  CheckResult res = begin("k_to_1", lambda, spins);
  GradedMap j = fusion_operator(lambda, spins);
  ModulePtr fs = j.source;
  for (int t = 0; t < fs->dim(); ++t) {
    std::vector<int> idx = split_index(spins, t);
    std::vector<Vec> vecs;
    for (std::size_t l = 0; l < spins.size(); ++l) vecs.push_back(unit_vector(spins[l]->dim(), idx[l]));
    VertexOp kp = k_point(lambda, spins, vecs, H);
    VertexOp one = vertex_from_ev(lambda, fs, j.mat.column(t), H);
    GradedMap a = kp.map;
    GradedMap b = one.map;
    a.target = b.target;
    res.absorb(compare_maps(a, b), "basis tensor " + std::to_string(t));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult fusion_triangular_check(const Weight& lambda, const std::vector<ModulePtr>& spins) {
  auto t0 = Clock::now();
  CheckResult res = begin("fusion_unitriangular", lambda, spins);
  GradedMap j = fusion_operator(lambda, spins);
  const CartanPtr& c = lambda.cartan();
  int n = j.mat.cols();
  std::size_t k = spins.size();
  auto tails = [&](int t) {
    std::vector<int> idx = split_index(spins, t);
    std::vector<Weight> out(k, c->zero());
    Weight acc = c->zero();
    for (std::size_t l = k; l-- > 0;) {
      out[l] = acc;  // ν_{l+1} + ··· + ν_k (0-based l)
      acc += spins[l]->weight(idx[l]);
    }
    return out;
  };
  double tol = tol_of(spins);
  for (int r = 0; r < n; ++r) {
    for (const auto& [col, v] : j.mat.row(r)) {
      if (r == col) {
        res.max_residual = std::max(res.max_residual, v.residual(Scalar(1)));
        if (!v.equals(Scalar(1), tol)) res.fail_with("diagonal entry " + std::to_string(r) + " = " + v.str());
        continue;
      }
      if (!tol_of(spins) && v.is_zero()) continue;
      if (!v.is_float() || std::abs(v.value()) > tol) {
        auto tr = tails(r), tc = tails(col);
        bool dominated = false;
        for (std::size_t l = 0; l < k; ++l) {
          Weight d = tr[l] - tc[l];
          if (!c->in_positive_cone(d)) dominated = true;
        }
        if (dominated)
          res.fail_with("entry (" + std::to_string(r) + "," + std::to_string(col) + ") breaks tail-weight order");
      }
    }
  }
  res.compared = n;
  if (rank(j.mat) != n) res.fail_with("fusion operator is singular");
  res.seconds = since(t0);
  return res;
}

CheckResult spin_functoriality_check(const Weight& lambda, const GradedMap& a, int H) {
  auto t0 = Clock::now();
  CheckResult res = begin("spin_functoriality", lambda, {a.source, a.target});
  const ModulePtr& v = a.source;
  const ModulePtr& w = a.target;
  int sv = height_span(*v), sw = height_span(*w);
  for (int b = 0; b < v->dim(); ++b) {
    Vec e = unit_vector(v->dim(), b);
    VertexOp op1 = vertex_from_ev(lambda, v, e, H, std::max(0, sw - sv));
    GradedMap lhs{op1.source, nullptr, kron(Matrix::identity(op1.target_verma->dim()), a.mat) * op1.map.mat,
                  lambda.cartan()->zero(), {}};
    lhs.valid = compose_valid(op1.map.mat, {}, op1.map.valid);
    Vec av = a.mat.apply(e);
    bool zero = std::all_of(av.begin(), av.end(), [](const Scalar& s) { return s.is_zero(); });
    if (zero) {
      GradedMap z = lhs;
      z.mat = Matrix(lhs.mat.rows(), lhs.mat.cols());
      res.absorb(compare_maps(lhs, z), "basis vector " + std::to_string(b));
      continue;
    }
    VertexOp op2 = vertex_from_ev(lambda, w, av, H, std::max(0, sv - sw));
    res.absorb(compare_maps(lhs, op2.map), "basis vector " + std::to_string(b));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult cocycle_check(const Weight& lambda, const std::vector<ModulePtr>& spins) {
  auto t0 = Clock::now();
  CheckResult res = begin("dynamical_cocycle", lambda, spins);
  std::size_t k = spins.size();
  if (k < 2) fail(ErrorCode::ArityError, "cocycle check needs at least two modules");
  const CartanPtr& c = lambda.cartan();
  QMode mode = spins[0]->mode;
  GradedMap js = fusion_operator(lambda, spins);
  // J_S(λ) = J_{(V1, F(V2..Vk))}(λ) (id⊗J_{(V2..Vk)}(λ))
  {
    std::vector<ModulePtr> tail(spins.begin() + 1, spins.end());
    ModulePtr w = tensor_all(tail, c, mode);
    GradedMap outer = fusion_operator(lambda, {spins[0], w});
    GradedMap inner = fusion_operator(lambda, tail);
    GradedMap rhs = compose(outer, tensor_maps(identity_map(spins[0]), inner, js.source, js.source));
    res.absorb(compare_maps(js, rhs), "first factorization");
  }
  // J_S(λ) = J_{(F(V1..Vk-1), Vk)}(λ) J_{(V1..Vk-1)}(λ - h_k)
  {
    std::vector<ModulePtr> head(spins.begin(), spins.end() - 1);
    ModulePtr u = tensor_all(head, c, mode);
    GradedMap outer = fusion_operator(lambda, {u, spins.back()});
    GradedMap rhs = compose(outer, shifted_fusion(lambda, spins));
    res.absorb(compare_maps(js, rhs), "second factorization");
  }
  if (k == 3) {
    // J_{(V1,V2⊗V3)}(λ)(id⊗J_{(V2,V3)}(λ)) = J_{(V1⊗V2,V3)}(λ) J_{(V1,V2)}(λ - h_3)
    ModulePtr v23 = tensor(spins[1], spins[2]);
    ModulePtr v12 = tensor(spins[0], spins[1]);
    GradedMap lhs = compose(fusion_operator(lambda, {spins[0], v23}),
                            tensor_maps(identity_map(spins[0]), fusion_operator(lambda, {spins[1], spins[2]}),
                                        js.source, js.source));
    GradedMap rhs = compose(fusion_operator(lambda, {v12, spins[2]}), shifted_fusion(lambda, spins));
    res.absorb(compare_maps(lhs, rhs), "2-cocycle");
  }
  res.seconds = since(t0);
  return res;
}

CheckResult abrr_check(const Weight& lambda, const ModulePtr& v1, const ModulePtr& v2) {
  auto t0 = Clock::now();
  CheckResult res = begin("abrr", lambda, {v1, v2});
  std::vector<ModulePtr> legs{v1, v2};
  GradedMap j = fusion_operator(lambda, legs);
  ModulePtr full = j.source;
  GradedMap th2 = embed_legs(legs, {{1, q2theta(lambda, v2)}}, full);
  GradedMap lhs = compose(j, th2);
  GradedMap rhs = chain({r_on_legs(legs, 1, 0, full), kappa_on_legs(legs, 0, 1, -1, full), th2, j});
  res.absorb(compare_maps(lhs, rhs));
  res.seconds = since(t0);
  return res;
}

CheckResult abrr_dual_check(const Weight& lambda, const ModulePtr& v1, const ModulePtr& v2) {
  auto t0 = Clock::now();
  CheckResult res = begin("abrr_dual", lambda, {v1, v2});
  std::vector<ModulePtr> legs{v1, v2};
  GradedMap j = fusion_operator(lambda, legs);
  ModulePtr full = j.source;
  GradedMap th1 = embed_legs(legs, {{0, q2theta(lambda, v1)}}, full);
  GradedMap lhs = chain({j, th1, kappa_on_legs(legs, 0, 1, -2, full)});
  GradedMap rhs = chain({th1, kappa_on_legs(legs, 0, 1, -1, full), r_inverse_on_legs(legs, 1, 0, full), j});
  res.absorb(compare_maps(lhs, rhs));
  res.seconds = since(t0);
  return res;
}

CheckResult qkz_fusion_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int i) {
  auto t0 = Clock::now();
  CheckResult res = begin("qkz_fusion", lambda, spins);
  res.params["i"] = i;
  int k = static_cast<int>(spins.size());
  if (i < 1 || i > k) fail(ErrorCode::IndexOutOfRange, "qKZ index " + std::to_string(i));
  int p = i - 1;
  const CartanPtr& c = lambda.cartan();
  GradedMap j = fusion_operator(lambda, spins);
  ModulePtr full = j.source;
  GradedMap th = embed_legs(spins, {{p, q2theta(lambda, spins[static_cast<std::size_t>(p)])}}, full);

  std::vector<GradedMap> lhs{j, th};
  for (int l = p + 1; l < k; ++l) lhs.push_back(kappa_on_legs(spins, p, l, -2, full));

  std::vector<GradedMap> a;
  for (int l = 0; l < p; ++l) a.push_back(kappa_on_legs(spins, l, p, -1, full));
  a.push_back(th);
  for (int l = p + 1; l < k; ++l) a.push_back(kappa_on_legs(spins, p, l, -1, full));
  GradedMap A = chain(a);

  std::vector<GradedMap> ops;
  for (int l = p - 1; l >= 0; --l) ops.push_back(r_on_legs(spins, p, l, full));
  ops.push_back(A);
  for (int l = k - 1; l > p; --l) ops.push_back(r_inverse_on_legs(spins, l, p, full));
  GradedMap M = chain(ops);
  res.absorb(compare_maps(chain(lhs), compose(M, j)), "operator form");

  // Expectation-value form on each basis tensor.
  double tol = tol_of(spins);
  for (int t = 0; t < full->dim(); ++t) {
    std::vector<int> idx = split_index(spins, t);
    Weight lam_i = lambda;
    for (int l = p + 1; l < k; ++l) lam_i -= spins[static_cast<std::size_t>(l)]->weight(idx[static_cast<std::size_t>(l)]);
    Weight nu_i = spins[static_cast<std::size_t>(p)]->weight(idx[static_cast<std::size_t>(p)]);
    Weight lam_prev = lam_i - nu_i;
    Scalar s = Scalar::q_pow(c->pairing(lam_i + lam_prev + Frac(2) * c->rho(), lam_i - lam_prev), full->mode);
    Matrix ev = column_matrix(j.mat.column(t));
    res.absorb(compare(ev.scaled(s), M.mat * ev, {}, tol), "expectation form, tensor " + std::to_string(t));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult operator_qkz_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int i, int H) {
  auto t0 = Clock::now();
  CheckResult res = begin("operator_qkz", lambda, spins);
  res.params["i"] = i;
  res.params["H"] = H;
  int k = static_cast<int>(spins.size());
  if (i < 1 || i > k) fail(ErrorCode::IndexOutOfRange, "qKZ index " + std::to_string(i));
  const CartanPtr& c = lambda.cartan();
  const ModulePtr& vi = spins[static_cast<std::size_t>(i - 1)];
  int n = total_dim(spins);
  for (int t = 0; t < n; ++t) {
    std::vector<int> idx = split_index(spins, t);
    std::vector<Vec> vecs;
    for (int l = 0; l < k; ++l) vecs.push_back(unit_vector(spins[static_cast<std::size_t>(l)]->dim(), idx[static_cast<std::size_t>(l)]));
    VertexOp phi = k_point(lambda, spins, vecs, H, height_span(*vi));
    ModulePtr m0 = phi.target_verma, ml = phi.source;

    Weight lam_i = lambda;
    for (int l = i; l < k; ++l) lam_i -= spins[static_cast<std::size_t>(l)]->weight(idx[static_cast<std::size_t>(l)]);
    Weight lam_prev = lam_i - spins[static_cast<std::size_t>(i - 1)]->weight(idx[static_cast<std::size_t>(i - 1)]);
    Scalar pref = Scalar::q_pow(c->pairing(lam_i + lam_prev + Frac(2) * c->rho(), lam_i - lam_prev), ml->mode);

    // Left side: move V_i to the front with inverse braidings.
    std::vector<ModulePtr> legs{m0};
    legs.insert(legs.end(), spins.begin(), spins.end());
    GradedMap lhs = phi.map;
    for (int p = i - 1; p >= 1; --p) {
      const ModulePtr& left = legs[static_cast<std::size_t>(p)];
      lhs = compose(on_adjacent(legs, p, braiding_inverse(vi, left)), lhs);
      std::swap(legs[static_cast<std::size_t>(p)], legs[static_cast<std::size_t>(p + 1)]);
    }
    lhs = scale_map(lhs, pref);

    // Right side: move V_i to the end, braid M_λ past V_i, take the quantum trace, braid V_i past M_{λ0}.
    std::vector<ModulePtr> rlegs{m0};
    rlegs.insert(rlegs.end(), spins.begin(), spins.end());
    GradedMap moved = phi.map;
    for (int p = i; p < k; ++p) {
      const ModulePtr& right = rlegs[static_cast<std::size_t>(p + 1)];
      moved = compose(on_adjacent(rlegs, p, braiding_inverse(right, vi)), moved);
      std::swap(rlegs[static_cast<std::size_t>(p)], rlegs[static_cast<std::size_t>(p + 1)]);
    }
    GradedMap cm = braiding(ml, vi);
    GradedMap psi;
    psi.source = tensor(ml, vi);
    psi.mat = kron(Matrix::identity(vi->dim()), moved.mat) * cm.mat;
    psi.degree = c->zero();
    psi.valid = compose_valid(cm.mat, kron_mask_right(moved.valid, vi->dim()), cm.valid);
    std::vector<ModulePtr> outer{vi, m0};
    for (int l = 0; l < k; ++l)
      if (l != i - 1) outer.push_back(spins[static_cast<std::size_t>(l)]);
    ModulePtr mprime = tensor_all(outer, c, ml->mode);
    GradedMap tr = partial_qtrace(psi, ml, mprime, vi);
    GradedMap cv = braiding(vi, m0);
    int rest = mprime->dim() / (vi->dim() * m0->dim());
    GradedMap front;
    front.mat = kron(cv.mat, Matrix::identity(rest));
    front.valid = kron_mask_left(cv.valid, rest);
    front.degree = c->zero();
    GradedMap rhs = compose(front, tr);
    res.absorb(compare_maps(lhs, rhs), "basis tensor " + std::to_string(t));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult three_point_ev_check(const Weight& lambda, const std::vector<ModulePtr>& s1,
                                 const std::vector<ModulePtr>& s2, const std::vector<ModulePtr>& s3) {
  std::vector<ModulePtr> all = s1;
  all.insert(all.end(), s2.begin(), s2.end());
  all.insert(all.end(), s3.begin(), s3.end());
  auto t0 = Clock::now();
  CheckResult res = begin("abrr_three_point", lambda, all);
  res.params["groups"] = {s1.size(), s2.size(), s3.size()};
  const CartanPtr& c = lambda.cartan();
  QMode mode = all.empty() ? QMode::Exact() : all[0]->mode;
  GradedMap j = fusion_operator(lambda, all);
  std::vector<ModulePtr> legs{tensor_all(s1, c, mode), tensor_all(s2, c, mode), tensor_all(s3, c, mode)};
  ModulePtr full = tensor_all(legs, c, mode);
  GradedMap r12 = r_on_legs(legs, 1, 0, full);
  GradedMap r23inv = r_inverse_on_legs(legs, 2, 1, full);
  double tol = tol_of(all);
  for (int t = 0; t < j.mat.cols(); ++t) {
    std::vector<int> idx = split_index(all, t);
    auto group_weight = [&](std::size_t from, std::size_t to) {
      Weight w = c->zero();
      for (std::size_t l = from; l < to; ++l) w += all[l]->weight(idx[l]);
      return w;
    };
    std::size_t a = s1.size(), b = a + s2.size(), e = all.size();
    Weight l3 = lambda;
    Weight l2 = l3 - group_weight(b, e);
    Weight l1 = l2 - group_weight(a, b);
    Weight l0 = l1 - group_weight(0, a);
    Scalar pref = Scalar::q_pow(c->pairing(l1 + l2 + Frac(2) * c->rho(), l2 - l1), mode);
    Weight shift = l0 + l3 + Frac(2) * c->rho();
    GradedMap d = identity_map(legs[1]);
    d.mat = legs[1]->q_diag([&](const Weight& mu) { return c->pairing(shift, mu); });
    GradedMap dm = embed_legs(legs, {{1, d}}, full);
    Matrix ev = column_matrix(j.mat.column(t));
    Matrix rhs = r12.mat * (dm.mat * (r23inv.mat * ev));
    res.absorb(compare(ev.scaled(pref), rhs, {}, tol), "basis tensor " + std::to_string(t));
  }
  res.seconds = since(t0);
  return res;
}

}  // namespace qvo
