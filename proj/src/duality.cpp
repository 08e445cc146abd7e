#include "qvo/duality.hpp"

#include <chrono>

#include "qvo/rmatrix.hpp"

namespace qvo {

using json = nlohmann::json;

namespace {

void require_finite(const ModulePtr& v, const char* what) {
  if (!v->is_finite()) fail(ErrorCode::InfiniteDimensional, std::string(what) + " needs a finite-dimensional module, got " + v->name);
}

Frac two_rho(const CartanPtr& c, const Weight& w) { return c->pairing(Frac(2) * c->rho(), w); }

}  // namespace

DualityData make_duality(const ModulePtr& v, ModulePtr dual) {
  require_finite(v, "duality");
  if (!dual) dual = restricted_dual(v);
  if (dual->dim() != v->dim()) fail(ErrorCode::ShapeMismatch, "dual has wrong dimension");
  const CartanPtr& c = v->cartan;
  ModulePtr one = trivial_module(c, v->mode);
  int n = v->dim();
  Matrix e(1, n * n), i(n * n, 1), re(1, n * n), ri(n * n, 1);
  for (int b = 0; b < n; ++b) {
    Frac s = two_rho(c, v->weight(b));
    e.set(0, b * n + b, Scalar(1));
    i.set(b * n + b, 0, Scalar(1));
    re.set(0, b * n + b, Scalar::q_pow(s, v->mode));
    ri.set(b * n + b, 0, Scalar::q_pow(-s, v->mode));
  }
  DualityData d;
  d.v = v;
  d.dual = dual;
  d.eval = make_map(tensor(dual, v), one, std::move(e), c->zero());
  d.inj = make_map(one, tensor(v, dual), std::move(i), c->zero());
  d.right_eval = make_map(tensor(v, dual), one, std::move(re), c->zero());
  d.right_inj = make_map(one, tensor(dual, v), std::move(ri), c->zero());
  return d;
}

GradedMap dual_morphism(const GradedMap& a, ModulePtr v_dual, ModulePtr w_dual) {
  const ModulePtr& v = a.source;
  const ModulePtr& w = a.target;
  require_finite(v, "dual morphism");
  require_finite(w, "dual morphism");
  DualityData dv = make_duality(v, v_dual);
  DualityData dw = make_duality(w, w_dual);
  int nv = v->dim(), nw = w->dim();
  Matrix iw = Matrix::identity(nw), iv = Matrix::identity(nv);
  // (e_W⊗id_{V*})(id_{W*}⊗A⊗id_{V*})(id_{W*}⊗ι_V)
  Matrix m = kron(dw.eval.mat, iv) * kron(kron(iw, a.mat), iv) * kron(iw, dv.inj.mat);
  return GradedMap{dw.dual, dv.dual, std::move(m), -a.degree, {}};
}

GradedMap partial_qtrace(const GradedMap& psi, const ModulePtr& m, const ModulePtr& m_prime, const ModulePtr& v) {
  require_finite(v, "quantum trace");
  int n = v->dim();
  if (psi.mat.cols() != m->dim() * n || psi.mat.rows() != m_prime->dim() * n)
    fail(ErrorCode::ShapeMismatch, "quantum trace over " + v->name + " does not fit the map");
  std::vector<Scalar> w;
  for (int b = 0; b < n; ++b) w.push_back(Scalar::q_pow(two_rho(v->cartan, v->weight(b)), v->mode));
  Matrix out(m_prime->dim(), m->dim());
  for (int r = 0; r < psi.mat.rows(); ++r) {
    int mp = r / n, b = r % n;
    for (const auto& [col, val] : psi.mat.row(r))
      if (col % n == b) out.add_to(mp, col / n, val * w[static_cast<std::size_t>(b)]);
  }
  GradedMap res{m, m_prime, std::move(out), psi.degree, {}};
  if (!psi.valid.empty()) {
    res.valid.assign(static_cast<std::size_t>(m->dim()), 1);
    for (int j = 0; j < psi.mat.cols(); ++j)
      if (!psi.is_valid(j)) res.valid[static_cast<std::size_t>(j / n)] = 0;
    if (res.all_valid()) res.valid.clear();
  }
  return res;
}

GradedMap partial_qtrace(const GradedMap& psi, const ModulePtr& v) {
  auto outer = [&](const ModulePtr& t) -> ModulePtr {
    if (t && t->kind == ModuleKind::Tensor && t->right && t->right->dim() == v->dim()) return t->left;
    fail(ErrorCode::ShapeMismatch, "quantum trace needs a map between modules of the form X⊗" + v->name);
  };
  return partial_qtrace(psi, outer(psi.source), outer(psi.target), v);
}

Scalar quantum_dimension(const ModulePtr& v) {
  require_finite(v, "quantum dimension");
  Scalar s;
  for (int b = 0; b < v->dim(); ++b) s += Scalar::q_pow(two_rho(v->cartan, v->weight(b)), v->mode);
  return s;
}

// ---------------------------------------------------------------- checks

namespace {

using Clock = std::chrono::steady_clock;

CheckResult begin(const std::string& id, const ModulePtr& m) {
  CheckResult r;
  r.identity = id;
  r.params = json{{"module", m->name}};
  r.mode = m->mode.exact ? "exact" : "float";
  return r;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

CheckResult zigzag_check(const ModulePtr& v) {
  auto t0 = Clock::now();
  CheckResult res = begin("zigzag", v);
  DualityData d = make_duality(v);
  int n = v->dim();
  Matrix iv = Matrix::identity(n);
  auto cmp = [&](const Matrix& a, const std::string& what) {
    res.absorb(compare(a, iv, {}, v->mode.exact ? 0.0 : v->mode.tol), what);
  };
  // (id_V⊗e_V)(ι_V⊗id_V) = id_V,  (e_V⊗id_{V*})(id_{V*}⊗ι_V) = id_{V*}
  cmp(kron(iv, d.eval.mat) * kron(d.inj.mat, iv), "left zigzag on V");
  cmp(kron(d.eval.mat, iv) * kron(iv, d.inj.mat), "left zigzag on V*");
  // (ẽ_V⊗id_V)(id_V⊗ι̃_V) = id_V,  (id_{V*}⊗ẽ_V)(ι̃_V⊗id_{V*}) = id_{V*}
  cmp(kron(d.right_eval.mat, iv) * kron(iv, d.right_inj.mat), "right zigzag on V");
  cmp(kron(iv, d.right_eval.mat) * kron(d.right_inj.mat, iv), "right zigzag on V*");
  res.seconds = since(t0);
  return res;
}

CheckResult right_duality_check(const ModulePtr& v) {
  auto t0 = Clock::now();
  CheckResult res = begin("right_duality_compat", v);
  DualityData d = make_duality(v);
  GradedMap rhs = compose(d.eval, compose(braiding(v, d.dual), tensor_maps(ribbon_op(v), identity_map(d.dual))));
  res.absorb(compare_maps(d.right_eval, rhs), "right eval");
  res.seconds = since(t0);
  return res;
}

CheckResult dual_functor_check(const GradedMap& a, const GradedMap& b) {
  auto t0 = Clock::now();
  CheckResult res = begin("dual_functor", a.source);
  double tol = a.source->mode.exact ? 0.0 : a.source->mode.tol;
  res.absorb(compare(dual_morphism(a).mat, a.mat.transpose(), {}, tol), "A* vs transpose");
  res.absorb(compare(dual_morphism(identity_map(a.source)).mat, Matrix::identity(a.source->dim()), {}, tol), "id*");
  GradedMap ab = compose(a, b);
  res.absorb(compare(dual_morphism(ab).mat, (dual_morphism(b).mat * dual_morphism(a).mat), {}, tol), "(AB)*");
  res.seconds = since(t0);
  return res;
}

CheckResult dual_twist_check(const ModulePtr& v) {
  auto t0 = Clock::now();
  CheckResult res = begin("dual_twist", v);
  ModulePtr vd = restricted_dual(v);
  GradedMap lhs = dual_morphism(ribbon_op(v), vd, vd);
  res.absorb(compare_maps(lhs, ribbon_op(vd)));
  res.seconds = since(t0);
  return res;
}

CheckResult qtrace_intertwiner_check(const GradedMap& psi, const ModulePtr& v) {
  auto t0 = Clock::now();
  CheckResult res = begin("qtrace_intertwiner", v);
  GradedMap t = partial_qtrace(psi, v);
  for (int i = 0; i < v->rank(); ++i) {
    res.absorb(compare_maps(compose(t, e_map(t.source, i)), compose(e_map(t.target, i), t)), "E" + std::to_string(i + 1));
    res.absorb(compare_maps(compose(t, f_map(t.source, i)), compose(f_map(t.target, i), t)), "F" + std::to_string(i + 1));
  }
  res.seconds = since(t0);
  return res;
}

}  // namespace qvo
