#include "qvo/rmatrix.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <map>
#include <mutex>

namespace qvo {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- coefficients

struct CoeffStore {
  std::vector<std::vector<int>> cartan;
  QMode mode;
  int height = 0;
  std::map<std::vector<int>, QuasiRDegree> degrees;
};

std::mutex g_store_mutex;
std::vector<std::unique_ptr<CoeffStore>> g_stores;

Weight generic_weight(const CartanPtr& c) {
  int r = c->rank();
  for (int den : {2, 3, 5, 7, 11, 13}) {
    for (int pattern = 0; pattern < 3; ++pattern) {
      std::vector<Frac> f;
      for (int i = 0; i < r; ++i) {
        std::int64_t num = pattern == 0 ? 1 : pattern == 1 ? i + 1 : (i % 2 == 0 ? 1 : 2);
        if (num % den == 0) num = 1;
        f.emplace_back(num, den);
      }
      Weight w = Weight::from_fund(c, f);
      if (c->is_generic(w)) return w;
    }
  }
  fail(ErrorCode::NotGeneric, "no generic weight found for " + c->name());
}

std::vector<int> root_coords(const Weight& w) {
  std::vector<int> v;
  for (const auto& f : w.root()) {
    if (!f.is_integer()) fail(ErrorCode::InvalidArgument, "non-integral degree " + w.str());
    v.push_back(static_cast<int>(f.num()));
  }
  return v;
}

int height_of(const std::vector<int>& beta) {
  int h = 0;
  for (int b : beta) h += b;
  return h;
}

// F-word (operator order) that produces basis vector b from the highest vector.
std::vector<int> f_word(const WeightModule& v, int b) {
  std::vector<int> w;
  while (v.basis[static_cast<std::size_t>(b)].parent >= 0) {
    w.push_back(v.basis[static_cast<std::size_t>(b)].parent_gen);
    b = v.basis[static_cast<std::size_t>(b)].parent;
  }
  return w;
}

void extend_store(CoeffStore& st, const CartanPtr& c, int height) {
  int r = c->rank();
  Weight lambda = generic_weight(c);
  ModulePtr v = verma(lambda, height, st.mode);
  auto ws = v->weight_spaces();
  std::vector<Matrix> Et;
  for (int i = 0; i < r; ++i) Et.push_back(v->E[static_cast<std::size_t>(i)].transpose());

  // Row 0 of π(E_{w0}···E_{wn-1}).
  std::map<std::vector<int>, std::vector<Scalar>> rows;
  std::function<const std::vector<Scalar>&(const std::vector<int>&)> row_of =
      [&](const std::vector<int>& w) -> const std::vector<Scalar>& {
    auto it = rows.find(w);
    if (it != rows.end()) return it->second;
    std::vector<Scalar> out;
    if (w.empty()) {
      out.assign(static_cast<std::size_t>(v->dim()), Scalar());
      out[0] = Scalar(1);
    } else {
      std::vector<int> head(w.begin(), w.end() - 1);
      out = Et[static_cast<std::size_t>(w.back())].apply(row_of(head));
    }
    return rows.emplace(w, std::move(out)).first->second;
  };

  if (st.degrees.empty()) {
    QuasiRDegree d0;
    d0.beta.assign(static_cast<std::size_t>(r), 0);
    d0.e_words = {{}};
    d0.f_words = {{}};
    d0.coeff = Matrix::identity(1);
    st.degrees.emplace(d0.beta, d0);
  }

  std::vector<std::pair<std::vector<int>, std::vector<int>>> todo;  // (β, basis indices of M[λ-β])
  for (const auto& [mu, idx] : ws) {
    std::vector<int> beta = root_coords(lambda - mu);
    int h = height_of(beta);
    if (h > st.height && h <= height) todo.emplace_back(beta, idx);
  }
  std::stable_sort(todo.begin(), todo.end(),
                   [](const auto& a, const auto& b) { return height_of(a.first) < height_of(b.first); });

  for (const auto& [beta, X] : todo) {
    int P = static_cast<int>(X.size());
    QuasiRDegree deg;
    deg.beta = beta;
    for (int b : X) {
      std::vector<int> fw = f_word(*v, b);
      deg.f_words.push_back(fw);
      deg.e_words.emplace_back(fw.rbegin(), fw.rend());
    }
    Weight mu = lambda - c->root(beta);
    // Rows of the constraint system: (i, k) with k a basis vector of M[μ+α_i].
    std::vector<std::pair<int, int>> eqs;
    for (int i = 0; i < r; ++i) {
      if (beta[static_cast<std::size_t>(i)] == 0) continue;
      auto it = ws.find(mu + c->simple_root(i));
      if (it == ws.end()) continue;
      for (int k : it->second) eqs.emplace_back(i, k);
    }
    int N = static_cast<int>(eqs.size());
    Matrix S(P, P), T(N, P), rhs(P, N);
    for (int a = 0; a < P; ++a) {
      const auto& row = row_of(deg.e_words[static_cast<std::size_t>(a)]);
      for (int x = 0; x < P; ++x) S.set(x, a, row[static_cast<std::size_t>(X[static_cast<std::size_t>(x)])]);
    }
    for (int e = 0; e < N; ++e) {
      auto [i, k] = eqs[static_cast<std::size_t>(e)];
      for (int b = 0; b < P; ++b) T.set(e, b, v->E[static_cast<std::size_t>(i)].get(k, X[static_cast<std::size_t>(b)]));
    }
    // (1⊗E_i) R̄_β (x⊗m) = R̄_{β-α_i}(E_i x ⊗ K_i m) - (E_i⊗K_i^{-1}) R̄_{β-α_i}(x⊗m)
    for (int e = 0; e < N; ++e) {
      auto [i, k] = eqs[static_cast<std::size_t>(e)];
      std::vector<int> prev = beta;
      prev[static_cast<std::size_t>(i)] -= 1;
      const QuasiRDegree& pd = st.degrees.at(prev);
      Weight ai = c->simple_root(i);
      Scalar k_m = Scalar::q_pow(c->pairing(lambda, ai), st.mode);
      Scalar kinv_k = Scalar::q_pow(-c->pairing(v->weight(k), ai), st.mode);
      // F_{w_b'} m is basis vector b'; only b' = k contributes.
      int bk = -1;
      for (std::size_t b = 0; b < pd.f_words.size(); ++b)
        if (pd.f_words[b] == f_word(*v, k)) bk = static_cast<int>(b);
      if (bk < 0) fail(ErrorCode::Inconsistent, "word basis mismatch at degree " + c->root(prev).str());
      for (int a = 0; a < static_cast<int>(pd.e_words.size()); ++a) {
        Scalar cab = pd.coeff.get(a, bk);
        if (cab.is_zero()) continue;
        std::vector<int> w1{i};
        w1.insert(w1.end(), pd.e_words[static_cast<std::size_t>(a)].begin(), pd.e_words[static_cast<std::size_t>(a)].end());
        std::vector<int> w2 = pd.e_words[static_cast<std::size_t>(a)];
        w2.push_back(i);
        const auto& r1 = row_of(w1);
        const auto& r2 = row_of(w2);
        for (int x = 0; x < P; ++x) {
          std::size_t gx = static_cast<std::size_t>(X[static_cast<std::size_t>(x)]);
          Scalar val = cab * (k_m * r2[gx] - kinv_k * r1[gx]);
          if (!val.is_zero()) rhs.add_to(x, e, val);
        }
      }
    }
    SolveResult y = solve(S, rhs);
    if (!y.unique) fail(ErrorCode::NotGeneric, "pairing matrix singular at degree " + c->root(beta).str());
    SolveResult ct = solve(T, y.x.transpose());
    if (!ct.consistent) fail(ErrorCode::Inconsistent, "quasi-R constraint inconsistent at degree " + c->root(beta).str());
    if (!ct.unique) fail(ErrorCode::NonUniqueSolution, "quasi-R constraint underdetermined at degree " + c->root(beta).str());
    deg.coeff = ct.x.transpose();
    st.degrees.emplace(beta, std::move(deg));
  }
  st.height = height;
}

}  // namespace

std::vector<QuasiRDegree> quasi_r_coefficients(const CartanPtr& c, const QMode& mode, int height) {
  if (height > kMaxQuasiRHeight)
    fail(ErrorCode::TruncationTooSmall,
         "quasi-R requested to height " + std::to_string(height) + ", cap is " + std::to_string(kMaxQuasiRHeight));
  std::lock_guard<std::mutex> lock(g_store_mutex);
  CoeffStore* st = nullptr;
  for (auto& s : g_stores)
    if (s->cartan == c->matrix() && s->mode.exact == mode.exact && (mode.exact || s->mode.q0 == mode.q0)) st = s.get();
  if (!st) {
    g_stores.push_back(std::make_unique<CoeffStore>());
    st = g_stores.back().get();
    st->cartan = c->matrix();
    st->mode = mode;
  }
  if (height > st->height || st->degrees.empty()) extend_store(*st, c, std::max(height, st->height));
  std::vector<QuasiRDegree> out;
  for (const auto& [beta, d] : st->degrees)
    if (height_of(beta) <= height) out.push_back(d);
  std::stable_sort(out.begin(), out.end(),
                   [](const QuasiRDegree& a, const QuasiRDegree& b) { return height_of(a.beta) < height_of(b.beta); });
  return out;
}

int height_span(const WeightModule& m) {
  if (m.basis.empty()) return 0;
  Frac lo = m.cartan->height(m.basis[0].weight), hi = lo;
  for (const auto& b : m.basis) {
    Frac h = m.cartan->height(b.weight);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return static_cast<int>((hi - lo).floor());
}

// ---------------------------------------------------------------- leg operators

namespace {

// Memoized π(E_w), π(S(E_w)) and π(F_w) on one module.
class WordMaps {
 public:
  explicit WordMaps(ModulePtr m) : m_(std::move(m)) {}

  const GradedMap& e(const std::vector<int>& w) {
    auto it = e_.find(w);
    if (it != e_.end()) return it->second;
    GradedMap g = w.empty() ? identity_map(m_)
                            : compose(e_map(m_, w.front()), e(std::vector<int>(w.begin() + 1, w.end())));
    return e_.emplace(w, std::move(g)).first->second;
  }
  // S(E_{w0}···E_{wn-1}) = S(E_{wn-1})···S(E_{w0}), S(E_k) = -E_k K_k^{-1}.
  const GradedMap& s_e(const std::vector<int>& w) {
    auto it = s_.find(w);
    if (it != s_.end()) return it->second;
    GradedMap g = identity_map(m_);
    if (!w.empty()) {
      int k = w.back();
      GradedMap sk = e_map(m_, k);
      sk.mat = -(sk.mat * m_->K(k, -1));
      g = compose(sk, s_e(std::vector<int>(w.begin(), w.end() - 1)));
    }
    return s_.emplace(w, std::move(g)).first->second;
  }
  // S(F_k) = -K_k F_k.
  const GradedMap& s_f(const std::vector<int>& w) {
    auto it = sf_.find(w);
    if (it != sf_.end()) return it->second;
    GradedMap g = identity_map(m_);
    if (!w.empty()) {
      int k = w.back();
      GradedMap sk = f_map(m_, k);
      sk.mat = -(m_->K(k) * sk.mat);
      g = compose(sk, s_f(std::vector<int>(w.begin(), w.end() - 1)));
    }
    return sf_.emplace(w, std::move(g)).first->second;
  }
  const GradedMap& f(const std::vector<int>& w) {
    auto it = f_.find(w);
    if (it != f_.end()) return it->second;
    GradedMap g = w.empty() ? identity_map(m_)
                            : compose(f_map(m_, w.front()), f(std::vector<int>(w.begin() + 1, w.end())));
    return f_.emplace(w, std::move(g)).first->second;
  }

 private:
  ModulePtr m_;
  std::map<std::vector<int>, GradedMap> e_, s_, f_, sf_;
};

ModulePtr full_of(const std::vector<ModulePtr>& legs, ModulePtr full) {
  if (full) return full;
  if (legs.empty()) fail(ErrorCode::InvalidArgument, "no legs");
  return tensor_all(legs, legs[0]->cartan, legs[0]->mode);
}

// Leg indices of every basis vector of the flattened product (first leg most significant).
std::vector<std::vector<int>> leg_indices(const std::vector<ModulePtr>& legs) {
  int total = 1;
  for (const auto& l : legs) total *= l->dim();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(total), std::vector<int>(legs.size()));
  for (int t = 0; t < total; ++t) {
    int rem = t;
    for (int k = static_cast<int>(legs.size()) - 1; k >= 0; --k) {
      int d = legs[static_cast<std::size_t>(k)]->dim();
      out[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = rem % d;
      rem /= d;
    }
  }
  return out;
}

struct LegSet {
  std::vector<ModulePtr> legs;
  ModulePtr full;
  std::vector<std::vector<int>> idx;
};

void check_legs(const std::vector<ModulePtr>& legs, int x, int y) {
  int n = static_cast<int>(legs.size());
  if (x < 0 || y < 0 || x >= n || y >= n || x == y)
    fail(ErrorCode::IndexOutOfRange, "leg pair (" + std::to_string(x) + "," + std::to_string(y) + ")");
}

GradedMap quasi_r_legs(const std::vector<ModulePtr>& legs, int x, int y, const ModulePtr& full, bool inverse) {
  check_legs(legs, x, y);
  const ModulePtr& mx = legs[static_cast<std::size_t>(x)];
  const ModulePtr& my = legs[static_cast<std::size_t>(y)];
  int h = height_span(*mx);
  if (my->is_finite()) h = std::min(h, height_span(*my));
  GradedMap result = identity_map(full);
  if (h <= 0) return result;
  auto degrees = quasi_r_coefficients(full->cartan, full->mode, h);
  WordMaps wx(mx), wy(my);
  for (const auto& d : degrees) {
    if (height_of(d.beta) == 0) continue;
    Weight beta = full->cartan->root(d.beta);
    GradedMap qb;
    if (inverse) {
      qb = identity_map(mx);
      qb.mat = mx->q_diag([&](const Weight& w) { return full->cartan->pairing(beta, w); });
    }
    for (int a = 0; a < static_cast<int>(d.e_words.size()); ++a) {
      GradedMap ea = inverse ? compose(wx.s_e(d.e_words[static_cast<std::size_t>(a)]), qb)
                             : wx.e(d.e_words[static_cast<std::size_t>(a)]);
      if (ea.mat.is_zero()) continue;
      GradedMap g;
      bool any = false;
      for (int b = 0; b < static_cast<int>(d.f_words.size()); ++b) {
        Scalar cab = d.coeff.get(a, b);
        if (cab.is_zero()) continue;
        GradedMap term = scale_map(wy.f(d.f_words[static_cast<std::size_t>(b)]), cab);
        g = any ? add_maps(g, term) : term;
        any = true;
      }
      if (!any) continue;
      result = add_maps(result, embed_legs(legs, {{x, ea}, {y, g}}, full));
    }
  }
  result.degree = full->cartan->zero();
  return result;
}

}  // namespace

GradedMap embed_legs(const std::vector<ModulePtr>& legs, const std::vector<std::pair<int, GradedMap>>& ops,
                     ModulePtr full) {
  full = full_of(legs, full);
  std::size_t n = legs.size();
  std::vector<const GradedMap*> at(n, nullptr);
  for (const auto& [k, g] : ops) {
    if (k < 0 || static_cast<std::size_t>(k) >= n) fail(ErrorCode::IndexOutOfRange, "leg " + std::to_string(k));
    at[static_cast<std::size_t>(k)] = &g;
  }
  Matrix m = Matrix::identity(1);
  Weight degree = full->cartan->zero();
  bool masked = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (at[k]) {
      if (at[k]->mat.cols() != legs[k]->dim())
        fail(ErrorCode::ShapeMismatch, "operator does not fit leg " + std::to_string(k));
      m = kron(m, at[k]->mat);
      degree += at[k]->degree;
      masked = masked || !at[k]->valid.empty();
    } else {
      m = kron(m, Matrix::identity(legs[k]->dim()));
    }
  }
  GradedMap out{full, full, std::move(m), degree, {}};
  if (masked) {
    // A column is exact when every factor column is exact, or when some
    // factor column is an exact zero.
    std::vector<std::vector<char>> zero(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!at[k]) continue;
      zero[k].assign(static_cast<std::size_t>(at[k]->mat.cols()), 1);
      for (int i = 0; i < at[k]->mat.rows(); ++i)
        for (const auto& [j, v] : at[k]->mat.row(i)) zero[k][static_cast<std::size_t>(j)] = 0;
    }
    auto idx = leg_indices(legs);
    out.valid.assign(idx.size(), 1);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      bool all = true, exact_zero = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (!at[k]) continue;
        int j = idx[t][k];
        bool v = at[k]->is_valid(j);
        all = all && v;
        exact_zero = exact_zero || (v && zero[k][static_cast<std::size_t>(j)]);
      }
      out.valid[t] = all || exact_zero;
    }
    if (out.all_valid()) out.valid.clear();
  }
  return out;
}

GradedMap kappa_on_legs(const std::vector<ModulePtr>& legs, int x, int y, int power, ModulePtr full) {
  check_legs(legs, x, y);
  full = full_of(legs, full);
  auto idx = leg_indices(legs);
  const auto& c = full->cartan;
  std::vector<Scalar> d;
  d.reserve(idx.size());
  for (const auto& t : idx) {
    const Weight& wx = legs[static_cast<std::size_t>(x)]->weight(t[static_cast<std::size_t>(x)]);
    const Weight& wy = legs[static_cast<std::size_t>(y)]->weight(t[static_cast<std::size_t>(y)]);
    d.push_back(Scalar::q_pow(Frac(power) * c->pairing(wx, wy), full->mode));
  }
  return GradedMap{full, full, Matrix::diagonal(d), c->zero(), {}};
}

GradedMap r_on_legs(const std::vector<ModulePtr>& legs, int x, int y, ModulePtr full) {
  full = full_of(legs, full);
  return compose(kappa_on_legs(legs, x, y, 1, full), quasi_r_legs(legs, x, y, full, false));
}

GradedMap r_inverse_on_legs(const std::vector<ModulePtr>& legs, int x, int y, ModulePtr full) {
  full = full_of(legs, full);
  return compose(quasi_r_legs(legs, x, y, full, true), kappa_on_legs(legs, x, y, -1, full));
}

// ---------------------------------------------------------------- two-factor operators

GradedMap kappa_op(const ModulePtr& m, const ModulePtr& n, int power) {
  return kappa_on_legs({m, n}, 0, 1, power, tensor(m, n));
}

std::vector<GradedMap> quasi_r_blocks(const ModulePtr& m, const ModulePtr& n) {
  ModulePtr full = tensor(m, n);
  std::vector<GradedMap> out{identity_map(full)};
  int h = height_span(*m);
  if (n->is_finite()) h = std::min(h, height_span(*n));
  if (h <= 0) return out;
  WordMaps wm(m), wn(n);
  for (const auto& d : quasi_r_coefficients(full->cartan, full->mode, h)) {
    if (height_of(d.beta) == 0) continue;
    GradedMap blk{full, full, Matrix(full->dim(), full->dim()), full->cartan->zero(), {}};
    for (int a = 0; a < static_cast<int>(d.e_words.size()); ++a)
      for (int b = 0; b < static_cast<int>(d.f_words.size()); ++b) {
        Scalar cab = d.coeff.get(a, b);
        if (cab.is_zero()) continue;
        blk = add_maps(blk, scale_map(embed_legs({m, n},
                                                 {{0, wm.e(d.e_words[static_cast<std::size_t>(a)])},
                                                  {1, wn.f(d.f_words[static_cast<std::size_t>(b)])}},
                                                 full),
                                      cab));
      }
    out.push_back(std::move(blk));
  }
  return out;
}

GradedMap quasi_r_op(const ModulePtr& m, const ModulePtr& n) { return quasi_r_legs({m, n}, 0, 1, tensor(m, n), false); }

GradedMap r_op(const ModulePtr& m, const ModulePtr& n) { return r_on_legs({m, n}, 0, 1, tensor(m, n)); }

GradedMap r_inverse(const ModulePtr& m, const ModulePtr& n) { return r_inverse_on_legs({m, n}, 0, 1, tensor(m, n)); }

GradedMap graded_inverse(const GradedMap& a) {
  if (!a.degree.is_zero() || a.mat.rows() != a.mat.cols())
    fail(ErrorCode::ShapeMismatch, "graded inverse needs a degree-0 endomorphism");
  int n = a.mat.cols();
  GradedMap out{a.target, a.source, Matrix(n, n), a.degree, {}};
  std::vector<char> valid(static_cast<std::size_t>(n), 1);
  for (const auto& [mu, idx] : a.source->weight_spaces()) {
    bool ok = std::all_of(idx.begin(), idx.end(), [&](int j) { return a.is_valid(j); });
    Matrix blk = a.mat.submatrix(idx, idx);
    Matrix inv;
    try {
      inv = inverse(blk);
    } catch (const Error& e) {
      if (ok) throw;
      for (int j : idx) valid[static_cast<std::size_t>(j)] = 0;
      continue;
    }
    if (!ok)
      for (int j : idx) valid[static_cast<std::size_t>(j)] = 0;
    for (int r = 0; r < inv.rows(); ++r)
      for (const auto& [cc, v] : inv.row(r))
        out.mat.set(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(cc)], v);
  }
  if (std::any_of(valid.begin(), valid.end(), [](char c) { return c == 0; })) out.valid = valid;
  return out;
}

GradedMap flip_map(const ModulePtr& m, const ModulePtr& n) {
  return GradedMap{tensor(m, n), tensor(n, m), flip_matrix(m->dim(), n->dim()), m->cartan->zero(), {}};
}

GradedMap braiding(const ModulePtr& m, const ModulePtr& n) { return compose(flip_map(m, n), r_op(m, n)); }

GradedMap braiding_inverse(const ModulePtr& m, const ModulePtr& n) {
  return compose(r_inverse(m, n), flip_map(n, m));
}

GradedMap r21_op(const ModulePtr& v1, const ModulePtr& v2) { return r_on_legs({v1, v2}, 1, 0, tensor(v1, v2)); }

GradedMap r21_inverse(const ModulePtr& v1, const ModulePtr& v2) {
  return r_inverse_on_legs({v1, v2}, 1, 0, tensor(v1, v2));
}

// ---------------------------------------------------------------- ribbon

namespace {

Frac casimir_exponent(const CartanPtr& c, const Weight& g) { return c->pairing(g, g + Frac(2) * c->rho()); }

}  // namespace

GradedMap ribbon_by_decomposition(const ModulePtr& m, bool inverse_op) {
  const CartanPtr& c = m->cartan;
  int r = c->rank();
  int n = m->dim();
  auto ws = m->weight_spaces();
  std::vector<Weight> order;
  for (const auto& [mu, idx] : ws) order.push_back(mu);
  std::stable_sort(order.begin(), order.end(),
                   [&](const Weight& a, const Weight& b) { return c->height(a) > c->height(b); });
  std::vector<char> fv = m->f_valid();
  auto f_ok = [&](int j) { return fv.empty() || fv[static_cast<std::size_t>(j)]; };

  struct Gen {
    Weight eig;
    std::vector<Scalar> vec;  // global coordinates
  };
  std::map<Weight, std::vector<Gen>> gens;
  GradedMap out{m, m, Matrix(n, n), c->zero(), {}};
  std::vector<char> valid(static_cast<std::size_t>(n), 1);

  for (const Weight& mu : order) {
    const auto& idx = ws.at(mu);
    int dm = static_cast<int>(idx.size());
    std::vector<Gen> cands;
    for (int i = 0; i < r; ++i) {
      auto it = gens.find(mu + c->simple_root(i));
      if (it == gens.end()) continue;
      for (const Gen& g : it->second) {
        bool exact = true;
        for (std::size_t k = 0; k < g.vec.size(); ++k)
          if (!g.vec[k].is_zero() && !f_ok(static_cast<int>(k))) exact = false;
        if (!exact) continue;
        cands.push_back({g.eig, m->F[static_cast<std::size_t>(i)].apply(g.vec)});
      }
    }
    // Singular vectors: joint kernel of the E_i on M[μ].
    std::vector<int> rows_all;
    for (int i = 0; i < r; ++i) {
      auto it = ws.find(mu + c->simple_root(i));
      if (it != ws.end()) rows_all.insert(rows_all.end(), it->second.begin(), it->second.end());
    }
    Matrix stacked(0, dm);
    {
      std::vector<std::vector<Scalar>> dense;
      for (int i = 0; i < r; ++i) {
        auto it = ws.find(mu + c->simple_root(i));
        if (it == ws.end()) continue;
        Matrix sub = m->E[static_cast<std::size_t>(i)].submatrix(it->second, idx);
        auto d = to_dense(sub);
        dense.insert(dense.end(), d.begin(), d.end());
      }
      stacked = dense.empty() ? Matrix(1, dm) : from_dense(dense, dm);
    }
    Matrix ker = nullspace(stacked);
    for (int k = 0; k < ker.cols(); ++k) {
      std::vector<Scalar> v(static_cast<std::size_t>(n));
      for (int a = 0; a < dm; ++a) v[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] = ker.get(a, k);
      cands.push_back({mu, std::move(v)});
    }
    // Independent vectors per eigen-class, then across classes.
    std::map<Weight, std::vector<std::vector<Scalar>>> by_class;
    for (auto& g : cands) {
      std::vector<Scalar> local(static_cast<std::size_t>(dm));
      for (int a = 0; a < dm; ++a) local[static_cast<std::size_t>(a)] = g.vec[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      by_class[g.eig].push_back(std::move(local));
    }
    std::vector<Gen> kept;
    std::vector<std::vector<Scalar>> basis_cols;
    std::vector<Weight> basis_eig;
    for (auto& [eig, vecs] : by_class) {
      Matrix cols = from_dense(vecs, dm).transpose();
      for (int j : column_basis(cols)) {
        const auto& lv = vecs[static_cast<std::size_t>(j)];
        std::vector<Scalar> gv(static_cast<std::size_t>(n));
        for (int a = 0; a < dm; ++a) gv[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] = lv[static_cast<std::size_t>(a)];
        kept.push_back({eig, std::move(gv)});
        basis_cols.push_back(lv);
        basis_eig.push_back(eig);
      }
    }
    gens[mu] = kept;
    bool spans = static_cast<int>(basis_cols.size()) == dm &&
                 rank(from_dense(basis_cols, dm)) == dm;
    if (!spans) {
      if (m->is_finite())
        fail(ErrorCode::DecompositionFailed, "ribbon decomposition failed at weight " + mu.str() + " of " + m->name);
      for (int j : idx) valid[static_cast<std::size_t>(j)] = 0;
      continue;
    }
    Matrix B = from_dense(basis_cols, dm).transpose();
    std::vector<Scalar> dg;
    for (const Weight& g : basis_eig)
      dg.push_back(Scalar::q_pow((inverse_op ? Frac(-1) : Frac(1)) * casimir_exponent(c, g), m->mode));
    Matrix blk = B * Matrix::diagonal(dg) * inverse(B);
    for (int a = 0; a < blk.rows(); ++a)
      for (const auto& [b, v] : blk.row(a)) out.mat.set(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)], v);
  }
  if (std::any_of(valid.begin(), valid.end(), [](char ch) { return ch == 0; })) out.valid = valid;
  return out;
}

GradedMap ribbon_op(const ModulePtr& m, bool inverse_op) {
  if (m->highest_weight && (m->kind == ModuleKind::Verma || m->kind == ModuleKind::Simple ||
                            m->kind == ModuleKind::Trivial)) {
    Frac e = casimir_exponent(m->cartan, *m->highest_weight);
    if (inverse_op) e = -e;
    return scale_map(identity_map(m), Scalar::q_pow(e, m->mode));
  }
  return ribbon_by_decomposition(m, inverse_op);
}

// ---------------------------------------------------------------- checks

namespace {

using Clock = std::chrono::steady_clock;

CheckResult begin(const std::string& id, const ModulePtr& m, json params) {
  CheckResult r;
  r.identity = id;
  r.params = std::move(params);
  r.mode = m->mode.exact ? "exact" : "float";
  return r;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json names(std::initializer_list<ModulePtr> ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(m->name);
  return json{{"modules", a}};
}

GradedMap k_map(const ModulePtr& m, int i) { return GradedMap{m, m, m->K(i), m->cartan->zero(), {}}; }

}  // namespace

CheckResult ybe_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w) {
  auto t0 = Clock::now();
  CheckResult res = begin("yang_baxter", u, names({u, v, w}));
  std::vector<ModulePtr> legs{u, v, w};
  ModulePtr full = tensor_all(legs, u->cartan, u->mode);
  GradedMap r12 = r_on_legs(legs, 0, 1, full), r13 = r_on_legs(legs, 0, 2, full), r23 = r_on_legs(legs, 1, 2, full);
  res.absorb(compare_maps(compose(r12, compose(r13, r23)), compose(r23, compose(r13, r12))), "R12R13R23");
  res.seconds = since(t0);
  return res;
}

CheckResult hexagon_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w, int which) {
  auto t0 = Clock::now();
  CheckResult res = begin(which == 0 ? "hexagon_left" : "hexagon_right", u, names({u, v, w}));
  if (which == 0) {
    // c_{U⊗V,W} = (c_{U,W}⊗id_V)(id_U⊗c_{V,W})
    GradedMap lhs = braiding(tensor(u, v), w);
    GradedMap a = tensor_maps(identity_map(u), braiding(v, w));
    GradedMap b = tensor_maps(braiding(u, w), identity_map(v));
    res.absorb(compare_maps(lhs, compose(b, a)));
  } else {
    // c_{U,V⊗W} = (id_V⊗c_{U,W})(c_{U,V}⊗id_W)
    GradedMap lhs = braiding(u, tensor(v, w));
    GradedMap a = tensor_maps(braiding(u, v), identity_map(w));
    GradedMap b = tensor_maps(identity_map(v), braiding(u, w));
    res.absorb(compare_maps(lhs, compose(b, a)));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult delta_op_check(const ModulePtr& m, const ModulePtr& n) {
  auto t0 = Clock::now();
  CheckResult res = begin("r_delta_op", m, names({m, n}));
  ModulePtr mn = tensor(m, n), nm = tensor(n, m);
  GradedMap R = r_op(m, n);
  GradedMap P = flip_map(m, n), Pback = flip_map(n, m);
  for (int i = 0; i < m->rank(); ++i) {
    std::vector<std::pair<std::string, std::pair<GradedMap, GradedMap>>> gens{
        {"E" + std::to_string(i + 1), {e_map(mn, i), e_map(nm, i)}},
        {"F" + std::to_string(i + 1), {f_map(mn, i), f_map(nm, i)}},
        {"K" + std::to_string(i + 1), {k_map(mn, i), k_map(nm, i)}}};
    for (const auto& [name, g] : gens) {
      GradedMap lhs = compose(R, g.first);
      GradedMap rhs = compose(compose(Pback, compose(g.second, P)), R);
      res.absorb(compare_maps(lhs, rhs), name);
    }
  }
  res.seconds = since(t0);
  return res;
}

CheckResult r_inverse_check(const ModulePtr& m, const ModulePtr& n) {
  auto t0 = Clock::now();
  CheckResult res = begin("r_inverse_two_routes", m, names({m, n}));
  GradedMap R = r_op(m, n);
  GradedMap anti = r_inverse(m, n);
  GradedMap blocks = graded_inverse(R);
  res.absorb(compare_maps(anti, blocks), "antipode vs block inverse");
  res.absorb(compare_maps(compose(R, anti), identity_map(R.source)), "R R^-1");
  res.seconds = since(t0);
  return res;
}

CheckResult braiding_intertwines_check(const ModulePtr& m, const ModulePtr& n) {
  auto t0 = Clock::now();
  CheckResult res = begin("braiding_intertwines", m, names({m, n}));
  ModulePtr mn = tensor(m, n), nm = tensor(n, m);
  GradedMap c = braiding(m, n);
  for (int i = 0; i < m->rank(); ++i) {
    res.absorb(compare_maps(compose(c, e_map(mn, i)), compose(e_map(nm, i), c)), "E" + std::to_string(i + 1));
    res.absorb(compare_maps(compose(c, f_map(mn, i)), compose(f_map(nm, i), c)), "F" + std::to_string(i + 1));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult r_coproduct_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w, int which) {
  auto t0 = Clock::now();
  CheckResult res = begin(which == 0 ? "r_coproduct_left" : "r_coproduct_right", u, names({u, v, w}));
  std::vector<ModulePtr> legs{u, v, w};
  ModulePtr full = tensor_all(legs, u->cartan, u->mode);
  if (which == 0) {
    GradedMap lhs = r_op(tensor(u, v), w);
    GradedMap rhs = compose(r_on_legs(legs, 0, 2, full), r_on_legs(legs, 1, 2, full));
    res.absorb(compare_maps(lhs, rhs));
  } else {
    GradedMap lhs = r_op(u, tensor(v, w));
    GradedMap rhs = compose(r_on_legs(legs, 0, 2, full), r_on_legs(legs, 0, 1, full));
    res.absorb(compare_maps(lhs, rhs));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult twist_coherence_check(const ModulePtr& m, const ModulePtr& n) {
  auto t0 = Clock::now();
  CheckResult res = begin("twist_coherence", m, names({m, n}));
  GradedMap lhs = ribbon_op(tensor(m, n));
  GradedMap cc = compose(braiding(n, m), braiding(m, n));
  GradedMap rhs = compose(tensor_maps(ribbon_op(m), ribbon_op(n)), cc);
  res.absorb(compare_maps(lhs, rhs));
  res.seconds = since(t0);
  return res;
}

CheckResult ribbon_central_check(const ModulePtr& m) {
  auto t0 = Clock::now();
  CheckResult res = begin("ribbon_central", m, names({m}));
  GradedMap th = ribbon_op(m);
  for (int i = 0; i < m->rank(); ++i) {
    res.absorb(compare_maps(compose(th, e_map(m, i)), compose(e_map(m, i), th)), "E" + std::to_string(i + 1));
    res.absorb(compare_maps(compose(th, f_map(m, i)), compose(f_map(m, i), th)), "F" + std::to_string(i + 1));
  }
  res.seconds = since(t0);
  return res;
}

CheckResult drinfeld_twist_check(const ModulePtr& m) {
  auto t0 = Clock::now();
  CheckResult res = begin("drinfeld_twist", m, names({m}));
  const CartanPtr& c = m->cartan;
  int h = height_span(*m);
  WordMaps wm(m);
  // u = Σ S(b) a over R = κR̄; κ contributes q^{-⟨ν,ν⟩} on the intermediate weight ν.
  GradedMap mid{m, m, m->q_diag([&](const Weight& w) { return -c->pairing(w, w); }), c->zero(), {}};
  GradedMap u{m, m, Matrix(m->dim(), m->dim()), c->zero(), {}};
  for (const auto& d : quasi_r_coefficients(c, m->mode, std::max(h, 0))) {
    for (int a = 0; a < static_cast<int>(d.e_words.size()); ++a)
      for (int b = 0; b < static_cast<int>(d.f_words.size()); ++b) {
        Scalar cab = d.coeff.get(a, b);
        if (cab.is_zero()) continue;
        GradedMap term = compose(wm.s_f(d.f_words[static_cast<std::size_t>(b)]),
                                 compose(mid, wm.e(d.e_words[static_cast<std::size_t>(a)])));
        u = add_maps(u, scale_map(term, cab));
      }
  }
  GradedMap k2rho{m, m, m->q_diag([&](const Weight& w) { return c->pairing(Frac(2) * c->rho(), w); }), c->zero(), {}};
  res.absorb(compare_maps(compose(u, ribbon_op(m)), k2rho), "u*theta = K_2rho");
  res.seconds = since(t0);
  return res;
}

CheckResult r_naturality_check(const GradedMap& a, const ModulePtr& n) {
  auto t0 = Clock::now();
  CheckResult res = begin("r_naturality", a.source, names({a.source, a.target, n}));
  GradedMap an = tensor_maps(a, identity_map(n));
  res.absorb(compare_maps(compose(an, r_op(a.source, n)), compose(r_op(a.target, n), an)));
  res.seconds = since(t0);
  return res;
}

}  // namespace qvo
