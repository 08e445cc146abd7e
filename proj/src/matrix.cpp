#include "qvo/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qvo {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.data_[static_cast<std::size_t>(i)].push_back({i, Scalar(1)});
  return m;
}

Matrix Matrix::diagonal(const std::vector<Scalar>& d) {
  int n = static_cast<int>(d.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    if (!d[static_cast<std::size_t>(i)].is_zero())
      m.data_[static_cast<std::size_t>(i)].push_back({i, d[static_cast<std::size_t>(i)]});
  return m;
}

void Matrix::check_index(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    fail(ErrorCode::IndexOutOfRange, "matrix index (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
}

Scalar Matrix::get(int i, int j) const {
  check_index(i, j);
  const Row& r = data_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) return it->second;
  return Scalar();
}

void Matrix::set(int i, int j, const Scalar& v) {
  check_index(i, j);
  Row& r = data_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  bool present = it != r.end() && it->first == j;
  if (v.is_zero()) {
    if (present) r.erase(it);
  } else if (present) {
    it->second = v;
  } else {
    r.insert(it, {j, v});
  }
}

void Matrix::add_to(int i, int j, const Scalar& v) {
  if (v.is_zero()) return;
  check_index(i, j);
  Row& r = data_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) {
    it->second += v;
    if (it->second.is_zero()) r.erase(it);
  } else {
    r.insert(it, {j, v});
  }
}

void Matrix::set_row(int i, Row r) {
  check_index(i, 0);
  std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  r.erase(std::remove_if(r.begin(), r.end(), [](const Entry& e) { return e.second.is_zero(); }), r.end());
  data_[static_cast<std::size_t>(i)] = std::move(r);
}

std::size_t Matrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)]) t.data_[static_cast<std::size_t>(j)].push_back({i, v});
  return t;
}

Matrix Matrix::scaled(const Scalar& s) const {
  Matrix m(rows_, cols_);
  if (s.is_zero()) return m;
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)]) {
      Scalar p = v * s;
      if (!p.is_zero()) m.data_[static_cast<std::size_t>(i)].push_back({j, p});
    }
  return m;
}

namespace {

Matrix::Row merge_rows(const Matrix::Row& a, const Matrix::Row& b, bool subtract) {
  Matrix::Row out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j]);
      if (subtract) out.back().second = -out.back().second;
      ++j;
    } else {
      Scalar s = subtract ? a[i].second - b[j].second : a[i].second + b[j].second;
      if (!s.is_zero()) out.push_back({a[i].first, s});
      ++i;
      ++j;
    }
  }
  return out;
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::ShapeMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                       std::to_string(b.cols()));
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "matrix sum");
  Matrix m(a.rows_, a.cols_);
  for (int i = 0; i < a.rows_; ++i)
    m.data_[static_cast<std::size_t>(i)] = merge_rows(a.row(i), b.row(i), false);
  return m;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "matrix difference");
  Matrix m(a.rows_, a.cols_);
  for (int i = 0; i < a.rows_; ++i)
    m.data_[static_cast<std::size_t>(i)] = merge_rows(a.row(i), b.row(i), true);
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_)
    fail(ErrorCode::ShapeMismatch, "matrix product: " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) +
                                       " times " + std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
  Matrix m(a.rows_, b.cols_);
  std::vector<Scalar> acc(static_cast<std::size_t>(b.cols_));
  std::vector<char> touched(static_cast<std::size_t>(b.cols_), 0);
  std::vector<int> cols;
  for (int i = 0; i < a.rows_; ++i) {
    cols.clear();
    for (const auto& [k, av] : a.row(i))
      for (const auto& [j, bv] : b.row(k)) {
        auto uj = static_cast<std::size_t>(j);
        if (!touched[uj]) {
          touched[uj] = 1;
          cols.push_back(j);
          acc[uj] = av * bv;
        } else {
          acc[uj] += av * bv;
        }
      }
    std::sort(cols.begin(), cols.end());
    Matrix::Row& r = m.data_[static_cast<std::size_t>(i)];
    for (int j : cols) {
      auto uj = static_cast<std::size_t>(j);
      if (!acc[uj].is_zero()) r.push_back({j, std::move(acc[uj])});
      acc[uj] = Scalar();
      touched[uj] = 0;
    }
  }
  return m;
}

std::vector<Scalar> Matrix::apply(const std::vector<Scalar>& x) const {
  if (static_cast<int>(x.size()) != cols_) fail(ErrorCode::ShapeMismatch, "apply: vector length");
  std::vector<Scalar> y(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)]) {
      const Scalar& xj = x[static_cast<std::size_t>(j)];
      if (!xj.is_zero()) y[static_cast<std::size_t>(i)] += v * xj;
    }
  return y;
}

std::vector<Scalar> Matrix::column(int j) const {
  std::vector<Scalar> c(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i) c[static_cast<std::size_t>(i)] = get(i, j);
  return c;
}

Matrix Matrix::submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
  std::vector<int> colpos(static_cast<std::size_t>(cols_), -1);
  for (std::size_t k = 0; k < cols.size(); ++k) colpos[static_cast<std::size_t>(cols[k])] = static_cast<int>(k);
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Row r;
    for (const auto& [j, v] : row(rows[k])) {
      int p = colpos[static_cast<std::size_t>(j)];
      if (p >= 0) r.push_back({p, v});
    }
    m.set_row(static_cast<int>(k), std::move(r));
  }
  return m;
}

nlohmann::json Matrix::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : row(i)) entries.push_back(nlohmann::json::array({i, j, v.to_json()}));
  return nlohmann::json{{"rows", rows_}, {"cols", cols_}, {"entries", entries}};
}

Matrix Matrix::from_json(const nlohmann::json& j, const QMode& mode) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
    fail(ErrorCode::ParseError, "matrix needs rows and cols");
  Matrix m(j["rows"].get<int>(), j["cols"].get<int>());
  if (j.contains("entries"))
    for (const auto& e : j["entries"]) {
      if (!e.is_array() || e.size() != 3) fail(ErrorCode::ParseError, "matrix entry must be [i, j, scalar]");
      m.set(e[0].get<int>(), e[1].get<int>(), Scalar::from_json(e[2], mode));
    }
  return m;
}

std::string Matrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << "[";
    for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << get(i, j).str();
    os << "]\n";
  }
  return os.str();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < b.rows(); ++k) {
      Matrix::Row r;
      r.reserve(a.row(i).size() * b.row(k).size());
      for (const auto& [j, av] : a.row(i))
        for (const auto& [l, bv] : b.row(k)) r.push_back({j * b.cols() + l, av * bv});
      m.set_row(i * b.rows() + k, std::move(r));
    }
  return m;
}

Matrix permutation_matrix(const std::vector<int>& perm) {
  int n = static_cast<int>(perm.size());
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) m.set(perm[static_cast<std::size_t>(j)], j, Scalar(1));
  return m;
}

Matrix flip_matrix(int dm, int dn) {
  std::vector<int> perm(static_cast<std::size_t>(dm * dn));
  for (int i = 0; i < dm; ++i)
    for (int j = 0; j < dn; ++j) perm[static_cast<std::size_t>(i * dn + j)] = j * dm + i;
  return permutation_matrix(perm);
}

CompareResult compare(const Matrix& a, const Matrix& b, const std::vector<char>& mask, double tol) {
  check_same_shape(a, b, "compare");
  CompareResult res;
  auto ok = [&](int j) { return mask.empty() || mask[static_cast<std::size_t>(j)]; };
  for (int j = 0; j < a.cols(); ++j) (ok(j) ? res.compared_columns : res.skipped_columns)++;
  for (int i = 0; i < a.rows(); ++i) {
    const auto& ra = a.row(i);
    const auto& rb = b.row(i);
    std::size_t x = 0, y = 0;
    while (x < ra.size() || y < rb.size()) {
      int j;
      Scalar va, vb;
      if (y == rb.size() || (x < ra.size() && ra[x].first < rb[y].first)) {
        j = ra[x].first;
        va = ra[x++].second;
      } else if (x == ra.size() || rb[y].first < ra[x].first) {
        j = rb[y].first;
        vb = rb[y++].second;
      } else {
        j = ra[x].first;
        va = ra[x++].second;
        vb = rb[y++].second;
      }
      if (!ok(j)) continue;
      double r = va.residual(vb);
      bool eq = va.is_float() || vb.is_float() ? r <= tol : r == 0.0;
      res.max_residual = std::max(res.max_residual, r);
      if (!eq && res.pass) {
        res.pass = false;
        res.row = i;
        res.col = j;
        res.lhs = va.str();
        res.rhs = vb.str();
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------- dense

namespace {

bool any_float(const std::vector<std::vector<Scalar>>& a) {
  for (const auto& r : a)
    for (const auto& v : r)
      if (v.is_float()) return true;
  return false;
}

RowEchelon rref_limited(std::vector<std::vector<Scalar>> a, int pivot_cols) {
  RowEchelon out;
  bool flt = any_float(a);
  double thresh = 0.0;
  if (flt) {
    double mx = 1.0;
    for (const auto& r : a)
      for (const auto& v : r) mx = std::max(mx, v.magnitude());
    thresh = 1e-10 * mx;
  }
  std::size_t nrows = a.size();
  std::size_t r = 0;
  for (int c = 0; c < pivot_cols && r < nrows; ++c) {
    auto uc = static_cast<std::size_t>(c);
    std::size_t best = nrows;
    double best_mag = thresh;
    std::size_t best_cost = 0;
    for (std::size_t i = r; i < nrows; ++i) {
      const Scalar& v = a[i][uc];
      if (v.is_zero()) continue;
      if (flt) {
        if (v.magnitude() > best_mag) {
          best_mag = v.magnitude();
          best = i;
        }
      } else if (best == nrows || v.cost() < best_cost) {
        best = i;
        best_cost = v.cost();
      }
    }
    if (best == nrows) {
      if (flt)
        for (std::size_t i = r; i < nrows; ++i) a[i][uc] = Scalar();
      continue;
    }
    std::swap(a[r], a[best]);
    Scalar inv = a[r][uc].inverse();
    for (auto& v : a[r])
      if (!v.is_zero()) v *= inv;
    a[r][uc] = Scalar(1);
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == r || a[i][uc].is_zero()) continue;
      Scalar f = a[i][uc];
      for (std::size_t k = 0; k < a[i].size(); ++k) {
        if (a[r][k].is_zero()) continue;
        a[i][k] -= f * a[r][k];
        if (flt && a[i][k].magnitude() <= thresh * 1e-3) a[i][k] = Scalar();
      }
      a[i][uc] = Scalar();
    }
    out.pivots.push_back(c);
    ++r;
  }
  // Rows after the pivot rows keep any non-pivot data (used for consistency tests).
  out.rows = std::move(a);
  return out;
}

}  // namespace

RowEchelon rref(std::vector<std::vector<Scalar>> a, int ncols) {
  RowEchelon e = rref_limited(std::move(a), ncols);
  e.rows.resize(e.pivots.size());
  return e;
}

std::vector<std::vector<Scalar>> to_dense(const Matrix& m) {
  std::vector<std::vector<Scalar>> d(static_cast<std::size_t>(m.rows()),
                                     std::vector<Scalar>(static_cast<std::size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
  return d;
}

Matrix from_dense(const std::vector<std::vector<Scalar>>& d, int ncols) {
  Matrix m(static_cast<int>(d.size()), ncols);
  for (std::size_t i = 0; i < d.size(); ++i) {
    Matrix::Row r;
    for (int j = 0; j < ncols; ++j)
      if (!d[i][static_cast<std::size_t>(j)].is_zero()) r.push_back({j, d[i][static_cast<std::size_t>(j)]});
    m.set_row(static_cast<int>(i), std::move(r));
  }
  return m;
}

int rank(const Matrix& m) { return static_cast<int>(rref(to_dense(m), m.cols()).pivots.size()); }

std::vector<int> column_basis(const Matrix& m) { return rref(to_dense(m), m.cols()).pivots; }

Matrix nullspace(const Matrix& m) {
  RowEchelon e = rref(to_dense(m), m.cols());
  std::vector<char> is_pivot(static_cast<std::size_t>(m.cols()), 0);
  for (int p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = 1;
  std::vector<int> free;
  for (int j = 0; j < m.cols(); ++j)
    if (!is_pivot[static_cast<std::size_t>(j)]) free.push_back(j);
  Matrix n(m.cols(), static_cast<int>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) {
    int f = free[k];
    n.set(f, static_cast<int>(k), Scalar(1));
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      const Scalar& v = e.rows[r][static_cast<std::size_t>(f)];
      if (!v.is_zero()) n.set(e.pivots[r], static_cast<int>(k), -v);
    }
  }
  return n;
}

SolveResult solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) fail(ErrorCode::ShapeMismatch, "solve: row counts differ");
  int n = a.cols(), m = b.cols();
  std::vector<std::vector<Scalar>> aug(static_cast<std::size_t>(a.rows()),
                                       std::vector<Scalar>(static_cast<std::size_t>(n + m)));
  for (int i = 0; i < a.rows(); ++i) {
    for (const auto& [j, v] : a.row(i)) aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    for (const auto& [j, v] : b.row(i)) aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)] = v;
  }
  bool flt = any_float(aug);
  RowEchelon e = rref_limited(std::move(aug), n);
  SolveResult res;
  std::size_t rk = e.pivots.size();
  res.unique = static_cast<int>(rk) == n;
  double scale = 1.0;
  if (flt)
    for (const auto& r : e.rows)
      for (const auto& v : r) scale = std::max(scale, v.magnitude());
  for (std::size_t i = rk; i < e.rows.size(); ++i)
    for (int j = 0; j < m; ++j) {
      const Scalar& v = e.rows[i][static_cast<std::size_t>(n + j)];
      if (flt ? v.magnitude() > 1e-8 * scale : !v.is_zero()) res.consistent = false;
    }
  res.x = Matrix(n, m);
  for (std::size_t r = 0; r < rk; ++r) {
    Matrix::Row row;
    for (int j = 0; j < m; ++j) {
      const Scalar& v = e.rows[r][static_cast<std::size_t>(n + j)];
      if (!v.is_zero()) row.push_back({j, v});
    }
    res.x.set_row(e.pivots[r], std::move(row));
  }
  return res;
}

Matrix inverse(const Matrix& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::ShapeMismatch, "inverse of a non-square matrix");
  SolveResult s = solve(a, Matrix::identity(a.rows()));
  if (!s.unique || !s.consistent) fail(ErrorCode::Singular, "matrix is singular");
  return s.x;
}

}  // namespace qvo
