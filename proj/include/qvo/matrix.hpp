#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qvo/scalar.hpp"

namespace qvo {

// Row-major sparse matrix; each row keeps (column, value) pairs sorted by column.
class Matrix {
 public:
  using Entry = std::pair<int, Scalar>;
  using Row = std::vector<Entry>;

  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows)) {}
  static Matrix identity(int n);
  static Matrix diagonal(const std::vector<Scalar>& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Row& row(int i) const { return data_[static_cast<std::size_t>(i)]; }
  Scalar get(int i, int j) const;
  void set(int i, int j, const Scalar& v);
  void add_to(int i, int j, const Scalar& v);
  void set_row(int i, Row r);

  std::size_t nnz() const;
  bool is_zero() const { return nnz() == 0; }

  Matrix transpose() const;
  Matrix scaled(const Scalar& s) const;
  Matrix operator-() const { return scaled(Scalar(-1)); }
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  std::vector<Scalar> apply(const std::vector<Scalar>& x) const;
  std::vector<Scalar> column(int j) const;

  // Rows/columns restricted to the given index lists (in that order).
  Matrix submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const;

  nlohmann::json to_json() const;
  static Matrix from_json(const nlohmann::json& j, const QMode& mode);
  std::string str() const;

 private:
  void check_index(int i, int j) const;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Row> data_;
};

Matrix kron(const Matrix& a, const Matrix& b);
// Permutation P with P e_j = e_{perm[j]}.
Matrix permutation_matrix(const std::vector<int>& perm);
// Flip M⊗N -> N⊗M in Kronecker order.
Matrix flip_matrix(int dm, int dn);

struct CompareResult {
  bool pass = true;
  double max_residual = 0.0;
  int compared_columns = 0;
  int skipped_columns = 0;
  int row = -1;
  int col = -1;
  std::string lhs;
  std::string rhs;
};

// Compares a and b on the columns flagged in mask (empty = all).
CompareResult compare(const Matrix& a, const Matrix& b, const std::vector<char>& mask, double tol);

// Dense elimination helpers. Rank decisions use exact zero tests in exact
// mode and a relative threshold in float mode.
struct RowEchelon {
  std::vector<std::vector<Scalar>> rows;  // reduced rows
  std::vector<int> pivots;                // pivot column per reduced row
};

RowEchelon rref(std::vector<std::vector<Scalar>> a, int ncols);
std::vector<std::vector<Scalar>> to_dense(const Matrix& m);
Matrix from_dense(const std::vector<std::vector<Scalar>>& d, int ncols);

int rank(const Matrix& m);
// Indices of a maximal linearly independent set of columns (greedy, left to right).
std::vector<int> column_basis(const Matrix& m);
// Basis of {x : m x = 0}, as columns of the result.
Matrix nullspace(const Matrix& m);

struct SolveResult {
  bool consistent = true;
  bool unique = true;
  Matrix x;
};
// Solves a X = b. X is a particular solution when not unique.
SolveResult solve(const Matrix& a, const Matrix& b);
// Throws Singular if a is not invertible.
Matrix inverse(const Matrix& a);

}  // namespace qvo
