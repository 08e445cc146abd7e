#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qvo/errors.hpp"
#include "qvo/frac.hpp"

namespace qvo {

// Finite sum of c_e q^e with rational exponents e and rational coefficients c.
class LaurentQ {
 public:
  struct Term {
    Frac exp;
    mpq_class coeff;
  };

  LaurentQ() = default;
  LaurentQ(long c);  // NOLINT
  static LaurentQ constant(const mpq_class& c);
  static LaurentQ q_power(const Frac& e, const mpq_class& c = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exp.is_zero()); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Frac& min_exp() const { return terms_.front().exp; }
  const Frac& max_exp() const { return terms_.back().exp; }
  const mpq_class& low_coeff() const { return terms_.front().coeff; }

  LaurentQ operator-() const;
  LaurentQ& operator+=(const LaurentQ& o);
  LaurentQ& operator-=(const LaurentQ& o);
  friend LaurentQ operator+(const LaurentQ& a, const LaurentQ& b);
  friend LaurentQ operator-(const LaurentQ& a, const LaurentQ& b);
  friend LaurentQ operator*(const LaurentQ& a, const LaurentQ& b);
  friend bool operator==(const LaurentQ& a, const LaurentQ& b);

  LaurentQ scaled(const mpq_class& c) const;
  LaurentQ shifted(const Frac& e) const;
  LaurentQ pow(unsigned n) const;
  // q -> q^{-1}.
  LaurentQ bar() const;

  double eval(double q0) const;
  std::string str() const;

  nlohmann::json to_json() const;
  static LaurentQ from_json(const nlohmann::json& j);

  // Exact division; requires divisibility, else Inconsistent.
  friend LaurentQ exact_div(const LaurentQ& a, const LaurentQ& b);
  friend LaurentQ poly_gcd(const LaurentQ& a, const LaurentQ& b);

 private:
  explicit LaurentQ(std::vector<Term> t) : terms_(std::move(t)) {}
  std::vector<Term> terms_;  // ascending exponents, nonzero coefficients
};

// Element of the fraction field, kept reduced: gcd(num, den) = 1, den has
// lowest exponent 0 and lowest coefficient 1.
class RatQ {
 public:
  RatQ() : num_(), den_(1) {}
  RatQ(long c) : num_(c), den_(1) {}  // NOLINT
  RatQ(const LaurentQ& n) : num_(n), den_(1) { normalize(); }  // NOLINT
  RatQ(const LaurentQ& n, const LaurentQ& d);
  static RatQ from_frac(const Frac& f);
  static RatQ q_power(const Frac& e) { return RatQ(LaurentQ::q_power(e)); }

  const LaurentQ& num() const { return num_; }
  const LaurentQ& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  // Total number of stored terms; a cheap size measure for pivot choice.
  std::size_t weight() const { return num_.size() + den_.size(); }

  RatQ operator-() const;
  RatQ& operator+=(const RatQ& o);
  RatQ& operator-=(const RatQ& o);
  RatQ& operator*=(const RatQ& o);
  RatQ& operator/=(const RatQ& o);
  friend RatQ operator+(RatQ a, const RatQ& b) { return a += b; }
  friend RatQ operator-(RatQ a, const RatQ& b) { return a -= b; }
  friend RatQ operator*(RatQ a, const RatQ& b) { return a *= b; }
  friend RatQ operator/(RatQ a, const RatQ& b) { return a /= b; }
  friend bool operator==(const RatQ& a, const RatQ& b);

  RatQ inverse() const;
  RatQ pow(int n) const;
  RatQ bar() const;

  double eval(double q0) const;
  std::string str() const;

  nlohmann::json to_json() const;
  static RatQ from_json(const nlohmann::json& j);

 private:
  void normalize();
  LaurentQ num_;
  LaurentQ den_;
};

// [c]_{q^d} = (q^{dc} - q^{-dc}) / (q^d - q^{-d}).
RatQ q_int(const Frac& c, const Frac& base = Frac(1));
RatQ q_factorial(int m, const Frac& base = Frac(1));
RatQ q_binomial(int m, int k, const Frac& base = Frac(1));

struct QMode {
  bool exact = true;
  double q0 = 0.83;
  double tol = 1e-9;

  static QMode Exact() { return QMode{}; }
  static QMode Float(double q0 = 0.83, double tol = 1e-9);
  std::string str() const;
  bool operator==(const QMode& o) const {
    return exact == o.exact && (exact || (q0 == o.q0 && tol == o.tol));
  }
};

double to_float(const RatQ& a, const QMode& mode);

}  // namespace qvo
