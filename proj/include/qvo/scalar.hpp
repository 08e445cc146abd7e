#pragma once

#include <string>

#include "qvo/qfield.hpp"

namespace qvo {

// Matrix entry: an exact element of Q(q^{1/oo}) or a double evaluated at q0.
// Mixed arithmetic evaluates the exact operand at the float operand's q0.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long c) : r_(c) {}  // NOLINT
  Scalar(const RatQ& r) : r_(r) {}  // NOLINT
  static Scalar flt(double v, double q0);

  // Converts an exact value into the representation required by mode.
  static Scalar lift(const RatQ& r, const QMode& mode);
  static Scalar q_pow(const Frac& e, const QMode& mode) { return lift(RatQ::q_power(e), mode); }

  bool is_float() const { return is_float_; }
  bool is_zero() const { return is_float_ ? v_ == 0.0 : r_.is_zero(); }
  const RatQ& exact() const;
  double value() const { return v_; }
  double q0() const { return q0_; }
  // Magnitude used for pivoting in float mode; term count in exact mode.
  double magnitude() const;
  std::size_t cost() const { return is_float_ ? 1 : r_.weight(); }

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  Scalar inverse() const;
  double to_double(double q0) const;

  // Exact: structural equality. Float: scaled residual below tol.
  bool equals(const Scalar& o, double tol) const;
  // |a-b| / max(1,|a|,|b|), evaluated at q0 (0 for equal exact values, 1 otherwise).
  double residual(const Scalar& o) const;

  std::string str() const;
  nlohmann::json to_json() const;
  static Scalar from_json(const nlohmann::json& j, const QMode& mode);

 private:
  void align(const Scalar& o);
  RatQ r_;
  double v_ = 0.0;
  double q0_ = 0.0;
  bool is_float_ = false;
};

}  // namespace qvo
