#include "qvo/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qvo {

Scalar Scalar::flt(double v, double q0) {
  Scalar s;
  s.is_float_ = true;
  s.v_ = v;
  s.q0_ = q0;
  return s;
}

Scalar Scalar::lift(const RatQ& r, const QMode& mode) {
  if (mode.exact) return Scalar(r);
  return flt(to_float(r, mode), mode.q0);
}

const RatQ& Scalar::exact() const {
  if (is_float_) fail(ErrorCode::InvalidArgument, "float scalar has no exact value");
  return r_;
}

double Scalar::magnitude() const {
  if (is_float_) return std::abs(v_);
  return r_.is_zero() ? 0.0 : 1.0;
}

void Scalar::align(const Scalar& o) {
  if (is_float_ == o.is_float_) {
    if (is_float_ && q0_ != o.q0_) fail(ErrorCode::InvalidArgument, "mixing scalars at different q0");
    return;
  }
  if (!is_float_) {
    double v = r_.is_zero() ? 0.0 : to_float(r_, QMode::Float(o.q0_));
    *this = flt(v, o.q0_);
  }
}

Scalar Scalar::operator-() const {
  if (is_float_) return flt(-v_, q0_);
  return Scalar(-r_);
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (!is_float_ && !o.is_float_) {
    r_ += o.r_;
    return *this;
  }
  align(o);
  v_ += o.is_float_ ? o.v_ : o.to_double(q0_);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (!is_float_ && !o.is_float_) {
    r_ -= o.r_;
    return *this;
  }
  align(o);
  v_ -= o.is_float_ ? o.v_ : o.to_double(q0_);
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (!is_float_ && !o.is_float_) {
    r_ *= o.r_;
    return *this;
  }
  align(o);
  v_ *= o.is_float_ ? o.v_ : o.to_double(q0_);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) { return *this *= o.inverse(); }

Scalar Scalar::inverse() const {
  if (is_float_) {
    if (v_ == 0.0) fail(ErrorCode::DivisionByZero, "inverse of float zero");
    return flt(1.0 / v_, q0_);
  }
  return Scalar(r_.inverse());
}

double Scalar::to_double(double q0) const {
  if (is_float_) return v_;
  if (r_.is_zero()) return 0.0;
  return to_float(r_, QMode::Float(q0));
}

bool Scalar::equals(const Scalar& o, double tol) const {
  if (!is_float_ && !o.is_float_) return r_ == o.r_;
  return residual(o) <= tol;
}

double Scalar::residual(const Scalar& o) const {
  if (!is_float_ && !o.is_float_) return r_ == o.r_ ? 0.0 : 1.0;
  double q0 = is_float_ ? q0_ : o.q0_;
  double a = to_double(q0), b = o.to_double(q0);
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

std::string Scalar::str() const {
  if (!is_float_) return r_.str();
  std::ostringstream os;
  os.precision(17);
  os << v_;
  return os.str();
}

nlohmann::json Scalar::to_json() const {
  if (is_float_) return nlohmann::json{{"float", v_}, {"q0", q0_}};
  return r_.to_json();
}

Scalar Scalar::from_json(const nlohmann::json& j, const QMode& mode) {
  if (j.is_object() && j.contains("float")) {
    double q0 = j.value("q0", mode.q0);
    return flt(j["float"].get<double>(), q0);
  }
  return lift(RatQ::from_json(j), mode);
}

}  // namespace qvo
