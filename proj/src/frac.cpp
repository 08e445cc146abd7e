#include "qvo/frac.hpp"

#include <compare>
#include <numeric>
#include <ostream>

#include "qvo/errors.hpp"

namespace qvo {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PoleAtQ0: return "PoleAtQ0";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotSymmetrizable: return "NotSymmetrizable";
    case ErrorCode::NotFiniteType: return "NotFiniteType";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::NotDominantIntegral: return "NotDominantIntegral";
    case ErrorCode::InfiniteDimensional: return "InfiniteDimensional";
    case ErrorCode::NonUniqueSolution: return "NonUniqueSolution";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::NotGeneric: return "NotGeneric";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DecompositionFailed: return "DecompositionFailed";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InfiniteDualError: return "InfiniteDualError";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::MoveNotApplicable: return "MoveNotApplicable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownName: return "UnknownName";
  }
  return "Error";
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  __int128 l = static_cast<__int128>(a / gcd64(a, b)) * b;
  if (l < 0) l = -l;
  if (l > INT64_MAX) fail(ErrorCode::Overflow, "lcm overflow");
  return static_cast<std::int64_t>(l);
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < -INT64_MAX) fail(ErrorCode::Overflow, "rational exponent overflow");
  return static_cast<std::int64_t>(v);
}

Frac make(__int128 n, __int128 d) {
  if (d == 0) fail(ErrorCode::DivisionByZero, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Frac(narrow(n), narrow(d));
}

}  // namespace

Frac::Frac(std::int64_t n, std::int64_t d) {
  if (d == 0) fail(ErrorCode::DivisionByZero, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = n;
  den_ = d;
}

std::int64_t Frac::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Frac Frac::operator-() const { return Frac(-num_, den_); }

Frac& Frac::operator+=(const Frac& o) {
  if (den_ == 1 && o.den_ == 1) {
    *this = Frac(narrow(static_cast<__int128>(num_) + o.num_), 1);
    return *this;
  }
  *this = make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
               static_cast<__int128>(den_) * o.den_);
  return *this;
}

Frac& Frac::operator-=(const Frac& o) { return *this += -o; }

Frac& Frac::operator*=(const Frac& o) {
  *this = make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  return *this;
}

Frac& Frac::operator/=(const Frac& o) {
  if (o.num_ == 0) fail(ErrorCode::DivisionByZero, "division by zero rational");
  *this = make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Frac& a, const Frac& b) {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Frac::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Frac Frac::parse(const std::string& s) {
  try {
    auto slash = s.find('/');
    std::size_t pos = 0;
    if (slash == std::string::npos) {
      long long n = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return Frac(n);
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    long long n = std::stoll(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(s);
    long long d = std::stoll(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(s);
    return Frac(n, d);
  } catch (const std::logic_error&) {
    fail(ErrorCode::ParseError, "not a rational: '" + s + "'");
  }
}

std::ostream& operator<<(std::ostream& os, const Frac& f) { return os << f.str(); }

}  // namespace qvo
