#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

namespace qvo {

// Small exact rational with 64-bit parts; used for exponents and weight coordinates.
// Overflow raises Error(Overflow) instead of wrapping.
class Frac {
 public:
  Frac() = default;
  Frac(std::int64_t n) : num_(n), den_(1) {}  // NOLINT implicit on purpose
  Frac(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  std::int64_t floor() const;

  Frac operator-() const;
  Frac& operator+=(const Frac& o);
  Frac& operator-=(const Frac& o);
  Frac& operator*=(const Frac& o);
  Frac& operator/=(const Frac& o);

  friend Frac operator+(Frac a, const Frac& b) { return a += b; }
  friend Frac operator-(Frac a, const Frac& b) { return a -= b; }
  friend Frac operator*(Frac a, const Frac& b) { return a *= b; }
  friend Frac operator/(Frac a, const Frac& b) { return a /= b; }

  friend bool operator==(const Frac& a, const Frac& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Frac& a, const Frac& b);

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  // Accepts "a", "-a", "a/b".
  static Frac parse(const std::string& s);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Frac& f);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);

}  // namespace qvo

template <>
struct std::hash<qvo::Frac> {
  std::size_t operator()(const qvo::Frac& f) const noexcept {
    return std::hash<std::int64_t>()(f.num()) * 1000003u ^ std::hash<std::int64_t>()(f.den());
  }
};
