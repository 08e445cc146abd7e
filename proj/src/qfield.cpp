#include "qvo/qfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qvo {

using json = nlohmann::json;

// ---------------------------------------------------------------- LaurentQ

LaurentQ::LaurentQ(long c) {
  if (c != 0) terms_.push_back({Frac(0), mpq_class(c)});
}

LaurentQ LaurentQ::constant(const mpq_class& c) { return q_power(Frac(0), c); }

LaurentQ LaurentQ::q_power(const Frac& e, const mpq_class& c) {
  LaurentQ r;
  if (c != 0) r.terms_.push_back({e, c});
  return r;
}

LaurentQ LaurentQ::operator-() const {
  LaurentQ r(*this);
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

std::vector<LaurentQ::Term> merge_terms(const std::vector<LaurentQ::Term>& a,
                                        const std::vector<LaurentQ::Term>& b, bool subtract) {
  std::vector<LaurentQ::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].exp < b[j].exp)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].exp < a[i].exp) {
      out.push_back(b[j++]);
      if (subtract) out.back().coeff = -out.back().coeff;
    } else {
      mpq_class c = subtract ? mpq_class(a[i].coeff - b[j].coeff) : mpq_class(a[i].coeff + b[j].coeff);
      if (c != 0) out.push_back({a[i].exp, c});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

LaurentQ& LaurentQ::operator+=(const LaurentQ& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, false);
  return *this;
}

LaurentQ& LaurentQ::operator-=(const LaurentQ& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge_terms(terms_, o.terms_, true);
  return *this;
}

LaurentQ operator+(const LaurentQ& a, const LaurentQ& b) {
  LaurentQ r(a);
  r += b;
  return r;
}

LaurentQ operator-(const LaurentQ& a, const LaurentQ& b) {
  LaurentQ r(a);
  r -= b;
  return r;
}

LaurentQ operator*(const LaurentQ& a, const LaurentQ& b) {
  if (a.terms_.empty() || b.terms_.empty()) return LaurentQ();
  if (b.terms_.size() == 1) return a.shifted(b.terms_[0].exp).scaled(b.terms_[0].coeff);
  if (a.terms_.size() == 1) return b.shifted(a.terms_[0].exp).scaled(a.terms_[0].coeff);
  std::vector<LaurentQ::Term> prod;
  prod.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) prod.push_back({x.exp + y.exp, x.coeff * y.coeff});
  std::sort(prod.begin(), prod.end(),
            [](const LaurentQ::Term& s, const LaurentQ::Term& t) { return s.exp < t.exp; });
  std::vector<LaurentQ::Term> out;
  for (auto& t : prod) {
    if (!out.empty() && out.back().exp == t.exp) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff == 0) out.pop_back();
  return LaurentQ(std::move(out));
}

bool operator==(const LaurentQ& a, const LaurentQ& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].exp == b.terms_[i].exp) || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  return true;
}

LaurentQ LaurentQ::scaled(const mpq_class& c) const {
  if (c == 0) return LaurentQ();
  LaurentQ r(*this);
  if (c == 1) return r;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

LaurentQ LaurentQ::shifted(const Frac& e) const {
  LaurentQ r(*this);
  if (e.is_zero()) return r;
  for (auto& t : r.terms_) t.exp += e;
  return r;
}

LaurentQ LaurentQ::pow(unsigned n) const {
  LaurentQ r(1), b(*this);
  while (n) {
    if (n & 1u) r = r * b;
    n >>= 1u;
    if (n) b = b * b;
  }
  return r;
}

LaurentQ LaurentQ::bar() const {
  std::vector<Term> t(terms_.rbegin(), terms_.rend());
  for (auto& x : t) x.exp = -x.exp;
  return LaurentQ(std::move(t));
}

double LaurentQ::eval(double q0) const {
  double s = 0;
  for (const auto& t : terms_) {
    double p = t.exp.is_integer() ? std::pow(q0, static_cast<double>(t.exp.num()))
                                  : std::pow(q0, t.exp.to_double());
    s += t.coeff.get_d() * p;
  }
  return s;
}

std::string LaurentQ::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    mpq_class c = it->coeff;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = (c == 1);
    if (it->exp.is_zero()) {
      os << c.get_str();
      continue;
    }
    if (!unit) os << c.get_str() << "*";
    os << "q";
    if (!(it->exp == Frac(1))) {
      if (it->exp.is_integer() && it->exp.num() > 0)
        os << "^" << it->exp.str();
      else
        os << "^(" << it->exp.str() << ")";
    }
  }
  return os.str();
}

namespace {

json mpz_json(const mpz_class& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

mpz_class json_mpz(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) return mpz_class(j.get<std::string>());
  fail(ErrorCode::ParseError, "expected integer coefficient");
}

// Common dense encoding of several Laurent polynomials shifted to start at
// exponent 0: x = q^step, poly[k] = coefficient of x^k.
struct DenseFrame {
  Frac step;
  std::vector<std::vector<mpq_class>> polys;
  std::vector<Frac> shifts;
};

DenseFrame to_dense(const std::vector<const LaurentQ*>& ps) {
  DenseFrame f;
  std::int64_t L = 1;
  for (const auto* p : ps)
    for (const auto& t : p->terms()) {
      Frac e = t.exp - p->min_exp();
      L = lcm64(L, e.den());
    }
  std::int64_t G = 0;
  for (const auto* p : ps)
    for (const auto& t : p->terms()) {
      Frac e = (t.exp - p->min_exp()) * Frac(L);
      G = gcd64(G, e.num());
    }
  if (G == 0) G = 1;
  f.step = Frac(G, L);
  for (const auto* p : ps) {
    f.shifts.push_back(p->min_exp());
    Frac span = (p->max_exp() - p->min_exp()) / f.step;
    std::vector<mpq_class> v(static_cast<std::size_t>(span.num()) + 1);
    for (const auto& t : p->terms()) {
      Frac k = (t.exp - p->min_exp()) / f.step;
      v[static_cast<std::size_t>(k.num())] = t.coeff;
    }
    f.polys.push_back(std::move(v));
  }
  return f;
}

void trim(std::vector<mpq_class>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

// Long division: a = q*b + r with deg r < deg b.
void divmod(std::vector<mpq_class> a, const std::vector<mpq_class>& b, std::vector<mpq_class>& quo,
            std::vector<mpq_class>& rem) {
  trim(a);
  std::size_t db = b.size() - 1;
  quo.assign(a.size() >= b.size() ? a.size() - db : 0, mpq_class(0));
  mpq_class lead = b.back();
  while (a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    mpq_class c = a.back() / lead;
    quo[shift] = c;
    for (std::size_t k = 0; k <= db; ++k) a[shift + k] -= c * b[k];
    a.pop_back();
    trim(a);
  }
  rem = std::move(a);
}

LaurentQ from_dense(const std::vector<mpq_class>& v, const Frac& step, const Frac& shift);

}  // namespace

namespace {

LaurentQ from_dense(const std::vector<mpq_class>& v, const Frac& step, const Frac& shift) {
  LaurentQ r;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] != 0) r += LaurentQ::q_power(shift + step * Frac(static_cast<std::int64_t>(k)), v[k]);
  return r;
}

}  // namespace

namespace {

// Arithmetic modulo a prime p < 2^63.
struct ModP {
  std::uint64_t p;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + (p - b); }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    for (; e; e >>= 1, a = mul(a, a))
      if (e & 1) r = mul(r, a);
    return r;
  }
  std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }
  std::uint64_t of(const mpz_class& z) const { return mpz_fdiv_ui(z.get_mpz_t(), p); }
};

void trim_mod(std::vector<std::uint64_t>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Monic gcd over F_p.
std::vector<std::uint64_t> gcd_mod(const ModP& f, std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  trim_mod(a);
  trim_mod(b);
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    std::uint64_t inv = f.inv(b.back());
    while (a.size() >= b.size()) {
      std::size_t shift = a.size() - b.size();
      std::uint64_t c = f.mul(a.back(), inv);
      for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] = f.sub(a[shift + k], f.mul(c, b[k]));
      a.pop_back();
      trim_mod(a);
    }
    std::swap(a, b);
  }
  if (!a.empty()) {
    std::uint64_t inv = f.inv(a.back());
    for (auto& x : a) x = f.mul(x, inv);
  }
  return a;
}

// Primitive integer multiple of a rational coefficient vector.
std::vector<mpz_class> primitive_part(const std::vector<mpq_class>& v) {
  mpz_class l = 1;
  for (const auto& c : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> out(v.size());
  mpz_class g = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = v[k].get_num() * (l / v[k].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[k].get_mpz_t());
  }
  if (g != 0 && g != 1)
    for (auto& c : out) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  if (!out.empty() && out.back() < 0)
    for (auto& c : out) c = -c;
  return out;
}

std::vector<mpz_class> primitive_part(std::vector<mpz_class> v) {
  mpz_class g = 0;
  for (const auto& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g != 0 && g != 1)
    for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  if (!v.empty() && v.back() < 0)
    for (auto& c : v) c = -c;
  return v;
}

bool divides(const std::vector<mpz_class>& g, const std::vector<mpz_class>& a, std::vector<mpz_class>* quo = nullptr) {
  std::vector<mpz_class> r = a;
  if (quo) quo->assign(a.size() >= g.size() ? a.size() - g.size() + 1 : 0, mpz_class(0));
  const mpz_class& lead = g.back();
  mpz_class q, rem;
  while (r.size() >= g.size()) {
    if (r.back() == 0) {
      r.pop_back();
      continue;
    }
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), r.back().get_mpz_t(), lead.get_mpz_t());
    if (rem != 0) return false;
    std::size_t shift = r.size() - g.size();
    if (quo) (*quo)[shift] = q;
    for (std::size_t k = 0; k < g.size(); ++k) r[shift + k] -= q * g[k];
    r.pop_back();
  }
  for (const auto& c : r)
    if (c != 0) return false;
  return true;
}

std::vector<std::uint64_t> reduce(const ModP& f, const std::vector<mpz_class>& v) {
  std::vector<std::uint64_t> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = f.of(v[k]);
  return out;
}

// gcd of primitive integer polynomials by Chinese remaindering over word-size primes.
// Returns false if it gives up; the caller then falls back to Euclid over Q.
bool modular_gcd(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, std::vector<mpz_class>& out) {
  mpz_class lc_gcd;
  mpz_gcd(lc_gcd.get_mpz_t(), a.back().get_mpz_t(), b.back().get_mpz_t());
  mpz_class prime = mpz_class(1) << 62;
  std::size_t best = std::min(a.size(), b.size());
  std::vector<mpz_class> acc, last;
  mpz_class modulus;
  for (int attempt = 0; attempt < 400; ++attempt) {
    mpz_nextprime(prime.get_mpz_t(), prime.get_mpz_t());
    ModP f{prime.get_ui()};
    if (f.of(a.back()) == 0 || f.of(b.back()) == 0) continue;
    std::vector<std::uint64_t> g = gcd_mod(f, reduce(f, a), reduce(f, b));
    if (g.size() == 1) {
      out = {mpz_class(1)};
      return true;
    }
    if (g.size() > best) continue;
    std::uint64_t s = f.of(lc_gcd);
    for (auto& x : g) x = f.mul(x, s);
    if (g.size() < best || acc.empty()) {
      best = g.size();
      acc.assign(g.size(), 0);
      for (std::size_t k = 0; k < g.size(); ++k) acc[k] = g[k];
      modulus = prime;
      last.clear();
      continue;
    }
    // CRT: acc ≡ acc (mod modulus), acc ≡ g (mod p).
    mpz_class inv;
    mpz_class mp = modulus % prime;
    mpz_invert(inv.get_mpz_t(), mp.get_mpz_t(), prime.get_mpz_t());
    for (std::size_t k = 0; k < acc.size(); ++k) {
      mpz_class diff = mpz_class(g[k]) - acc[k] % prime;
      mpz_class t = (diff * inv) % prime;
      if (t < 0) t += prime;
      acc[k] += modulus * t;
    }
    modulus *= prime;
    std::vector<mpz_class> sym(acc.size());
    mpz_class half = modulus / 2;
    for (std::size_t k = 0; k < acc.size(); ++k) sym[k] = acc[k] > half ? acc[k] - modulus : acc[k];
    std::vector<mpz_class> cand = primitive_part(sym);
    if (cand == last && divides(cand, a) && divides(cand, b)) {
      out = std::move(cand);
      return true;
    }
    last = std::move(cand);
  }
  return false;
}

// Cancels gcd(n, d) for polynomials with nonzero constant terms; false if the modular route gave up.
bool cancel_common(LaurentQ& n, LaurentQ& d) {
  if (n.is_monomial()) return true;
  DenseFrame f = to_dense({&n, &d});
  std::vector<mpz_class> a = primitive_part(f.polys[0]), b = primitive_part(f.polys[1]), g;
  if (!modular_gcd(a, b, g)) return false;
  if (g.size() == 1) return true;
  auto reduced = [&](const std::vector<mpz_class>& p, const std::vector<mpq_class>& orig) {
    std::vector<mpz_class> quo;
    divides(g, p, &quo);
    mpq_class scale = orig.back() / mpq_class(p.back());
    std::vector<mpq_class> out(quo.size());
    for (std::size_t k = 0; k < quo.size(); ++k) out[k] = mpq_class(quo[k]) * scale;
    return from_dense(out, f.step, Frac(0));
  };
  n = reduced(a, f.polys[0]);
  d = reduced(b, f.polys[1]);
  return true;
}

}  // namespace

LaurentQ poly_gcd(const LaurentQ& a, const LaurentQ& b) {
  if (a.is_zero()) return b.is_zero() ? LaurentQ(1) : b.shifted(-b.min_exp());
  if (b.is_zero()) return a.shifted(-a.min_exp());
  if (a.is_monomial() || b.is_monomial()) return LaurentQ(1);
  DenseFrame f = to_dense({&a, &b});
  std::vector<mpq_class> x = f.polys[0], y = f.polys[1], quo, rem;
  {
    std::vector<mpz_class> g;
    if (modular_gcd(primitive_part(x), primitive_part(y), g)) {
      std::vector<mpq_class> gq(g.begin(), g.end());
      std::size_t lo = 0;
      while (lo < gq.size() && gq[lo] == 0) ++lo;
      gq.erase(gq.begin(), gq.begin() + static_cast<long>(lo));
      mpq_class l = gq.back();
      for (auto& c : gq) c /= l;
      return from_dense(gq, f.step, Frac(0));
    }
  }
  if (x.size() < y.size()) std::swap(x, y);
  while (!y.empty()) {
    divmod(x, y, quo, rem);
    x = std::move(y);
    y = std::move(rem);
    // keep coefficients small
    if (!y.empty()) {
      mpq_class l = y.back();
      for (auto& c : y) c /= l;
    }
  }
  mpq_class l = x.back();
  for (auto& c : x) c /= l;
  // strip factors of x (monomials are units)
  std::size_t lo = 0;
  while (lo < x.size() && x[lo] == 0) ++lo;
  x.erase(x.begin(), x.begin() + static_cast<long>(lo));
  return from_dense(x, f.step, Frac(0));
}

LaurentQ exact_div(const LaurentQ& a, const LaurentQ& b) {
  if (b.is_zero()) fail(ErrorCode::DivisionByZero, "Laurent division by zero");
  if (a.is_zero()) return LaurentQ();
  if (b.is_monomial()) {
    mpq_class c = 1 / b.terms_[0].coeff;
    return a.shifted(-b.terms_[0].exp).scaled(c);
  }
  DenseFrame f = to_dense({&a, &b});
  std::vector<mpq_class> quo, rem;
  if (f.polys[0].size() < f.polys[1].size()) fail(ErrorCode::Inconsistent, "inexact Laurent division");
  divmod(f.polys[0], f.polys[1], quo, rem);
  if (!rem.empty()) fail(ErrorCode::Inconsistent, "inexact Laurent division");
  return from_dense(quo, f.step, f.shifts[0] - f.shifts[1]);
}

json LaurentQ::to_json() const {
  json terms = json::array();
  for (const auto& t : terms_)
    terms.push_back(json::array({t.exp.num(), t.exp.den(), mpz_json(t.coeff.get_num()),
                                 mpz_json(t.coeff.get_den())}));
  return json{{"terms", terms}};
}

LaurentQ LaurentQ::from_json(const json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    fail(ErrorCode::ParseError, "Laurent polynomial needs a 'terms' array");
  LaurentQ r;
  for (const auto& t : j["terms"]) {
    if (!t.is_array() || t.size() != 4) fail(ErrorCode::ParseError, "term must have 4 entries");
    Frac e(t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
    mpq_class c(json_mpz(t[2]), json_mpz(t[3]));
    c.canonicalize();
    r += q_power(e, c);
  }
  return r;
}

// ---------------------------------------------------------------- RatQ

RatQ::RatQ(const LaurentQ& n, const LaurentQ& d) : num_(n), den_(d) { normalize(); }

RatQ RatQ::from_frac(const Frac& f) {
  return RatQ(LaurentQ::constant(mpq_class(mpz_class(std::to_string(f.num())),
                                           mpz_class(std::to_string(f.den())))));
}

void RatQ::normalize() {
  if (den_.is_zero()) fail(ErrorCode::DivisionByZero, "zero denominator");
  if (num_.is_zero()) {
    den_ = LaurentQ(1);
    return;
  }
  Frac shift = num_.min_exp() - den_.min_exp();
  LaurentQ n = num_.shifted(-num_.min_exp());
  LaurentQ d = den_.shifted(-den_.min_exp());
  if (!d.is_monomial() && !cancel_common(n, d)) {
    LaurentQ g = poly_gcd(n, d);
    if (!g.is_constant()) {
      n = exact_div(n, g);
      d = exact_div(d, g);
    }
  }
  mpq_class c = d.low_coeff();
  if (c != 1) {
    mpq_class inv = 1 / c;
    n = n.scaled(inv);
    d = d.scaled(inv);
  }
  num_ = n.shifted(shift);
  den_ = std::move(d);
}

bool RatQ::is_one() const { return den_.is_constant() && num_.is_constant() && num_ == den_; }

RatQ RatQ::operator-() const {
  RatQ r(*this);
  r.num_ = -r.num_;
  return r;
}

RatQ& RatQ::operator+=(const RatQ& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (den_.is_constant()) {
      if (num_.is_zero()) den_ = LaurentQ(1);
      return *this;
    }
  } else {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RatQ& RatQ::operator-=(const RatQ& o) { return *this += -o; }

RatQ& RatQ::operator*=(const RatQ& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = RatQ();
  bool plain = den_.is_constant() && o.den_.is_constant();
  num_ = num_ * o.num_;
  if (plain) return *this;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

RatQ& RatQ::operator/=(const RatQ& o) { return *this *= o.inverse(); }

bool operator==(const RatQ& a, const RatQ& b) {
  // Both sides are reduced with a canonical denominator, so the fast structural
  // test is exact; cross-multiplication covers any non-canonical input.
  if (a.num_ == b.num_ && a.den_ == b.den_) return true;
  return a.num_ * b.den_ == b.num_ * a.den_;
}

RatQ RatQ::inverse() const {
  if (is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero");
  return RatQ(den_, num_);
}

RatQ RatQ::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  return RatQ(num_.pow(static_cast<unsigned>(n)), den_.pow(static_cast<unsigned>(n)));
}

RatQ RatQ::bar() const { return RatQ(num_.bar(), den_.bar()); }

double RatQ::eval(double q0) const { return num_.eval(q0) / den_.eval(q0); }

std::string RatQ::str() const {
  if (den_.is_constant() && den_ == LaurentQ(1)) return num_.str();
  std::string n = num_.str(), d = den_.str();
  if (num_.size() > 1) n = "(" + n + ")";
  if (den_.size() > 1) d = "(" + d + ")";
  return n + "/" + d;
}

json RatQ::to_json() const { return json{{"num", num_.to_json()}, {"den", den_.to_json()}}; }

RatQ RatQ::from_json(const json& j) {
  if (!j.is_object() || !j.contains("num")) fail(ErrorCode::ParseError, "scalar needs 'num'");
  LaurentQ n = LaurentQ::from_json(j["num"]);
  LaurentQ d = j.contains("den") ? LaurentQ::from_json(j["den"]) : LaurentQ(1);
  return RatQ(n, d);
}

// ---------------------------------------------------------------- q-numbers

RatQ q_int(const Frac& c, const Frac& base) {
  if (c.is_zero()) return RatQ();
  Frac e = c * base;
  LaurentQ n = LaurentQ::q_power(e) - LaurentQ::q_power(-e);
  LaurentQ d = LaurentQ::q_power(base) - LaurentQ::q_power(-base);
  return RatQ(n, d);
}

RatQ q_factorial(int m, const Frac& base) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "negative q-factorial");
  RatQ r(1);
  for (int k = 1; k <= m; ++k) r *= q_int(Frac(k), base);
  return r;
}

RatQ q_binomial(int m, int k, const Frac& base) {
  if (k < 0 || k > m) fail(ErrorCode::InvalidArgument, "q-binomial needs 0 <= k <= m");
  RatQ r(1);
  for (int j = 1; j <= k; ++j) r *= q_int(Frac(m - k + j), base) / q_int(Frac(j), base);
  return r;
}

// ---------------------------------------------------------------- QMode

QMode QMode::Float(double q0, double tol) {
  if (!(q0 > 0) || q0 == 1.0 || !std::isfinite(q0))
    fail(ErrorCode::InvalidArgument, "float mode needs q0 > 0 and q0 != 1");
  if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "float mode needs tol > 0");
  QMode m;
  m.exact = false;
  m.q0 = q0;
  m.tol = tol;
  return m;
}

std::string QMode::str() const {
  if (exact) return "exact";
  std::ostringstream os;
  os << "float:" << q0 << ":" << tol;
  return os.str();
}

double to_float(const RatQ& a, const QMode& mode) {
  if (mode.exact) fail(ErrorCode::InvalidArgument, "to_float needs a float mode");
  double d = a.den().eval(mode.q0);
  double scale = 0;
  for (const auto& t : a.den().terms()) scale += std::abs(t.coeff.get_d() * std::pow(mode.q0, t.exp.to_double()));
  if (std::abs(d) <= 1e-13 * scale) fail(ErrorCode::PoleAtQ0, "denominator vanishes at q0");
  return a.num().eval(mode.q0) / d;
}

}  // namespace qvo
