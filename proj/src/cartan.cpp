#include "qvo/cartan.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <set>

#include "qvo/errors.hpp"

namespace qvo {

// ---------------------------------------------------------------- Weight

Weight Weight::from_fund(const CartanPtr& c, std::vector<Frac> fund) {
  if (static_cast<int>(fund.size()) != c->rank())
    fail(ErrorCode::RankMismatch, "weight has " + std::to_string(fund.size()) + " coordinates, rank is " +
                                      std::to_string(c->rank()));
  Weight w;
  w.c_ = c;
  w.root_.assign(fund.size(), Frac(0));
  const auto& inv = c->inverse_matrix();
  for (std::size_t i = 0; i < fund.size(); ++i)
    for (std::size_t j = 0; j < fund.size(); ++j)
      if (!inv[i][j].is_zero() && !fund[j].is_zero()) w.root_[i] += inv[i][j] * fund[j];
  w.fund_ = std::move(fund);
  return w;
}

Weight Weight::from_root(const CartanPtr& c, std::vector<Frac> root) {
  if (static_cast<int>(root.size()) != c->rank()) fail(ErrorCode::RankMismatch, "root coordinates");
  Weight w;
  w.c_ = c;
  w.fund_.assign(root.size(), Frac(0));
  for (std::size_t i = 0; i < root.size(); ++i)
    for (std::size_t j = 0; j < root.size(); ++j)
      if (!root[j].is_zero()) w.fund_[i] += Frac(c->a(static_cast<int>(i), static_cast<int>(j))) * root[j];
  w.root_ = std::move(root);
  return w;
}

Weight Weight::from_root_int(const CartanPtr& c, const std::vector<int>& root) {
  std::vector<Frac> r(root.begin(), root.end());
  return from_root(c, std::move(r));
}

bool Weight::is_zero() const {
  return std::all_of(fund_.begin(), fund_.end(), [](const Frac& f) { return f.is_zero(); });
}

void Weight::check_same(const Weight& o) const {
  if (fund_.size() != o.fund_.size()) fail(ErrorCode::RankMismatch, "weights of different rank");
  if (c_ && o.c_ && c_ != o.c_ && c_->matrix() != o.c_->matrix())
    fail(ErrorCode::RankMismatch, "weights over different Cartan data");
}

Weight Weight::operator-() const {
  Weight w(*this);
  for (auto& f : w.fund_) f = -f;
  for (auto& f : w.root_) f = -f;
  return w;
}

Weight& Weight::operator+=(const Weight& o) {
  check_same(o);
  for (std::size_t i = 0; i < fund_.size(); ++i) {
    fund_[i] += o.fund_[i];
    root_[i] += o.root_[i];
  }
  return *this;
}

Weight& Weight::operator-=(const Weight& o) {
  check_same(o);
  for (std::size_t i = 0; i < fund_.size(); ++i) {
    fund_[i] -= o.fund_[i];
    root_[i] -= o.root_[i];
  }
  return *this;
}

Weight operator*(const Frac& s, const Weight& w) {
  Weight r(w);
  for (auto& f : r.fund_) f *= s;
  for (auto& f : r.root_) f *= s;
  return r;
}

std::string Weight::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < fund_.size(); ++i) s += (i ? "," : "") + fund_[i].str();
  return s + ")";
}

nlohmann::json Weight::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& f : fund_) a.push_back(nlohmann::json::array({f.num(), f.den()}));
  return a;
}

Weight Weight::from_json(const CartanPtr& c, const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "weight must be an array");
  std::vector<Frac> f;
  for (const auto& x : j) {
    if (x.is_array() && x.size() == 2)
      f.emplace_back(x[0].get<std::int64_t>(), x[1].get<std::int64_t>());
    else if (x.is_string())
      f.push_back(Frac::parse(x.get<std::string>()));
    else if (x.is_number_integer())
      f.emplace_back(x.get<std::int64_t>());
    else
      fail(ErrorCode::ParseError, "weight coordinate must be [num, den], integer or string");
  }
  return Weight::from_fund(c, std::move(f));
}

// ---------------------------------------------------------------- CartanData

namespace {

int max_root_height(int r) {
  static const int coxeter[] = {0, 2, 6, 6, 12, 10, 12, 18, 30};
  if (r <= 8) return coxeter[r] - 1;
  return 2 * r - 1;
}

std::vector<std::vector<Frac>> invert(const std::vector<std::vector<int>>& a) {
  std::size_t n = a.size();
  std::vector<std::vector<Frac>> m(n, std::vector<Frac>(2 * n, Frac(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Frac(a[i][j]);
    m[i][n + i] = Frac(1);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c].is_zero()) ++p;
    if (p == n) fail(ErrorCode::NotFiniteType, "Cartan matrix is singular");
    std::swap(m[p], m[c]);
    Frac inv = Frac(1) / m[c][c];
    for (auto& x : m[c]) x *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c].is_zero()) continue;
      Frac f = m[i][c];
      for (std::size_t k = 0; k < 2 * n; ++k) m[i][k] -= f * m[c][k];
    }
  }
  std::vector<std::vector<Frac>> out(n, std::vector<Frac>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = m[i][n + j];
  return out;
}

}  // namespace

CartanPtr CartanData::make(const std::vector<std::vector<int>>& a, const std::string& name) {
  int r = static_cast<int>(a.size());
  if (r == 0) fail(ErrorCode::InvalidArgument, "empty Cartan matrix");
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != r) fail(ErrorCode::InvalidArgument, "Cartan matrix must be square");
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      int v = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      int w = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (i == j && v != 2) fail(ErrorCode::InvalidArgument, "diagonal entries must be 2");
      if (i != j && v > 0) fail(ErrorCode::InvalidArgument, "off-diagonal entries must be <= 0");
      if (i != j && (v == 0) != (w == 0)) fail(ErrorCode::NotSymmetrizable, "zero pattern is not symmetric");
    }

  // Symmetrizer: d_i a_ij = d_j a_ji, propagated along the Dynkin graph.
  std::vector<Frac> d(static_cast<std::size_t>(r), Frac(0));
  for (int s = 0; s < r; ++s) {
    if (!d[static_cast<std::size_t>(s)].is_zero()) continue;
    d[static_cast<std::size_t>(s)] = Frac(1);
    std::queue<int> todo;
    todo.push(s);
    while (!todo.empty()) {
      int i = todo.front();
      todo.pop();
      for (int j = 0; j < r; ++j) {
        int aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        int aji = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        if (i == j || aij == 0) continue;
        Frac dj = d[static_cast<std::size_t>(i)] * Frac(aij) / Frac(aji);
        if (d[static_cast<std::size_t>(j)].is_zero()) {
          d[static_cast<std::size_t>(j)] = dj;
          todo.push(j);
        } else if (!(d[static_cast<std::size_t>(j)] == dj)) {
          fail(ErrorCode::NotSymmetrizable, "no diagonal symmetrizer exists");
        }
      }
    }
  }
  std::int64_t L = 1;
  for (const auto& x : d) L = lcm64(L, x.den());
  std::int64_t G = 0;
  for (const auto& x : d) G = gcd64(G, (x * Frac(L)).num());

  auto c = std::shared_ptr<CartanData>(new CartanData());
  c->name_ = name;
  c->rank_ = r;
  c->a_ = a;
  for (const auto& x : d) c->d_.push_back(static_cast<int>((x * Frac(L)).num() / G));
  c->ainv_ = invert(a);

  // Positive roots: close the simple roots under simple reflections.
  int hmax = max_root_height(r);
  std::set<std::vector<int>> seen;
  std::queue<std::vector<int>> todo;
  for (int i = 0; i < r; ++i) {
    std::vector<int> e(static_cast<std::size_t>(r), 0);
    e[static_cast<std::size_t>(i)] = 1;
    seen.insert(e);
    todo.push(e);
  }
  while (!todo.empty()) {
    auto b = todo.front();
    todo.pop();
    for (int i = 0; i < r; ++i) {
      int cpair = 0;
      for (int j = 0; j < r; ++j) cpair += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)];
      if (cpair == 0) continue;
      auto s = b;
      s[static_cast<std::size_t>(i)] -= cpair;
      if (std::any_of(s.begin(), s.end(), [](int x) { return x < 0; })) continue;
      if (seen.count(s)) continue;
      int h = std::accumulate(s.begin(), s.end(), 0);
      if (h > hmax) fail(ErrorCode::NotFiniteType, "root enumeration exceeded the height bound");
      seen.insert(s);
      todo.push(s);
    }
  }
  c->roots_.assign(seen.begin(), seen.end());
  std::stable_sort(c->roots_.begin(), c->roots_.end(), [](const auto& x, const auto& y) {
    int hx = std::accumulate(x.begin(), x.end(), 0), hy = std::accumulate(y.begin(), y.end(), 0);
    if (hx != hy) return hx < hy;
    return x > y;
  });
  return c;
}

CartanPtr CartanData::preset(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, CartanPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> a;
  if (name == "A1") a = {{2}};
  else if (name == "A2") a = {{2, -1}, {-1, 2}};
  else if (name == "B2") a = {{2, -1}, {-2, 2}};
  else if (name == "G2") a = {{2, -1}, {-3, 2}};
  else if (name == "A3") a = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  else if (name == "B3") a = {{2, -1, 0}, {-1, 2, -1}, {0, -2, 2}};
  else if (name == "C3") a = {{2, -1, 0}, {-1, 2, -2}, {0, -1, 2}};
  else fail(ErrorCode::UnknownName, "unknown Cartan preset '" + name + "'");
  auto c = make(a, name);
  cache[name] = c;
  return c;
}

CartanPtr CartanData::from_json(const nlohmann::json& j) {
  const nlohmann::json& body = j.contains("cartan") ? j["cartan"] : j;
  if (body.is_string()) return preset(body.get<std::string>());
  if (!body.is_object() || !body.contains("A")) fail(ErrorCode::ParseError, "cartan needs 'A'");
  return make(body["A"].get<std::vector<std::vector<int>>>(), body.value("name", std::string()));
}

nlohmann::json CartanData::to_json() const {
  nlohmann::json body{{"A", a_}};
  if (!name_.empty()) body["name"] = name_;
  return nlohmann::json{{"cartan", body}};
}

Frac CartanData::pairing(const Weight& mu, const Weight& nu) const {
  if (mu.rank() != rank_ || nu.rank() != rank_) fail(ErrorCode::RankMismatch, "pairing rank mismatch");
  Frac s(0);
  for (int j = 0; j < rank_; ++j) {
    const Frac& r = nu.root()[static_cast<std::size_t>(j)];
    const Frac& f = mu.fund()[static_cast<std::size_t>(j)];
    if (!r.is_zero() && !f.is_zero()) s += r * Frac(d_[static_cast<std::size_t>(j)]) * f;
  }
  return s;
}

Weight CartanData::zero() const {
  return Weight::from_fund(shared_from_this(), std::vector<Frac>(static_cast<std::size_t>(rank_), Frac(0)));
}

Weight CartanData::rho() const {
  return Weight::from_fund(shared_from_this(), std::vector<Frac>(static_cast<std::size_t>(rank_), Frac(1)));
}

Weight CartanData::simple_root(int i) const {
  std::vector<int> e(static_cast<std::size_t>(rank_), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Weight::from_root_int(shared_from_this(), e);
}

Weight CartanData::fundamental(int i) const {
  std::vector<Frac> e(static_cast<std::size_t>(rank_), Frac(0));
  e[static_cast<std::size_t>(i)] = Frac(1);
  return Weight::from_fund(shared_from_this(), e);
}

Weight CartanData::root(const std::vector<int>& coords) const {
  return Weight::from_root_int(shared_from_this(), coords);
}

Frac CartanData::height(const Weight& beta) const {
  Frac h(0);
  for (const auto& x : beta.root()) h += x;
  return h;
}

Frac CartanData::coroot_pairing(const Weight& mu, const std::vector<int>& alpha) const {
  Weight a = root(alpha);
  return Frac(2) * pairing(mu, a) / pairing(a, a);
}

bool CartanData::is_generic(const Weight& lambda) const {
  for (const auto& a : roots_)
    if (coroot_pairing(lambda, a).is_integer()) return false;
  return true;
}

bool CartanData::is_verma_irreducible(const Weight& lambda) const {
  Weight l = lambda + rho();
  for (const auto& a : roots_) {
    Frac c = coroot_pairing(l, a);
    if (c.is_integer() && c.num() > 0) return false;
  }
  return true;
}

bool CartanData::is_dominant_integral(const Weight& lambda) const {
  return std::all_of(lambda.fund().begin(), lambda.fund().end(),
                     [](const Frac& f) { return f.is_integer() && f.num() >= 0; });
}

bool CartanData::in_positive_cone(const Weight& beta) const {
  return std::all_of(beta.root().begin(), beta.root().end(),
                     [](const Frac& f) { return f.is_integer() && f.num() >= 0; });
}

}  // namespace qvo
