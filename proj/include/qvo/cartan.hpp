#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "qvo/frac.hpp"

namespace qvo {

class CartanData;
using CartanPtr = std::shared_ptr<const CartanData>;

// Element of h* with exact coordinates in both the fundamental-weight basis
// and the simple-root basis.
class Weight {
 public:
  Weight() = default;
  static Weight from_fund(const CartanPtr& c, std::vector<Frac> fund);
  static Weight from_root(const CartanPtr& c, std::vector<Frac> root);
  static Weight from_root_int(const CartanPtr& c, const std::vector<int>& root);

  const CartanPtr& cartan() const { return c_; }
  int rank() const { return static_cast<int>(fund_.size()); }
  const std::vector<Frac>& fund() const { return fund_; }
  const std::vector<Frac>& root() const { return root_; }
  // ⟨μ, α_i^∨⟩
  const Frac& coroot(int i) const { return fund_[static_cast<std::size_t>(i)]; }
  bool is_zero() const;

  Weight operator-() const;
  Weight& operator+=(const Weight& o);
  Weight& operator-=(const Weight& o);
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator*(const Frac& s, const Weight& w);
  friend bool operator==(const Weight& a, const Weight& b) { return a.fund_ == b.fund_; }
  // Lexicographic in fundamental coordinates; a total order for containers.
  friend bool operator<(const Weight& a, const Weight& b) { return a.fund_ < b.fund_; }

  std::string str() const;
  nlohmann::json to_json() const;
  static Weight from_json(const CartanPtr& c, const nlohmann::json& j);

 private:
  void check_same(const Weight& o) const;
  CartanPtr c_;
  std::vector<Frac> fund_;
  std::vector<Frac> root_;
};

class CartanData : public std::enable_shared_from_this<CartanData> {
 public:
  static CartanPtr make(const std::vector<std::vector<int>>& a, const std::string& name = "");
  // "A1", "A2", "B2", "G2" (also "A3", "B3", "C3").
  static CartanPtr preset(const std::string& name);
  static CartanPtr from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::string& name() const { return name_; }
  int rank() const { return rank_; }
  int a(int i, int j) const { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  const std::vector<std::vector<int>>& matrix() const { return a_; }
  int d(int i) const { return d_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& symmetrizer() const { return d_; }
  // Positive roots in simple-root coordinates, sorted by height.
  const std::vector<std::vector<int>>& positive_roots() const { return roots_; }
  const std::vector<std::vector<Frac>>& inverse_matrix() const { return ainv_; }

  Frac pairing(const Weight& mu, const Weight& nu) const;
  Weight zero() const;
  Weight rho() const;
  Weight simple_root(int i) const;
  Weight fundamental(int i) const;
  Weight root(const std::vector<int>& coords) const;
  // Height of a weight in simple-root coordinates.
  Frac height(const Weight& beta) const;
  // ⟨μ, α^∨⟩ for α a positive root given in root coordinates.
  Frac coroot_pairing(const Weight& mu, const std::vector<int>& alpha) const;

  bool is_generic(const Weight& lambda) const;
  bool is_verma_irreducible(const Weight& lambda) const;
  bool is_dominant_integral(const Weight& lambda) const;
  // β ∈ Q+ (non-negative integer root coordinates).
  bool in_positive_cone(const Weight& beta) const;

 private:
  CartanData() = default;
  std::string name_;
  int rank_ = 0;
  std::vector<std::vector<int>> a_;
  std::vector<int> d_;
  std::vector<std::vector<int>> roots_;
  std::vector<std::vector<Frac>> ainv_;
};

}  // namespace qvo
