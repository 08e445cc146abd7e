#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qvo/cartan.hpp"
#include "qvo/matrix.hpp"

namespace qvo {

// Margin value for basis vectors on which every F-word acts exactly.
constexpr int kExactMargin = 1 << 28;

struct BasisVector {
  std::string label;
  Weight weight;
  // Number of further F_i applications that are known to be exact.
  int margin = kExactMargin;
  // Highest-weight constructions: this vector equals F_{parent_gen} basis[parent].
  int parent = -1;
  int parent_gen = -1;
};

enum class ModuleKind { Trivial, Verma, Simple, Tensor, Dual, Custom };

struct WeightModule;
using ModulePtr = std::shared_ptr<const WeightModule>;

struct WeightModule {
  CartanPtr cartan;
  QMode mode;
  ModuleKind kind = ModuleKind::Custom;
  std::string name;
  std::vector<BasisVector> basis;
  std::vector<Matrix> E;
  std::vector<Matrix> F;
  std::optional<Weight> highest_weight;
  int highest_index = -1;
  int truncation = -1;  // H for truncated Vermas
  ModulePtr left, right;  // tensor factors, or left = original for duals
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(basis.size()); }
  int rank() const { return cartan->rank(); }
  const Weight& weight(int b) const { return basis[static_cast<std::size_t>(b)].weight; }
  bool is_finite() const;
  // Height difference between the highest and lowest weights (finite modules);
  // for modules containing a truncated Verma factor, the sum over finite factors.
  int spread() const;
  int min_margin() const;

  // Basis indices grouped by weight.
  std::map<Weight, std::vector<int>> weight_spaces() const;

  // diag(q^{f(wt b)}).
  Matrix q_diag(const std::function<Frac(const Weight&)>& f) const;
  // K_i^{power} = q^{power d_i h_i}, acting on M[μ] by q^{power ⟨μ,α_i⟩}.
  Matrix K(int i, int power = 1) const;
  // Columns on which F_i is exact.
  std::vector<char> f_valid() const;

  nlohmann::json to_json() const;
};

// Weight-graded linear map. valid[j] marks source basis vectors whose image
// is known exactly (empty = all exact).
struct GradedMap {
  ModulePtr source;
  ModulePtr target;
  Matrix mat;
  Weight degree;
  std::vector<char> valid;

  bool all_valid() const;
  bool is_valid(int j) const { return valid.empty() || valid[static_cast<std::size_t>(j)]; }
  int valid_count() const;
  nlohmann::json to_json() const;
};

ModulePtr trivial_module(const CartanPtr& c, const QMode& mode = QMode::Exact());
ModulePtr verma(const Weight& lambda, int H, const QMode& mode = QMode::Exact());
ModulePtr simple_fd(const Weight& lambda, const QMode& mode = QMode::Exact());
ModulePtr tensor(const ModulePtr& m, const ModulePtr& n);
ModulePtr tensor_all(const std::vector<ModulePtr>& ms, const CartanPtr& c, const QMode& mode);
ModulePtr restricted_dual(const ModulePtr& v);
ModulePtr module_from_json(const nlohmann::json& j, const QMode& mode);

// Named construction used by the CLI and diagram environments:
//   "L(a,b)"  simple module with highest weight in fundamental coordinates,
//   "M(a/b,c/d):H"  truncated Verma, "1" the unit object.
ModulePtr module_from_spec(const CartanPtr& c, const std::string& spec, const QMode& mode);

struct RelationCheck {
  std::string relation;
  bool pass = true;
  double max_residual = 0.0;
  int compared = 0;
  int untestable = 0;
  std::string witness;
};

struct ModuleReport {
  std::vector<RelationCheck> checks;
  bool pass() const;
  nlohmann::json to_json() const;
};

ModuleReport check_module(const WeightModule& m);

// Map constructors and algebra.
GradedMap identity_map(const ModulePtr& m);
GradedMap make_map(const ModulePtr& src, const ModulePtr& tgt, Matrix mat, const Weight& degree);
// a ∘ b
GradedMap compose(const GradedMap& a, const GradedMap& b);
GradedMap tensor_maps(const GradedMap& a, const GradedMap& b);
// Kronecker product of two maps whose tensor source/target modules are supplied.
GradedMap tensor_maps(const GradedMap& a, const GradedMap& b, const ModulePtr& src, const ModulePtr& tgt);
GradedMap add_maps(const GradedMap& a, const GradedMap& b);
GradedMap scale_map(const GradedMap& a, const Scalar& s);
CompareResult compare_maps(const GradedMap& a, const GradedMap& b);
// Generator action on a module, as a graded map of degree ±α_i.
GradedMap e_map(const ModulePtr& m, int i);
GradedMap f_map(const ModulePtr& m, int i);

// Exactness mask for a product of matrices given per-factor masks (rightmost applied first).
std::vector<char> compose_valid(const Matrix& b, const std::vector<char>& va, const std::vector<char>& vb);

}  // namespace qvo
