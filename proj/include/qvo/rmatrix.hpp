#pragma once

#include <vector>

#include "qvo/modules.hpp"
#include "qvo/report.hpp"

namespace qvo {

// Quasi-R component of degree β, written in word bases:
//   R̄_β = Σ_{a,b} coeff(a,b) E_{u_a} ⊗ F_{w_b}.
// Words are operator products read left to right.
struct QuasiRDegree {
  std::vector<int> beta;
  std::vector<std::vector<int>> e_words;
  std::vector<std::vector<int>> f_words;
  Matrix coeff;
};

// Universal coefficients up to the given height, solved degree by degree on
// a generic truncated Verma pair and cached per (Cartan type, mode).
std::vector<QuasiRDegree> quasi_r_coefficients(const CartanPtr& c, const QMode& mode, int height);

// Cap on the cached height; larger requests raise TruncationTooSmall.
constexpr int kMaxQuasiRHeight = 64;

// Height difference between the highest and lowest weights of M.
int height_span(const WeightModule& m);

GradedMap kappa_op(const ModulePtr& m, const ModulePtr& n, int power = 1);
// Per-degree blocks of R̄ on M⊗N (degree 0 first).
std::vector<GradedMap> quasi_r_blocks(const ModulePtr& m, const ModulePtr& n);
GradedMap quasi_r_op(const ModulePtr& m, const ModulePtr& n);
GradedMap r_op(const ModulePtr& m, const ModulePtr& n);
// Inverse from the antipode formula.
GradedMap r_inverse(const ModulePtr& m, const ModulePtr& n);
// Inverse of a degree-0 endomorphism, block by weight space.
GradedMap graded_inverse(const GradedMap& a);
// c_{M,N} = P R : M⊗N -> N⊗M.
GradedMap braiding(const ModulePtr& m, const ModulePtr& n);
// c_{M,N}^{-1} : N⊗M -> M⊗N.
GradedMap braiding_inverse(const ModulePtr& m, const ModulePtr& n);
// R^{21} on V1⊗V2, i.e. flip ∘ R_{V2,V1} ∘ flip.
GradedMap r21_op(const ModulePtr& v1, const ModulePtr& v2);
GradedMap r21_inverse(const ModulePtr& v1, const ModulePtr& v2);
GradedMap flip_map(const ModulePtr& m, const ModulePtr& n);

// ϑ_M: scalar on highest-weight modules, singular-vector decomposition otherwise.
GradedMap ribbon_op(const ModulePtr& m, bool inverse = false);
// Always uses the decomposition (for cross-checks against the scalar path).
GradedMap ribbon_by_decomposition(const ModulePtr& m, bool inverse = false);

// Operators on a flattened tensor product of several modules ("legs").
// full is the tensor product of the legs; built on demand when null.
GradedMap embed_legs(const std::vector<ModulePtr>& legs, const std::vector<std::pair<int, GradedMap>>& ops,
                     ModulePtr full = nullptr);
// R with first tensor factor on leg x and second on leg y (x ≠ y).
GradedMap r_on_legs(const std::vector<ModulePtr>& legs, int x, int y, ModulePtr full = nullptr);
GradedMap r_inverse_on_legs(const std::vector<ModulePtr>& legs, int x, int y, ModulePtr full = nullptr);
GradedMap kappa_on_legs(const std::vector<ModulePtr>& legs, int x, int y, int power, ModulePtr full = nullptr);

// Identity checks.
CheckResult ybe_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w);
CheckResult hexagon_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w, int which);
CheckResult delta_op_check(const ModulePtr& m, const ModulePtr& n);
CheckResult r_inverse_check(const ModulePtr& m, const ModulePtr& n);
CheckResult braiding_intertwines_check(const ModulePtr& m, const ModulePtr& n);
// (Δ⊗id)R = R^{13}R^{23} and (id⊗Δ)R = R^{13}R^{12}.
CheckResult r_coproduct_check(const ModulePtr& u, const ModulePtr& v, const ModulePtr& w, int which);
CheckResult twist_coherence_check(const ModulePtr& m, const ModulePtr& n);
CheckResult ribbon_central_check(const ModulePtr& m);
// Drinfeld element u = m(S⊗id)R21 against the twist: u ϑ = K_{2ρ}.
CheckResult drinfeld_twist_check(const ModulePtr& m);
// (A⊗id) R_{M,N} = R_{M',N} (A⊗id) for an intertwiner A : M -> M'.
CheckResult r_naturality_check(const GradedMap& a, const ModulePtr& n);

}  // namespace qvo
