#pragma once

#include "qvo/modules.hpp"
#include "qvo/report.hpp"

namespace qvo {

struct DualityData {
  ModulePtr v;
  ModulePtr dual;
  GradedMap eval;        // e_V : V*⊗V -> 1, f⊗v ↦ f(v)
  GradedMap inj;         // ι_V : 1 -> V⊗V*, 1 ↦ Σ b⊗b*
  GradedMap right_eval;  // ẽ_V : V⊗V* -> 1, v⊗f ↦ f(q^{2ρ}v)
  GradedMap right_inj;   // ι̃_V : 1 -> V*⊗V, 1 ↦ Σ b*⊗q^{-2ρ}b
};

// dual defaults to restricted_dual(v).
DualityData make_duality(const ModulePtr& v, ModulePtr dual = nullptr);

// A* : W* -> V* for A : V -> W, assembled from e_W and ι_V.
GradedMap dual_morphism(const GradedMap& a, ModulePtr v_dual = nullptr, ModulePtr w_dual = nullptr);

// qTr_V(Ψ) for Ψ : M⊗V -> M'⊗V, where M = Ψ.source->left and M' = Ψ.target->left.
GradedMap partial_qtrace(const GradedMap& psi, const ModulePtr& v);
// Same, with the outer modules given explicitly.
GradedMap partial_qtrace(const GradedMap& psi, const ModulePtr& m, const ModulePtr& m_prime, const ModulePtr& v);

// Σ_μ dim V[μ] q^{⟨2ρ,μ⟩}
Scalar quantum_dimension(const ModulePtr& v);

CheckResult zigzag_check(const ModulePtr& v);
// ẽ_V = e_V c_{V,V*} (ϑ_V⊗id)
CheckResult right_duality_check(const ModulePtr& v);
// A* equals the transpose, id* = id, (A∘B)* = B*∘A*.
CheckResult dual_functor_check(const GradedMap& a, const GradedMap& b);
// (ϑ_V)* = ϑ_{V*}
CheckResult dual_twist_check(const ModulePtr& v);
// qTr_V(Ψ) commutes with the generators whenever Ψ does.
CheckResult qtrace_intertwiner_check(const GradedMap& psi, const ModulePtr& v);

}  // namespace qvo
