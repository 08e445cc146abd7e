#pragma once

#include <vector>

#include "qvo/modules.hpp"
#include "qvo/report.hpp"

namespace qvo {

using Vec = std::vector<Scalar>;

// Intertwiner M_λ -> M_μ⊗V_1⊗···⊗V_k on truncated Vermas.
struct VertexOp {
  Weight lambda;
  Weight mu;
  std::vector<ModulePtr> spins;
  ModulePtr source;        // truncated M_λ
  ModulePtr target_verma;  // truncated M_μ
  GradedMap map;           // target = M_μ⊗V_1⊗···⊗V_k, flattened left to right
  Vec expectation;         // in V_1⊗···⊗V_k
};

// Shared truncated Verma modules (immutable, cached per weight, height and mode).
ModulePtr cached_verma(const Weight& lambda, int H, const QMode& mode);

Vec unit_vector(int dim, int index);
// Weight of a nonzero vector whose support lies in a single weight space.
Weight vector_weight(const ModulePtr& v, const Vec& x);

// One-point operator with expectation value v ∈ V[ν]; the source is truncated at H and
// the target Verma at H + spread(V) + extra.
VertexOp vertex_from_ev(const Weight& lambda, const ModulePtr& v, const Vec& vec, int H, int extra = 0);
Vec expectation_value(const VertexOp& op);

// (φ_{λ1}^{v1}⊗id)···(φ_{λ_{k-1}}^{v_{k-1}}⊗id) φ_{λ}^{v_k}.
VertexOp k_point(const Weight& lambda, const std::vector<ModulePtr>& spins, const std::vector<Vec>& vecs, int H,
                 int extra = 0);

// j_S(λ) on V_1⊗···⊗V_k; columns are expectation values of k-point operators on basis tensors.
GradedMap fusion_operator(const Weight& lambda, const std::vector<ModulePtr>& spins);
// j_{(V_1..V_{k-1})}(λ - h_k): on v⊗v_k with v_k ∈ V_k[ν] acts as j(λ-ν)⊗id.
GradedMap shifted_fusion(const Weight& lambda, const std::vector<ModulePtr>& spins);

// (q^{2θ(λ)})_V : q^{⟨2(λ+ρ)-μ,μ⟩} on V[μ].
GradedMap q2theta(const Weight& lambda, const ModulePtr& v);

// Checks.
CheckResult round_trip_check(const Weight& lambda, const ModulePtr& v, int H = 1);
CheckResult intertwiner_check(const VertexOp& op);
CheckResult kto1_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int H = 1);
CheckResult fusion_triangular_check(const Weight& lambda, const std::vector<ModulePtr>& spins);
CheckResult spin_functoriality_check(const Weight& lambda, const GradedMap& a, int H = 1);
CheckResult cocycle_check(const Weight& lambda, const std::vector<ModulePtr>& spins);
CheckResult abrr_check(const Weight& lambda, const ModulePtr& v1, const ModulePtr& v2);
CheckResult abrr_dual_check(const Weight& lambda, const ModulePtr& v1, const ModulePtr& v2);
// i is 1-based.
CheckResult qkz_fusion_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int i);
CheckResult operator_qkz_check(const Weight& lambda, const std::vector<ModulePtr>& spins, int i, int H = 1);
// Groups S1, S2, S3 (any may be empty); checked on every basis tensor.
CheckResult three_point_ev_check(const Weight& lambda, const std::vector<ModulePtr>& s1,
                                 const std::vector<ModulePtr>& s2, const std::vector<ModulePtr>& s3);

}  // namespace qvo
