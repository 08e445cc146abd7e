#include "helpers.hpp"
#include "qvo/rmatrix.hpp"
#include "qvo/vertexops.hpp"

using namespace qvo;
using namespace qvo::test;

namespace {

Weight a1_weight(const Frac& l) { return fund(A1(), {l}); }

}  // namespace

TEST_SUITE("vertexops") {
  TEST_CASE("extremal expectation gives no lower terms") {
    auto c = A1();
    Weight lambda = a1_weight(Frac(1, 3));
    ModulePtr l = spec(c, "L(1)");
    int hi = index_of(l, c->fundamental(0));
    VertexOp op = vertex_from_ev(lambda, l, unit_vector(2, hi), 2);
    int top = index_of(op.source, lambda);
    int mtop = index_of(op.target_verma, op.mu);
    CHECK(op.mu == lambda - c->fundamental(0));
    for (int r = 0; r < op.map.mat.rows(); ++r) {
      Scalar expect = r == mtop * 2 + hi ? Scalar(1) : Scalar(0);
      CHECK(op.map.mat.get(r, top) == expect);
    }
    CHECK(intertwiner_check(op).pass);
    CHECK(round_trip_check(lambda, l, 2).pass);
    CHECK(round_trip_check(fund(A2(), {Frac(1, 3), Frac(1, 3)}), spec(A2(), "L(1,0)"), 1).pass);
  }

  TEST_CASE("lowest vector expectation: one-unknown solve") {
    // φ(m_λ) = m_μ⊗v_- + a F m_μ⊗v_+; Δ(E) = E⊗K + 1⊗E kills it.
    auto c = A1();
    for (Frac lf : {Frac(1, 3), Frac(2, 5), Frac(-7, 4)}) {
      Weight lambda = a1_weight(lf);
      ModulePtr l = spec(c, "L(1)");
      int hi = index_of(l, c->fundamental(0)), lo = index_of(l, -c->fundamental(0));
      VertexOp op = vertex_from_ev(lambda, l, unit_vector(2, lo), 1);
      const ModulePtr& m = op.target_verma;
      int mtop = index_of(m, op.mu), m1 = index_of(m, op.mu - c->simple_root(0));
      Scalar f = m->F[0].get(m1, mtop);
      Scalar ef = m->E[0].get(mtop, m1) * f;  // E F m_μ = ef m_μ
      Scalar kv = qp(1);                       // K v_+ = q v_+
      Scalar e_v = l->E[0].get(hi, lo);        // E v_- = e_v v_+
      Scalar a = -e_v / (ef * kv);
      int top = index_of(op.source, lambda);
      CHECK(op.map.mat.get(m1 * 2 + hi, top) == a * f);
      CHECK(op.map.mat.get(mtop * 2 + lo, top) == Scalar(1));
      // closed form
      CHECK(a == -(Scalar(1) / (qp(1) * Scalar(q_int(lf + Frac(1))))));
    }
  }

  TEST_CASE("two-point operators") {
    auto c = A1();
    Weight lambda = a1_weight(Frac(1, 3));
    ModulePtr l = spec(c, "L(1)");
    int hi = index_of(l, c->fundamental(0));
    VertexOp op = k_point(lambda, {l, l}, {unit_vector(2, hi), unit_vector(2, hi)}, 1);
    Vec ev = expectation_value(op);
    for (int r = 0; r < 4; ++r) CHECK(ev[static_cast<std::size_t>(r)] == (r == hi * 2 + hi ? Scalar(1) : Scalar(0)));
    CHECK(kto1_check(lambda, {l, l}).pass);
    CHECK(kto1_check(fund(A2(), {Frac(1, 3), Frac(1, 3)}), {spec(A2(), "L(1,0)"), spec(A2(), "L(0,1)")}).pass);
  }

  TEST_CASE("fusion operator") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    for (Frac lf : {Frac(1, 3), Frac(2, 5)}) {
      Weight lambda = a1_weight(lf);
      require_equal(fusion_operator(lambda, {l}).mat, Matrix::identity(2));
      CHECK(fusion_triangular_check(lambda, {l, l}).pass);
      GradedMap j = fusion_operator(lambda, {l, l});
      int hi = index_of(l, c->fundamental(0)), lo = index_of(l, -c->fundamental(0));
      // (φ^{hi}⊗1)φ^{lo}: the lower term F m⊗hi picks up K^{-1} on the top of M_λ
      Scalar cl = -(Scalar(1) / (qp(1) * Scalar(q_int(lf + Frac(1)))));
      CHECK(j.mat.get(lo * 2 + hi, hi * 2 + lo) == cl * qp(-lf));
      CHECK(j.mat.get(hi * 2 + lo, hi * 2 + lo) == Scalar(1));
      CHECK(j.mat.get(hi * 2 + hi, hi * 2 + hi) == Scalar(1));
    }
    CHECK(fusion_triangular_check(fund(A2(), {Frac(1, 3), Frac(1, 3)}), {spec(A2(), "L(1,0)"), spec(A2(), "L(0,1)")}).pass);
  }

  TEST_CASE("spin functoriality") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    Weight lambda = a1_weight(Frac(2, 5));
    CHECK(spin_functoriality_check(lambda, braiding(l, l)).pass);
    CHECK(spin_functoriality_check(lambda, ribbon_op(spec(c, "L(2)"))).pass);
  }

  TEST_CASE("fusion cocycle") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    Weight lambda = a1_weight(Frac(1, 3));
    CHECK(cocycle_check(lambda, {l, l}).pass);
    CHECK(cocycle_check(lambda, {l, l, l}).pass);
    CHECK(cocycle_check(fund(A2(), {Frac(1, 3), Frac(1, 3)}), {spec(A2(), "L(1,0)"), spec(A2(), "L(1,0)")}).pass);
  }

  TEST_CASE("ABRR equations") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)"), l2 = spec(c, "L(2)");
    for (Frac lf : {Frac(1, 3), Frac(2, 5), Frac(-7, 4)}) {
      Weight lambda = a1_weight(lf);
      CHECK(abrr_check(lambda, l, l).pass);
      CHECK(abrr_dual_check(lambda, l, l).pass);
      CHECK(abrr_check(lambda, l, l2).pass);
    }
    // V2 trivial: j is the identity and both sides collapse
    Weight lambda = a1_weight(Frac(1, 3));
    ModulePtr triv = trivial_module(c);
    CHECK(abrr_check(lambda, l, triv).pass);
    require_equal(fusion_operator(lambda, {l, triv}).mat, Matrix::identity(2));
    CHECK(abrr_check(fund(A2(), {Frac(1, 3), Frac(1, 3)}), spec(A2(), "L(1,0)"), spec(A2(), "L(0,1)")).pass);
  }

  TEST_CASE("qKZ") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    Weight lambda = a1_weight(Frac(1, 3));
    CHECK(qkz_fusion_check(lambda, {l}, 1).pass);
    CHECK(qkz_fusion_check(lambda, {l, l}, 2).pass);
    for (int i = 1; i <= 3; ++i) CHECK(qkz_fusion_check(lambda, {l, l, l}, i).pass);
    CHECK(operator_qkz_check(lambda, {l}, 1).pass);
    CHECK(operator_qkz_check(lambda, {l, l}, 1).pass);
    CHECK(operator_qkz_check(lambda, {l, l}, 2).pass);
    CHECK_THROWS_AS(operator_qkz_check(lambda, {l}, 2), Error);
    CHECK(three_point_ev_check(lambda, {l}, {l}, {l}).pass);
    CHECK(three_point_ev_check(lambda, {}, {l}, {l}).pass);
  }

  TEST_CASE("float mode") {
    QMode f = QMode::Float(0.83, 1e-9);
    ModulePtr l = spec(A1(), "L(1)", f);
    Weight lambda = a1_weight(Frac(1, 3));
    CheckResult r = abrr_check(lambda, l, l);
    CHECK(r.pass);
    CHECK(r.mode == "float");
  }
}
