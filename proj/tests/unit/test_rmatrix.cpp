#include "helpers.hpp"
#include "qvo/rmatrix.hpp"

using namespace qvo;
using namespace qvo::test;

namespace {

GradedMap endo(const ModulePtr& m, Matrix a) { return GradedMap{m, m, std::move(a), m->cartan->zero(), {}}; }

}  // namespace

TEST_SUITE("rmatrix") {
  TEST_CASE("kappa") {
    auto c = A1();
    Weight lambda = fund(c, {Frac(1, 3)});
    ModulePtr m = verma(lambda, 2);
    GradedMap k = kappa_op(m, m);
    int top = index_of(m, lambda);
    int tt = top * m->dim() + top;
    CHECK(k.mat.get(tt, tt) == qp(c->pairing(lambda, lambda)));

    ModulePtr l = spec(c, "L(1)"), triv = trivial_module(c);
    require_equal(kappa_op(triv, l).mat, Matrix::identity(2));
    // L⊗L in the basis (hi,hi), (hi,lo), (lo,hi), (lo,lo)
    int hi = index_of(l, c->fundamental(0));
    REQUIRE(hi == 0);
    Matrix expect = Matrix::diagonal({qp(Frac(1, 2)), qp(Frac(-1, 2)), qp(Frac(-1, 2)), qp(Frac(1, 2))});
    require_equal(kappa_op(l, l).mat, expect);
  }

  TEST_CASE("quasi-R blocks") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    auto blocks = quasi_r_blocks(l, l);
    require_equal(blocks.front().mat, Matrix::identity(4));
    CHECK(blocks.size() <= 2);
    auto coeffs = quasi_r_coefficients(c, QMode::Exact(), 3);
    CHECK(coeffs.front().coeff.get(0, 0) == Scalar(1));
  }

  TEST_CASE("quasi-R degree one coefficient matches a one-unknown solve") {
    // R̄ = 1 + x E⊗F on L⊗L; R̄Δ(E) = Δ̄(E)R̄ with Δ(E) = E⊗K + 1⊗E, Δ̄(E) = E⊗K^{-1} + 1⊗E.
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    Matrix E = l->E[0], F = l->F[0], K = l->K(0), Ki = l->K(0, -1), I = Matrix::identity(2);
    Matrix dE = kron(E, K) + kron(I, E), dbE = kron(E, Ki) + kron(I, E);
    Matrix B = kron(E, F);
    // (1 + xB) dE = dbE (1 + xB)  ⇔  x (B dE - dbE B) = dbE - dE
    Matrix lhs = B * dE - dbE * B, rhs = dbE - dE;
    Scalar x;
    bool found = false;
    for (int r = 0; r < 4 && !found; ++r)
      for (int k = 0; k < 4 && !found; ++k)
        if (!lhs.get(r, k).is_zero()) {
          x = rhs.get(r, k) / lhs.get(r, k);
          found = true;
        }
    REQUIRE(found);
    Matrix expect = Matrix::identity(4) + B.scaled(x);
    require_equal(quasi_r_op(l, l).mat, expect);
    // the solved x is q - q^{-1}
    CHECK(x == qp(1) - qp(-1));
  }

  TEST_CASE("R-matrix") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)"), triv = trivial_module(c);
    require_equal(r_op(triv, l).mat, Matrix::identity(2));
    require_equal(braiding(triv, l).mat, Matrix::identity(2));
    CHECK(delta_op_check(l, l).pass);
    CHECK(r_inverse_check(l, l).pass);
    CHECK(r_coproduct_check(l, l, l, 1).pass);
    CHECK(r_coproduct_check(l, l, l, 2).pass);
    CHECK(ybe_check(l, l, l).pass);
    CHECK(hexagon_check(l, spec(c, "L(2)"), l, 1).pass);
    CHECK(hexagon_check(l, spec(c, "L(2)"), l, 2).pass);
    CHECK(braiding_intertwines_check(l, spec(c, "L(2)")).pass);
    auto a2 = A2();
    ModulePtr v = spec(a2, "L(1,0)"), w = spec(a2, "L(0,1)");
    CHECK(ybe_check(v, w, v).pass);
    CHECK(delta_op_check(v, w).pass);
  }

  TEST_CASE("braiding on a top vector") {
    auto c = A1();
    Weight lambda = fund(c, {Frac(2, 5)});
    ModulePtr m = verma(lambda, 3), l = spec(c, "L(2)");
    Weight nu = Frac(2) * c->fundamental(0);
    int mt = index_of(m, lambda), lt = index_of(l, nu);
    GradedMap b = braiding(m, l);
    int col = mt * l->dim() + lt;
    int flipped = lt * m->dim() + mt;
    CHECK(b.mat.get(flipped, col) == qp(c->pairing(lambda, nu)));
    for (int r = 0; r < b.mat.rows(); ++r)
      if (r != flipped) CHECK(b.mat.get(r, col).is_zero());
    CHECK(ybe_check(m, l, spec(c, "L(1)")).pass);
  }

  TEST_CASE("ribbon element") {
    auto c = A1();
    Weight lambda = fund(c, {Frac(1, 3)});
    ModulePtr m = verma(lambda, 4);
    require_equal(ribbon_op(m).mat, Matrix::identity(m->dim()).scaled(qp(c->pairing(lambda, lambda + Frac(2) * c->rho()))));
    require_equal(ribbon_op(trivial_module(c)).mat, Matrix::identity(1));
    require_equal(ribbon_op(spec(c, "L(1)")).mat, Matrix::identity(2).scaled(qp(Frac(3, 2))));
    // second route: Drinfeld element
    CHECK(drinfeld_twist_check(m).pass);
    CHECK(drinfeld_twist_check(spec(c, "L(2)")).pass);
    CHECK(drinfeld_twist_check(verma(fund(A2(), {Frac(1, 3), Frac(2, 5)}), 3)).pass);
    CHECK(ribbon_central_check(m).pass);
    // decomposition route on an irreducible module agrees with the scalar
    ModulePtr l2 = spec(c, "L(2)");
    require_equal(ribbon_by_decomposition(l2).mat, ribbon_op(l2).mat);
  }

  TEST_CASE("twist coherence") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    CHECK(twist_coherence_check(l, l).pass);
    CHECK(twist_coherence_check(trivial_module(c), l).pass);
    CHECK(twist_coherence_check(verma(fund(c, {Frac(1, 3)}), 3), l).pass);
    CHECK(twist_coherence_check(spec(A2(), "L(1,0)"), spec(A2(), "L(0,1)")).pass);
  }

  TEST_CASE("naturality and inverse") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    GradedMap s = endo(l, Matrix::identity(2).scaled(qp(1) + qp(-1)));
    CHECK(r_naturality_check(s, spec(c, "L(2)")).pass);
    GradedMap cinv = braiding_inverse(l, l);
    require_equal(compose(cinv, braiding(l, l)).mat, Matrix::identity(4));
  }

  TEST_CASE("float mode") {
    QMode f = QMode::Float(0.83, 1e-9);
    auto c = A2();
    ModulePtr v = spec(c, "L(1,0)", f);
    CheckResult r = ybe_check(v, v, v);
    CHECK(r.pass);
    CHECK(r.max_residual < 1e-9);
  }
}
