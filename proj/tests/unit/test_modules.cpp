#include "helpers.hpp"

using namespace qvo;
using namespace qvo::test;

namespace {

int untestable(const ModuleReport& r) {
  int n = 0;
  for (const auto& c : r.checks) n += c.untestable;
  return n;
}

}  // namespace

TEST_SUITE("modules") {
  TEST_CASE("A1 Verma: E F^n m = [n][λ-n+1] F^{n-1} m") {
    auto c = A1();
    Frac l(1, 3);
    Weight lambda = fund(c, {l});
    ModulePtr m = verma(lambda, 4);
    REQUIRE(m->dim() == 5);
    Weight alpha = c->simple_root(0);
    for (int n = 1; n <= 4; ++n) {
      int from = index_of(m, lambda - Frac(n) * alpha);
      int to = index_of(m, lambda - Frac(n - 1) * alpha);
      RatQ expect = q_int(Frac(n)) * q_int(l - Frac(n) + Frac(1));
      CHECK(m->E[0].get(to, from) == Scalar(expect));
    }
    int top = index_of(m, lambda);
    for (int r = 0; r < m->dim(); ++r) CHECK(m->E[0].get(r, top).is_zero());
    CHECK(m->E[0].get(0, 0).is_zero());
  }

  TEST_CASE("highest vector is killed by every E_i") {
    for (auto c : {A1(), A2(), B2()}) {
      std::vector<Frac> f(static_cast<std::size_t>(c->rank()), Frac(1, 4));
      Weight lambda = fund(c, f);
      ModulePtr m = verma(lambda, 2);
      int top = index_of(m, lambda);
      for (int i = 0; i < c->rank(); ++i)
        for (int r = 0; r < m->dim(); ++r) CHECK(m->E[static_cast<std::size_t>(i)].get(r, top).is_zero());
    }
  }

  TEST_CASE("A2 Verma weight multiplicity") {
    auto c = A2();
    Weight lambda = fund(c, {Frac(1, 3), Frac(2, 5)});
    ModulePtr m = verma(lambda, 3);
    auto ws = m->weight_spaces();
    // Kostant partitions of α1+α2: {α1+α2}, {α1, α2}
    CHECK(ws.at(lambda - c->simple_root(0) - c->simple_root(1)).size() == 2);
    CHECK(ws.at(lambda - Frac(2) * c->simple_root(0)).size() == 1);
  }

  TEST_CASE("simple finite-dimensional modules") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)");
    REQUIRE(l->dim() == 2);
    Weight w = c->fundamental(0);
    int hi = index_of(l, w), lo = index_of(l, -w);
    CHECK(l->E[0].get(hi, lo) == Scalar(1));
    CHECK(l->E[0].get(lo, hi).is_zero());

    ModulePtr triv = spec(c, "L(0)");
    CHECK(triv->dim() == 1);
    CHECK(triv->E[0].get(0, 0).is_zero());
    CHECK(triv->F[0].get(0, 0).is_zero());

    auto a2 = A2();
    ModulePtr v = spec(a2, "L(1,0)");
    REQUIRE(v->dim() == 3);
    Weight w1 = a2->fundamental(0), a1 = a2->simple_root(0), a2r = a2->simple_root(1);
    index_of(v, w1);
    index_of(v, w1 - a1);
    index_of(v, w1 - a1 - a2r);
    // Weyl dimension formula for B2 and G2 fundamentals
    CHECK(spec(B2(), "L(1,0)")->dim() * spec(B2(), "L(0,1)")->dim() == 20);
    CHECK(spec(CartanData::preset("G2"), "L(1,0)")->dim() + spec(CartanData::preset("G2"), "L(0,1)")->dim() == 21);
  }

  TEST_CASE("tensor products") {
    auto c = A1();
    ModulePtr l = spec(c, "L(1)"), triv = trivial_module(c);
    ModulePtr m = verma(fund(c, {Frac(1, 3)}), 3);
    ModulePtr tm = tensor(triv, m);
    REQUIRE(tm->dim() == m->dim());
    require_equal(tm->E[0], m->E[0]);
    require_equal(tm->F[0], m->F[0]);
    ModulePtr ll = tensor(l, l);
    CHECK(ll->weight_spaces().at(c->zero()).size() == 2);
    CHECK(check_module(*ll).pass());
    CHECK(check_module(*tensor(spec(A2(), "L(1,0)"), spec(A2(), "L(0,1)"))).pass());
    CHECK(tensor_all({}, c, QMode::Exact())->dim() == 1);
  }

  TEST_CASE("restricted duals") {
    auto c = A1();
    ModulePtr triv = trivial_module(c);
    ModulePtr td = restricted_dual(triv);
    CHECK(td->dim() == 1);
    CHECK(td->weight(0).is_zero());
    ModulePtr l = spec(c, "L(1)");
    ModulePtr ld = restricted_dual(l);
    for (int b = 0; b < l->dim(); ++b) CHECK(ld->weight(b) == -l->weight(b));
    CHECK(check_module(*ld).pass());
    // On V** the action is S²(X) = q^{2ρ} X q^{-2ρ}.
    for (auto v : {l, spec(c, "L(2)"), spec(A2(), "L(1,0)"), spec(B2(), "L(0,1)")}) {
      ModulePtr dd = restricted_dual(restricted_dual(v));
      const CartanPtr& ct = v->cartan;
      Matrix d = v->q_diag([&](const Weight& w) { return ct->pairing(Frac(2) * ct->rho(), w); });
      for (int i = 0; i < v->rank(); ++i) {
        require_equal(d * v->E[static_cast<std::size_t>(i)], dd->E[static_cast<std::size_t>(i)] * d);
        require_equal(d * v->F[static_cast<std::size_t>(i)], dd->F[static_cast<std::size_t>(i)] * d);
      }
    }
    CHECK_THROWS_AS(restricted_dual(verma(fund(c, {Frac(1, 3)}), 2)), Error);
  }

  TEST_CASE("relation checker") {
    for (auto s : {"L(1)", "L(2)", "L(3)"}) CHECK(check_module(*spec(A1(), s)).pass());
    for (auto s : {"L(1,0)", "L(1,1)"}) CHECK(check_module(*spec(A2(), s)).pass());
    auto a2 = A2();
    ModulePtr m = verma(fund(a2, {Frac(1, 3), Frac(2, 5)}), 3);
    ModuleReport rep = check_module(*m);
    CHECK(rep.pass());
    CHECK(untestable(rep) > 0);

    // Negative control: corrupt one E entry.
    WeightModule bad = *spec(A1(), "L(2)");
    Weight w = A1()->fundamental(0);
    int hi = index_of(std::make_shared<WeightModule>(bad), Frac(2) * w);
    int mid = index_of(std::make_shared<WeightModule>(bad), A1()->zero());
    bad.E[0].set(hi, mid, Scalar(7));
    ModuleReport br = check_module(bad);
    CHECK_FALSE(br.pass());
    bool named = false;
    for (const auto& r : br.checks)
      if (!r.pass && r.relation.find("[E1,F1]") != std::string::npos) named = true;
    CHECK(named);
  }

  TEST_CASE("module specs and json") {
    auto c = A1();
    CHECK(spec(c, "M(1/3):4")->dim() == 5);
    CHECK(spec(c, "1")->dim() == 1);
    CHECK_THROWS_AS(spec(c, "X(1)"), Error);
    CHECK_THROWS_AS(spec(c, "L(1/2)"), Error);
    ModulePtr l = spec(A2(), "L(1,0)");
    ModulePtr back = module_from_json(l->to_json(), QMode::Exact());
    require_equal(back->E[1], l->E[1]);
    CHECK(back->dim() == l->dim());
  }

  TEST_CASE("float mode agrees with exact evaluation") {
    auto c = A2();
    QMode f = QMode::Float(0.83, 1e-9);
    ModulePtr ex = spec(c, "L(1,1)"), fl = spec(c, "L(1,1)", f);
    REQUIRE(ex->dim() == fl->dim());
    for (int r = 0; r < ex->dim(); ++r)
      for (int k = 0; k < ex->dim(); ++k)
        CHECK(fl->E[0].get(r, k).to_double(0.83) == doctest::Approx(ex->E[0].get(r, k).to_double(0.83)).epsilon(1e-9));
    CHECK(check_module(*fl).pass());
  }
}
