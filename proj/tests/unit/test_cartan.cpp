#include "helpers.hpp"

using namespace qvo;
using namespace qvo::test;

TEST_SUITE("cartan") {
  TEST_CASE("symmetrizer and positive roots") {
    auto a1 = A1();
    CHECK(a1->symmetrizer() == std::vector<int>{1});
    CHECK(a1->positive_roots() == std::vector<std::vector<int>>{{1}});

    auto a2 = A2();
    auto roots = a2->positive_roots();
    std::sort(roots.begin(), roots.end());
    CHECK(roots == std::vector<std::vector<int>>{{0, 1}, {1, 0}, {1, 1}});

    for (const char* name : {"A2", "B2", "G2", "A3", "B3"}) {
      auto c = CartanData::preset(name);
      for (int i = 0; i < c->rank(); ++i)
        for (int j = 0; j < c->rank(); ++j) CHECK(c->d(i) * c->a(i, j) == c->d(j) * c->a(j, i));
    }
    auto b2 = B2();
    CHECK(b2->positive_roots().size() == 4);
    CHECK(CartanData::preset("G2")->positive_roots().size() == 6);
  }

  TEST_CASE("invalid Cartan matrices are rejected") {
    CHECK_THROWS_AS(CartanData::make({{2, -1}, {0, 2}}), Error);
    CHECK_THROWS_AS(CartanData::make({{2, -2}, {-2, 2}}), Error);
    CHECK_THROWS_AS(CartanData::preset("Z9"), Error);
  }

  TEST_CASE("pairing") {
    auto a1 = A1();
    Weight alpha = a1->simple_root(0);
    CHECK(a1->pairing(alpha, alpha) == Frac(2));
    CHECK(a1->pairing(a1->zero(), a1->rho()) == Frac(0));
    auto a2 = A2();
    CHECK(a2->pairing(a2->rho(), a2->rho()) == Frac(2));
    // ρ = α1 + α2 expanded by hand
    Frac by_hand;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) by_hand += Frac(a2->d(i) * a2->a(i, j));
    CHECK(a2->pairing(a2->rho(), a2->rho()) == by_hand);
  }

  TEST_CASE("rho") {
    auto a1 = A1();
    CHECK(a1->rho() == a1->fundamental(0));
    CHECK(a1->rho() == Frac(1, 2) * a1->simple_root(0));
    auto a2 = A2();
    CHECK(a2->rho() == a2->simple_root(0) + a2->simple_root(1));
    for (const char* name : {"A1", "A2", "B2", "G2", "B3"}) {
      auto c = CartanData::preset(name);
      for (int i = 0; i < c->rank(); ++i) {
        Weight ai = c->simple_root(i);
        CHECK(c->pairing(Frac(2) * c->rho(), ai) == c->pairing(ai, ai));
      }
    }
  }

  TEST_CASE("genericity") {
    auto a1 = A1();
    CHECK(a1->is_generic(fund(a1, {Frac(1, 3)})));
    CHECK_FALSE(a1->is_generic(fund(a1, {Frac(2)})));
    Weight mrho = -a1->rho();
    CHECK_FALSE(a1->is_generic(mrho));
    CHECK(a1->is_verma_irreducible(mrho));
    auto b2 = B2();
    CHECK_FALSE(b2->is_generic(fund(b2, {Frac(1, 3), Frac(1, 3)})));
    CHECK(b2->is_generic(fund(b2, {Frac(1, 4), Frac(1, 4)})));
  }

  TEST_CASE("height") {
    auto a2 = A2();
    CHECK(a2->height(a2->zero()) == Frac(0));
    CHECK(a2->height(a2->simple_root(0) + a2->simple_root(1)) == Frac(2));
    auto a1 = A1();
    CHECK(a1->height(fund(a1, {Frac(5)}) - fund(a1, {Frac(1)})) == Frac(2));
  }

  TEST_CASE("json round trip") {
    auto b2 = B2();
    auto back = CartanData::from_json(b2->to_json());
    CHECK(back->matrix() == b2->matrix());
    Weight w = fund(b2, {Frac(1, 3), Frac(-2, 5)});
    CHECK(Weight::from_json(b2, w.to_json()) == w);
  }
}
