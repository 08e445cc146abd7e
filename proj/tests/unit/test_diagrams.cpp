#include <random>

#include "helpers.hpp"
#include "qvo/diagrams.hpp"
#include "qvo/duality.hpp"
#include "qvo/rmatrix.hpp"
#include "qvo/vertexops.hpp"

using namespace qvo;
using namespace qvo::test;

namespace {

struct Fixture {
  CartanPtr c = A1();
  ColoringEnv env{c, QMode::Exact()};
  Color V = Color::leaf("V"), W = Color::leaf("W"), M = Color::leaf("M"), Vs = Color::leaf("V", -1);
  Palette palette;

  Fixture() {
    ModulePtr v = spec(c, "L(1)");
    env.add_module("V", v);
    env.add_module("W", spec(c, "L(2)"));
    env.add_module("M", cached_verma(fund(c, {Frac(1, 3)}), 3, QMode::Exact()));
    env.add_coupon("s", scale_map(identity_map(v), qp(1) + qp(-1)));
    env.add_coupon("E", e_map(v, 0));
    env.add_coupon("F", f_map(v, 0));
    palette.modules = {"V", "W"};
    palette.coupons = {{"s", "V"}, {"E", "V"}, {"F", "V"}};
  }
};

Diagram rows(DiagramMode mode, std::vector<std::vector<Tile>> s) { return Diagram{mode, std::move(s)}; }

const auto RT = DiagramMode::RT;
const auto Braid = DiagramMode::Braid;
const auto Graded = DiagramMode::Graded;

}  // namespace

TEST_SUITE("diagrams") {
  TEST_CASE("empty diagram is the identity of the unit object") {
    Fixture fx;
    Diagram d;
    Boundary b = typecheck(d, fx.env);
    CHECK(b.source.empty());
    CHECK(b.target.empty());
    require_equal(evaluate(d, fx.env).mat, Matrix::identity(1));
  }

  TEST_CASE("boundaries") {
    Fixture fx;
    Boundary b = typecheck(rows(Braid, {{Tile::cross(fx.V, fx.W)}}), fx.env);
    CHECK(b.source == Obj{fx.V, fx.W});
    CHECK(b.target == Obj{fx.W, fx.V});
    Color VW = Color::bundled({fx.V, fx.W});
    b = typecheck(rows(RT, {{Tile::zip({fx.V, fx.W})}}), fx.env);
    CHECK(b.source == Obj{fx.V, fx.W});
    CHECK(b.target == Obj{VW});
    b = typecheck(rows(RT, {{Tile::cap(fx.V, false)}}), fx.env);
    CHECK(b.target.empty());
    CHECK(flatten(b.source).size() == 2);
    CHECK_THROWS_AS(typecheck(rows(Braid, {{Tile::cross(fx.V, fx.W)}, {Tile::cross(fx.V, fx.W)}}), fx.env), Error);
    CHECK_THROWS_AS(typecheck(rows(RT, {{Tile::cap(fx.M, false)}}), fx.env), Error);
    try {
      evaluate(rows(RT, {{Tile::cap(fx.M, false)}}), fx.env);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfiniteDualError);
    }
  }

  TEST_CASE("crossings and twists") {
    Fixture fx;
    Diagram d = rows(Braid, {{Tile::cross(fx.V, fx.M)}, {Tile::cross(fx.M, fx.V, true)}});
    ModulePtr vm = tensor(fx.env.module("V"), fx.env.module("M"));
    require_equal(evaluate(d, fx.env).mat, Matrix::identity(vm->dim()));
    require_equal(evaluate(rows(Braid, {{Tile::cross(fx.V, fx.W)}}), fx.env).mat,
                  braiding(fx.env.module("V"), fx.env.module("W")).mat);
    Color VW = Color::bundled({fx.V, fx.W});
    ModulePtr flat = tensor(fx.env.module("V"), fx.env.module("W"));
    require_equal(evaluate(rows(RT, {{Tile::twist(VW)}}), fx.env).mat, ribbon_op(flat).mat);
  }

  TEST_CASE("Yang-Baxter with a Verma strand") {
    Fixture fx;
    Color V = fx.V, W = fx.W, M = fx.M;
    Diagram a = rows(Braid, {{Tile::cross(V, W), Tile::id({M})}, {Tile::id({W}), Tile::cross(V, M)}, {Tile::cross(W, M), Tile::id({V})}});
    Diagram b = rows(Braid, {{Tile::id({V}), Tile::cross(W, M)}, {Tile::cross(V, M), Tile::id({W})}, {Tile::id({M}), Tile::cross(V, W)}});
    CHECK(dot_equal(a, b, fx.env).equal);
    CHECK(dot_equal(a, apply_move(a, {"r3", 0, 0}, fx.env), fx.env).equal);
    // negative control: an over-crossing is not an under-crossing
    Diagram c = rows(Braid, {{Tile::cross(V, V, true)}});
    CHECK_FALSE(dot_equal(rows(Braid, {{Tile::cross(V, V)}}), c, fx.env).equal);
    CHECK_FALSE(dot_equal(rows(RT, {{Tile::cross(V, V)}}), rows(Graded, {{Tile::cross(V, V)}}), fx.env).equal);
  }

  TEST_CASE("cap through a Verma strand") {
    Fixture fx;
    Diagram cap = rows(RT, {{Tile::id({fx.M}), Tile::cap(fx.V, false)}});
    for (const char* mv : {"cap_pull", "cap_pull_under"}) {
      Diagram moved = apply_move(cap, {mv, 0, 0}, fx.env);
      CHECK_FALSE(moved == cap);
      CHECK(dot_equal(cap, moved, fx.env).equal);
    }
  }

  TEST_CASE("local moves") {
    Fixture fx;
    Color V = fx.V, W = fx.W;
    Diagram stacked = rows(RT, {{Tile::coupon("E", {V}, {V}), Tile::id({W})}, {Tile::coupon("F", {V}, {V}), Tile::id({W})}});
    Diagram melted = apply_move(stacked, {"melt", 0, 0}, fx.env);
    CHECK(melted.slices.size() == 1);
    CHECK(dot_equal(stacked, melted, fx.env).equal);
    Diagram zipped = rows(RT, {{Tile::zip({V, W})}, {Tile::zip({V, W}, true)}});
    Diagram cancelled = apply_move(zipped, {"zip_cancel", 0, 0}, fx.env);
    CHECK(dot_equal(zipped, cancelled, fx.env).equal);
    Diagram through = rows(RT, {{Tile::id({fx.Vs}), Tile::coupon("E", {V}, {V})}, {Tile::cap(V, false)}});
    CHECK(dot_equal(through, apply_move(through, {"coupon_through_cap", 0, 0}, fx.env), fx.env).equal);
    // E is not an intertwiner, so it cannot slide through a crossing
    Diagram slide = rows(Braid, {{Tile::coupon("E", {V}, {V}), Tile::id({V})}, {Tile::cross(V, V)}});
    CHECK_THROWS_AS(apply_move(slide, {"coupon_slide", 0, 0}, fx.env), Error);
    CHECK_THROWS_AS(apply_move(stacked, {"no_such_move", 0, 0}, fx.env), Error);
    CHECK(move_names().size() == 20);
  }

  TEST_CASE("random diagrams") {
    Fixture fx;
    Diagram e = random_diagram(3, 0, fx.palette, fx.env);
    GradedMap ev = evaluate(e, fx.env);
    require_equal(ev.mat, Matrix::identity(ev.mat.rows()));
    CHECK(random_diagram(42, 6, fx.palette, fx.env) == random_diagram(42, 6, fx.palette, fx.env));
    CHECK(serialize_diagram(random_diagram(42, 6, fx.palette, fx.env)) ==
          serialize_diagram(random_diagram(42, 6, fx.palette, fx.env)));
  }

  TEST_CASE("isotopy invariance under random moves") {
    Fixture fx;
    std::mt19937_64 rng(5);
    int applied = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      Diagram d = random_diagram(seed, 4, fx.palette, fx.env);
      std::vector<MoveSpec> moves = applicable_moves(d, fx.env);
      if (moves.empty()) continue;
      MoveSpec m = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
      Diagram d2 = apply_move(d, m, fx.env);
      DotResult r = dot_equal(d, d2, fx.env);
      INFO("seed " << seed << " move " << m.name << "@" << m.slice << "," << m.position << " " << r.witness);
      CHECK(r.equal);
      ++applied;
    }
    CHECK(applied > 0);
  }

  TEST_CASE("functoriality") {
    Fixture fx;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      Diagram d = random_diagram(seed, 4, fx.palette, fx.env);
      if (d.slices.size() < 2) continue;
      Diagram lo{d.mode, {d.slices.begin(), d.slices.begin() + 1}}, hi{d.mode, {d.slices.begin() + 1, d.slices.end()}};
      require_equal(evaluate(stack(lo, hi), fx.env).mat, compose(evaluate(hi, fx.env), evaluate(lo, fx.env)).mat);
    }
    Diagram a = rows(RT, {{Tile::coupon("s", {fx.V}, {fx.V})}});
    Diagram b = rows(RT, {{Tile::twist(fx.W)}});
    require_equal(evaluate(side_by_side(a, b), fx.env).mat, kron(evaluate(a, fx.env).mat, evaluate(b, fx.env).mat));
  }

  TEST_CASE("bundles, graded mode and desugaring") {
    Fixture fx;
    Color VW = Color::bundled({fx.V, fx.W});
    Diagram bundled = rows(RT, {{Tile::cross(VW, fx.M)}, {Tile::twist(fx.M), Tile::twist(VW)}});
    CHECK(dot_equal(bundled, expand_bundles(bundled), fx.env).equal);
    CHECK(dot_equal(rows(Graded, {{Tile::twist(VW)}}), identity_diagram({VW}, Graded), fx.env).equal);
    CHECK(dot_equal(rows(Graded, {{Tile::cross(fx.V, fx.W)}, {Tile::cross(fx.W, fx.V)}}), identity_diagram({fx.V, fx.W}, Graded), fx.env)
              .equal);
    Diagram rt = rows(RT, {{Tile::cup(fx.V, false)}, {Tile::coupon("E", {fx.V}, {fx.V}), Tile::id({fx.Vs})}, {Tile::cap(fx.V, true)}});
    Diagram braid = desugar(rt);
    CHECK(braid.mode == Braid);
    require_equal(evaluate(braid, fx.env).mat, evaluate(rt, fx.env).mat);
    // quantum trace of E on V vanishes
    CHECK(evaluate(rt, fx.env).mat.get(0, 0).is_zero());
  }

  TEST_CASE("boundary tiles give vertex expectation values") {
    CartanPtr c = A1();
    ColoringEnv env(c, QMode::Exact());
    ModulePtr l = spec(c, "L(1)");
    env.add_module("V", l);
    int lo = index_of(l, -c->fundamental(0));
    Weight lambda = fund(c, {Frac(1, 3)});
    VertexOp op = vertex_from_ev(lambda, l, unit_vector(2, lo), 1);
    env.add_boundary("v", BoundaryData{Color::leaf("V"), unit_vector(2, lo)});
    Diagram src = rows(Braid, {{Tile::boundary("v", Color::leaf("V"), true)}});
    GradedMap g = evaluate(src, env);
    REQUIRE(g.mat.rows() == 2);
    Vec ev = expectation_value(op);
    for (int r = 0; r < 2; ++r) CHECK(g.mat.get(r, 0) == ev[static_cast<std::size_t>(r)]);
  }

  TEST_CASE("serialization") {
    Fixture fx;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Diagram d = random_diagram(seed, 5, fx.palette, fx.env);
      std::string s = serialize_diagram(d);
      Diagram back = parse_diagram(s);
      CHECK(back == d);
      CHECK(serialize_diagram(back) == s);
    }
    for (const char* bad : {"{", "[]", R"({"slices": 3})", R"({"slices": [[{"tile": "warp"}]]})",
                            R"({"slices": [[{"tile": "cross", "a": "V"}]]})"}) {
      CHECK_THROWS_AS(parse_diagram(bad), Error);
    }
    try {
      parse_diagram("{");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
    }
    nlohmann::json j = fx.env.to_json();
    CHECK(j.contains("modules"));
  }
}
