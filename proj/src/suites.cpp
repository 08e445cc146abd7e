#include "qvo/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "qvo/diagrams.hpp"
#include "qvo/duality.hpp"
#include "qvo/rmatrix.hpp"
#include "qvo/vertexops.hpp"

namespace qvo {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using Task = std::function<CheckResult()>;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fund_spec(const std::vector<int>& a) {
  std::ostringstream os;
  os << "L(";
  for (std::size_t k = 0; k < a.size(); ++k) os << (k ? "," : "") << a[k];
  os << ")";
  return os.str();
}

ModulePtr simple(const CartanPtr& c, const std::vector<int>& a, const QMode& mode) {
  return module_from_spec(c, fund_spec(a), mode);
}

std::vector<int> unit(int r, int i, int scale = 1) {
  std::vector<int> v(static_cast<std::size_t>(r), 0);
  v[static_cast<std::size_t>(i)] = scale;
  return v;
}

// L_ϖ (first fundamental) and the remaining finite modules of the relations suite.
struct Finite {
  ModulePtr vector;
  std::vector<ModulePtr> all;  // includes the trivial module
};

Finite finite_modules(const CartanPtr& c, const QMode& mode) {
  int r = c->rank();
  Finite f;
  f.vector = simple(c, unit(r, 0), mode);
  f.all.push_back(simple(c, std::vector<int>(static_cast<std::size_t>(r), 0), mode));
  f.all.push_back(f.vector);
  if (r == 1) f.all.push_back(simple(c, unit(1, 0, 2), mode));
  for (int i = 1; i < r; ++i) f.all.push_back(simple(c, unit(r, i), mode));
  return f;
}

std::vector<ModulePtr> nontrivial(const std::vector<ModulePtr>& ms) {
  std::vector<ModulePtr> out;
  for (const auto& m : ms)
    if (m->dim() > 1) out.push_back(m);
  return out;
}

int relations_height(const CartanPtr& c, const SuiteConfig& cfg) {
  if (cfg.trunc > 0) return cfg.trunc;
  return c->rank() == 1 ? 8 : 5;
}

// Largest Verma height at which the float Drinfeld sum stays within 1e-9.
constexpr int kFloatDrinfeldHeight = 4;

int small_height(const SuiteConfig& cfg) { return cfg.trunc > 0 ? std::min(cfg.trunc, 3) : 3; }

CheckResult tagged(CheckResult r, const std::string& key, const json& value) {
  r.params[key] = value;
  return r;
}

CheckResult from_module_report(const ModulePtr& m, const ModuleReport& rep, double seconds) {
  CheckResult r;
  r.identity = "module_relations";
  r.params = json{{"module", m->name}, {"dim", m->dim()}};
  r.mode = m->mode.exact ? "exact" : "float";
  r.seconds = seconds;
  for (const auto& c : rep.checks) {
    r.compared += c.compared;
    r.skipped += c.untestable;
    r.max_residual = std::max(r.max_residual, c.max_residual);
    if (!c.pass && r.pass) {
      r.pass = false;
      r.witness = c.relation + ": " + c.witness;
    }
  }
  return r;
}

CheckResult guarded(const std::string& id, const std::function<CheckResult()>& f) {
  auto t0 = Clock::now();
  try {
    return f();
  } catch (const Error& e) {
    CheckResult r;
    r.identity = id;
    r.fail_with(e.what());
    r.seconds = since(t0);
    return r;
  }
}

// ---------------------------------------------------------------- suites

std::vector<Task> relations_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  int H = relations_height(c, cfg);
  std::vector<std::function<ModulePtr()>> makers;
  for (const auto& m : f.all) makers.push_back([m] { return m; });
  for (const auto& l : cfg.lambdas) makers.push_back([l, H, &cfg] { return cached_verma(l, H, cfg.mode); });
  for (auto& mk : makers)
    out.push_back([mk] {
      auto t0 = Clock::now();
      ModulePtr m = mk();
      ModuleReport rep = check_module(*m);
      return from_module_report(m, rep, since(t0));
    });
  return out;
}

std::vector<Task> rmatrix_tasks(const CartanPtr& c, const SuiteConfig& cfg, bool ybe_only) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  const auto& ms = f.all;
  if (!ybe_only) {
    for (const auto& m : ms)
      for (const auto& n : ms) {
        out.push_back([m, n] { return delta_op_check(m, n); });
        out.push_back([m, n] { return r_inverse_check(m, n); });
        out.push_back([m, n] { return braiding_intertwines_check(m, n); });
      }
  }
  for (const auto& u : ms)
    for (const auto& v : ms)
      for (const auto& w : ms) {
        // Triples containing the trivial module reduce to pairs; keep one representative.
        bool has_trivial = u->dim() == 1 || v->dim() == 1 || w->dim() == 1;
        if (has_trivial && !(u->dim() == 1 && v == w)) continue;
        out.push_back([u, v, w] { return ybe_check(u, v, w); });
        if (ybe_only) continue;
        out.push_back([u, v, w] { return hexagon_check(u, v, w, 1); });
        out.push_back([u, v, w] { return hexagon_check(u, v, w, 2); });
      }
  if (!cfg.lambdas.empty()) {
    Weight l = cfg.lambdas.front();
    int H = small_height(cfg);
    ModulePtr v = f.vector;
    out.push_back([l, H, v, &cfg] { return tagged(ybe_check(cached_verma(l, H, cfg.mode), v, v), "lambda", l.str()); });
    if (!ybe_only)
      out.push_back([l, H, v, &cfg] { return tagged(delta_op_check(cached_verma(l, H, cfg.mode), v), "lambda", l.str()); });
  }
  return out;
}

std::vector<Task> ribbon_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  int H = relations_height(c, cfg);
  for (const auto& m : f.all) {
    out.push_back([m] { return drinfeld_twist_check(m); });
    out.push_back([m] { return ribbon_central_check(m); });
  }
  int hd = cfg.mode.exact ? H : std::min(H, kFloatDrinfeldHeight);
  for (const auto& l : cfg.lambdas) {
    out.push_back([l, hd, &cfg] { return tagged(drinfeld_twist_check(cached_verma(l, hd, cfg.mode)), "lambda", l.str()); });
    out.push_back([l, H, &cfg] { return tagged(ribbon_central_check(cached_verma(l, H, cfg.mode)), "lambda", l.str()); });
  }
  auto nt = nontrivial(f.all);
  for (const auto& m : nt)
    for (const auto& n : nt) out.push_back([m, n] { return twist_coherence_check(m, n); });
  if (!cfg.lambdas.empty()) {
    Weight l = cfg.lambdas.front();
    int h = small_height(cfg);
    ModulePtr v = f.vector;
    out.push_back([l, h, v, &cfg] { return tagged(twist_coherence_check(cached_verma(l, h, cfg.mode), v), "lambda", l.str()); });
  }
  return out;
}

CheckResult qtrace_identity_check(const Weight& lambda, const ModulePtr& v, int H) {
  auto t0 = Clock::now();
  CheckResult res;
  res.identity = "qtrace_identity";
  res.mode = v->mode.exact ? "exact" : "float";
  ModulePtr m = cached_verma(lambda, H, v->mode);
  res.params = json{{"lambda", lambda.str()}, {"module", v->name}, {"verma", m->name}};
  GradedMap tr = partial_qtrace(identity_map(tensor(m, v)), v);
  Scalar qd = weyl_quantum_dimension(v->cartan, *v->highest_weight, v->mode);
  res.absorb(compare_maps(tr, scale_map(identity_map(m), qd)), "qTr(id) = qdim id");
  res.seconds = since(t0);
  return res;
}

std::vector<Task> duality_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  auto nt = nontrivial(f.all);
  for (const auto& v : nt) {
    out.push_back([v] { return zigzag_check(v); });
    out.push_back([v] { return right_duality_check(v); });
    out.push_back([v] { return dual_twist_check(v); });
  }
  ModulePtr v = f.vector;
  out.push_back([v] {
    GradedMap b = braiding(v, v);
    return dual_functor_check(ribbon_op(b.target), b);
  });
  std::vector<Weight> ls = cfg.lambdas.empty() ? std::vector<Weight>{} : std::vector<Weight>{cfg.lambdas.front()};
  for (const auto& l : ls) {
    int H = small_height(cfg);
    out.push_back([l, v, H] { return qtrace_identity_check(l, v, H); });
  }
  return out;
}

std::vector<Task> vertexops_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  ModulePtr v = f.vector;
  bool small = c->rank() == 1;
  for (const auto& l : cfg.lambdas) {
    json lj = l.str();
    out.push_back([l, v, lj] { return tagged(round_trip_check(l, v, 2), "lambda", lj); });
    out.push_back([l, v, lj] { return tagged(fusion_triangular_check(l, {v, v}), "lambda", lj); });
    out.push_back([l, v, lj] { return tagged(kto1_check(l, {v, v}), "lambda", lj); });
    out.push_back([l, v, lj] {
      VertexOp op = k_point(l, {v, v}, {unit_vector(v->dim(), v->dim() - 1), unit_vector(v->dim(), 0)}, 1);
      return tagged(intertwiner_check(op), "lambda", lj);
    });
    out.push_back([l, v, lj] { return tagged(spin_functoriality_check(l, braiding(v, v)), "lambda", lj); });
    if (small) {
      out.push_back([l, v, lj] { return tagged(fusion_triangular_check(l, {v, v, v}), "lambda", lj); });
      out.push_back([l, v, lj] { return tagged(kto1_check(l, {v, v, v}), "lambda", lj); });
      out.push_back([l, v, lj] { return tagged(cocycle_check(l, {v, v, v}), "lambda", lj); });
    } else {
      out.push_back([l, v, lj] { return tagged(cocycle_check(l, {v, v}), "lambda", lj); });
    }
  }
  return out;
}

std::vector<Task> abrr_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  ModulePtr v = f.vector;
  for (const auto& l : cfg.lambdas) {
    out.push_back([l, v] { return tagged(abrr_check(l, v, v), "lambda", l.str()); });
    out.push_back([l, v] { return tagged(abrr_dual_check(l, v, v), "lambda", l.str()); });
  }
  return out;
}

std::vector<Task> qkz_tasks(const CartanPtr& c, const SuiteConfig& cfg) {
  std::vector<Task> out;
  Finite f = finite_modules(c, cfg.mode);
  ModulePtr v = f.vector;
  if (cfg.lambdas.empty()) return out;
  Weight l = cfg.lambdas.front();
  int H = cfg.trunc > 0 ? cfg.trunc : 1;
  std::vector<ModulePtr> spins = c->rank() == 1 ? std::vector<ModulePtr>{v, v, v} : std::vector<ModulePtr>{v, v};
  for (int i = 1; i <= static_cast<int>(spins.size()); ++i)
    out.push_back([l, spins, i] { return tagged(qkz_fusion_check(l, spins, i), "lambda", l.str()); });
  for (int k = 1; k <= 2; ++k)
    for (int i = 1; i <= k; ++i) {
      std::vector<ModulePtr> s(static_cast<std::size_t>(k), v);
      out.push_back([l, s, i, H] { return tagged(operator_qkz_check(l, s, i, H), "lambda", l.str()); });
    }
  if (c->rank() == 1) out.push_back([l, v] { return tagged(three_point_ev_check(l, {v}, {v}, {v}), "lambda", l.str()); });
  return out;
}

// ---------------------------------------------------------------- diagrams

struct DiagramFixture {
  ColoringEnv env;
  Palette palette;
};

DiagramFixture diagram_env(const CartanPtr& c, const SuiteConfig& cfg) {
  DiagramFixture fx{ColoringEnv(c, cfg.mode), {}};
  Finite f = finite_modules(c, cfg.mode);
  ModulePtr v = f.vector;
  ModulePtr w = f.all[2];
  fx.env.add_module("V", v);
  fx.env.add_module("W", w);
  Weight l = cfg.lambdas.empty() ? default_lambdas(c).front() : cfg.lambdas.front();
  fx.env.add_module("M", cached_verma(l, small_height(cfg), cfg.mode));
  Scalar two = Scalar::q_pow(Frac(1), cfg.mode) + Scalar::q_pow(Frac(-1), cfg.mode);
  fx.env.add_coupon("s", scale_map(identity_map(v), two));
  fx.env.add_coupon("t", scale_map(identity_map(w), Scalar(3)));
  fx.env.add_coupon("E", e_map(v, 0));
  fx.env.add_coupon("F", f_map(v, 0));
  fx.palette.modules = {"V", "W"};
  fx.palette.coupons = {{"s", "V"}, {"t", "W"}, {"E", "V"}, {"F", "V"}};
  fx.palette.mode = DiagramMode::RT;
  return fx;
}

CheckResult dot_result(const std::string& id, const Diagram& a, const Diagram& b, const ColoringEnv& env, bool expect = true) {
  auto t0 = Clock::now();
  CheckResult r;
  r.identity = id;
  r.mode = env.mode().exact ? "exact" : "float";
  DotResult d = dot_equal(a, b, env);
  r.compared = 1;
  r.max_residual = expect ? d.max_residual : 0.0;
  if (d.equal != expect) r.fail_with(expect ? d.witness : "diagrams unexpectedly dot-equal");
  r.seconds = since(t0);
  return r;
}

Diagram rows(DiagramMode mode, std::vector<std::vector<Tile>> s) { return Diagram{mode, std::move(s)}; }

std::vector<CheckResult> diagram_fixtures(const DiagramFixture& fx) {
  const ColoringEnv& env = fx.env;
  Color V = Color::leaf("V"), W = Color::leaf("W"), M = Color::leaf("M");
  auto RT = DiagramMode::RT;
  std::vector<CheckResult> out;
  Diagram yb1 = rows(DiagramMode::Braid, {{Tile::cross(V, W), Tile::id({M})},
                                          {Tile::id({W}), Tile::cross(V, M)},
                                          {Tile::cross(W, M), Tile::id({V})}});
  Diagram yb2 = rows(DiagramMode::Braid, {{Tile::id({V}), Tile::cross(W, M)},
                                          {Tile::cross(V, M), Tile::id({W})},
                                          {Tile::id({M}), Tile::cross(V, W)}});
  out.push_back(dot_result("yang_baxter_diagram", yb1, yb2, env));
  Diagram r3 = apply_move(yb1, {"r3", 0, 0}, env);
  out.push_back(dot_result("move:r3_fixture", yb1, r3, env));
  Diagram cap = rows(RT, {{Tile::id({M}), Tile::cap(V, false)}});
  out.push_back(dot_result("cap_pull_verma", cap, apply_move(cap, {"cap_pull", 0, 0}, env), env));
  out.push_back(dot_result("cap_pull_under_verma", cap, apply_move(cap, {"cap_pull_under", 0, 0}, env), env));
  Diagram crossing = rows(RT, {{Tile::cross(V, V)}});
  Diagram flip = rows(DiagramMode::Graded, {{Tile::cross(V, V)}});
  out.push_back(dot_result("crossing_vs_flip_negative", crossing, flip, env, false));
  Diagram stacked = rows(RT, {{Tile::coupon("E", {V}, {V}), Tile::id({W})}, {Tile::coupon("F", {V}, {V}), Tile::id({W})}});
  out.push_back(dot_result("move:melt_fixture", stacked, apply_move(stacked, {"melt", 0, 0}, env), env));
  Diagram adjacent = rows(RT, {{Tile::coupon("E", {V}, {V}), Tile::coupon("t", {W}, {W})}});
  out.push_back(dot_result("move:melt_side_fixture", adjacent, apply_move(adjacent, {"melt_side", 0, 0}, env), env));
  Color Vs = Color::leaf("V", -1);
  Diagram through = rows(RT, {{Tile::id({Vs}), Tile::coupon("E", {V}, {V})}, {Tile::cap(V, false)}});
  out.push_back(dot_result("move:coupon_through_cap_fixture", through,
                           apply_move(through, {"coupon_through_cap", 0, 0}, env), env));
  Diagram zipped = rows(RT, {{Tile::zip({V, W})}, {Tile::zip({V, W}, true)}});
  out.push_back(dot_result("move:zip_cancel_fixture", zipped, apply_move(zipped, {"zip_cancel", 0, 0}, env), env));
  Color VW = Color::bundled({V, W});
  Diagram bundled = rows(RT, {{Tile::cross(VW, M)}, {Tile::twist(M), Tile::twist(VW)}});
  out.push_back(dot_result("bundling_fixture", bundled, expand_bundles(bundled), env));
  out.push_back(dot_result("move:expand_bundle_fixture", bundled, apply_move(bundled, {"expand_bundle", 0, 0}, env), env));
  // Graded mode: twists are trivial and crossings square to the identity.
  auto G = DiagramMode::Graded;
  out.push_back(dot_result("graded_twist_trivial", rows(G, {{Tile::twist(VW)}}), identity_diagram({VW}, G), env));
  out.push_back(dot_result("graded_cross_square", rows(G, {{Tile::cross(V, W)}, {Tile::cross(W, V)}}),
                           identity_diagram({V, W}, G), env));
  return out;
}

// One sampled location per applicable move name, folded per name.
void random_move_checks(const DiagramFixture& fx, const SuiteConfig& cfg, std::map<std::string, CheckResult>& acc) {
  const ColoringEnv& env = fx.env;
  std::mt19937_64 rng(cfg.seed);
  auto fold = [&](const std::string& id, CheckResult r, const json& where) {
    auto [it, fresh] = acc.try_emplace(id);
    CheckResult& a = it->second;
    if (fresh) {
      a.identity = id;
      a.mode = r.mode;
      a.compared = 0;
    }
    a.compared += 1;
    a.seconds += r.seconds;
    a.max_residual = std::max(a.max_residual, r.max_residual);
    if (!r.pass && a.pass) a.fail_with(where.dump() + " " + r.witness);
  };
  for (int s = 0; s < cfg.samples; ++s) {
    std::uint64_t seed = cfg.seed * 100003ULL + static_cast<std::uint64_t>(s);
    Diagram d = random_diagram(seed, 4, fx.palette, env);
    json where{{"seed", seed}};
    std::map<std::string, std::vector<MoveSpec>> by_name;
    for (const auto& m : applicable_moves(d, env)) by_name[m.name].push_back(m);
    for (const auto& [name, ms] : by_name) {
      const MoveSpec& m = ms[std::uniform_int_distribution<std::size_t>(0, ms.size() - 1)(rng)];
      Diagram d2 = apply_move(d, m, env);
      fold("isotopy:" + name, dot_result(name, d, d2, env),
           json{{"seed", seed}, {"slice", m.slice}, {"position", m.position}});
    }
    fold("bundling:expand", dot_result("expand", d, expand_bundles(d), env), where);
    {
      auto t0 = Clock::now();
      CheckResult r;
      r.identity = "desugar";
      r.absorb(compare_maps(evaluate(d, env), evaluate(desugar(d), env)));
      r.seconds = since(t0);
      fold("mixed_calculus:desugar", r, where);
    }
    // Functoriality: split a random diagram and compare the fold with the composite.
    Diagram e = random_diagram(seed ^ 0x5bd1e995ULL, 5, fx.palette, env);
    int cut = 1 + static_cast<int>(seed % 4);
    Diagram lo{e.mode, {e.slices.begin(), e.slices.begin() + cut}};
    Diagram hi{e.mode, {e.slices.begin() + cut, e.slices.end()}};
    {
      auto t0 = Clock::now();
      CheckResult r;
      r.absorb(compare_maps(evaluate(stack(lo, hi), env), compose(evaluate(hi, env), evaluate(lo, env))));
      r.seconds = since(t0);
      fold("functoriality:stack", r, where);
    }
    {
      Diagram a = random_diagram(seed + 17, 2, fx.palette, env);
      Diagram b = random_diagram(seed + 29, 2, fx.palette, env);
      auto t0 = Clock::now();
      CheckResult r;
      GradedMap ab = evaluate(side_by_side(a, b), env);
      GradedMap ta = tensor_maps(evaluate(a, env), evaluate(b, env));
      r.absorb(compare(ab.mat, ta.mat, {}, env.mode().exact ? 0.0 : env.mode().tol));
      r.seconds = since(t0);
      fold("functoriality:side_by_side", r, where);
    }
    {
      CheckResult r;
      Diagram again = diagram_from_json(json::parse(serialize_diagram(d)));
      if (!(again == d)) r.fail_with("serialization round trip changed the diagram");
      fold("serialization:round_trip", r, where);
    }
  }
}

std::vector<CheckResult> diagram_checks(const CartanPtr& c, const SuiteConfig& cfg) {
  DiagramFixture fx = diagram_env(c, cfg);
  std::vector<CheckResult> out;
  try {
    out = diagram_fixtures(fx);
  } catch (const Error& e) {
    CheckResult r;
    r.identity = "diagram_fixtures";
    r.fail_with(e.what());
    out.push_back(r);
  }
  std::map<std::string, CheckResult> acc;
  random_move_checks(fx, cfg, acc);
  for (auto& [id, r] : acc) {
    r.params = json{{"samples", cfg.samples}, {"seed", cfg.seed}};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Task> tasks_for(const std::string& name, const CartanPtr& c, const SuiteConfig& cfg) {
  if (name == "relations") return relations_tasks(c, cfg);
  if (name == "rmatrix") return rmatrix_tasks(c, cfg, false);
  if (name == "ybe") return rmatrix_tasks(c, cfg, true);
  if (name == "ribbon") return ribbon_tasks(c, cfg);
  if (name == "duality") return duality_tasks(c, cfg);
  if (name == "vertexops") return vertexops_tasks(c, cfg);
  if (name == "abrr") return abrr_tasks(c, cfg);
  if (name == "qkz") return qkz_tasks(c, cfg);
  fail(ErrorCode::ConfigError, "unknown suite '" + name + "'");
}

}  // namespace

Weight parse_lambda(const CartanPtr& c, const std::string& text) {
  std::vector<Frac> fund;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      fund.push_back(Frac::parse(part));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "bad weight '" + text + "': " + e.what());
    }
  }
  if (static_cast<int>(fund.size()) != c->rank())
    fail(ErrorCode::ConfigError, "weight '" + text + "' needs " + std::to_string(c->rank()) + " coordinates");
  return Weight::from_fund(c, fund);
}

std::vector<Weight> default_lambdas(const CartanPtr& c) {
  std::vector<std::vector<Frac>> cands;
  if (c->rank() == 1) {
    cands = {{Frac(1, 3)}, {Frac(2, 5)}, {Frac(-7, 4)}};
  } else {
    std::vector<Frac> seeds{Frac(1, 3), Frac(1, 4), Frac(2, 5), Frac(1, 6)};
    for (const Frac& s : seeds) cands.emplace_back(static_cast<std::size_t>(c->rank()), s);
  }
  std::vector<Weight> out;
  for (auto& f : cands) {
    Weight w = Weight::from_fund(c, f);
    if (c->is_generic(w)) out.push_back(w);
  }
  if (c->rank() > 1 && out.size() > 1) out.resize(1);
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"relations", "rmatrix", "ybe",  "ribbon", "duality",
                                              "diagrams",  "vertexops", "abrr", "qkz"};
  return names;
}

bool suite_needs_generic(const std::string& name) {
  return name == "vertexops" || name == "abrr" || name == "qkz" || name == "relations" || name == "ribbon";
}

void validate_config(const SuiteConfig& cfg) {
  CartanPtr c;
  try {
    c = CartanData::preset(cfg.cartan);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  if (!cfg.mode.exact && !(cfg.mode.q0 > 0.0 && cfg.mode.q0 != 1.0 && cfg.mode.tol > 0.0))
    fail(ErrorCode::ConfigError, "float mode needs q0 > 0, q0 != 1 and tol > 0");
  for (const auto& s : cfg.suites) {
    if (s != "diagrams" && std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      fail(ErrorCode::ConfigError, "unknown suite '" + s + "'");
    if (!suite_needs_generic(s)) continue;
    for (const auto& l : cfg.lambdas)
      if (!c->is_generic(l)) fail(ErrorCode::ConfigError, "weight not generic: " + l.str());
  }
  if (cfg.jobs < 1) fail(ErrorCode::ConfigError, "--jobs must be positive");
}

std::vector<CheckResult> run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<CheckResult> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) out[k] = guarded("task", tasks[k]);
  };
  int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

Report run_suite(const std::string& name, const SuiteConfig& cfg_in) {
  SuiteConfig cfg = cfg_in;
  CartanPtr c = CartanData::preset(cfg.cartan);
  if (cfg.lambdas.empty()) cfg.lambdas = default_lambdas(c);
  Report rep;
  std::vector<CheckResult> results;
  if (name == "diagrams") {
    try {
      results = diagram_checks(c, cfg);
    } catch (const Error& e) {
      CheckResult r;
      r.identity = "diagrams";
      r.fail_with(e.what());
      results.push_back(r);
    }
  } else {
    results = run_tasks(tasks_for(name, c, cfg), cfg.jobs);
  }
  for (auto& r : results) {
    r.params["suite"] = name;
    r.params["cartan"] = cfg.cartan;
    rep.add(std::move(r));
  }
  return rep;
}

Report run_suites(const SuiteConfig& cfg) {
  validate_config(cfg);
  Report rep;
  std::vector<std::string> names = cfg.suites;
  if (names.empty())
    for (const auto& s : suite_names())
      if (s != "ybe") names.push_back(s);
  for (const auto& s : names) rep.merge(run_suite(s, cfg));
  return rep;
}

Scalar weyl_quantum_dimension(const CartanPtr& c, const Weight& lambda, const QMode& mode) {
  auto qint = [&](const Frac& n, int d) {
    Scalar num = Scalar::q_pow(Frac(d) * n, mode) - Scalar::q_pow(-(Frac(d) * n), mode);
    Scalar den = Scalar::q_pow(Frac(d), mode) - Scalar::q_pow(Frac(-d), mode);
    return num / den;
  };
  Scalar out(1);
  Weight rho = c->rho();
  for (const auto& alpha : c->positive_roots()) {
    Weight a = c->root(alpha);
    int d = static_cast<int>((c->pairing(a, a) / Frac(2)).floor());
    out *= qint(c->coroot_pairing(lambda + rho, alpha), d);
    out /= qint(c->coroot_pairing(rho, alpha), d);
  }
  return out;
}

}  // namespace qvo
