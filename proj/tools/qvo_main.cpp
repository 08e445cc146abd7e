// qvo: runs verification suites, evaluates diagram files and dumps operators as JSON.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qvo/diagrams.hpp"
#include "qvo/rmatrix.hpp"
#include "qvo/suites.hpp"
#include "qvo/vertexops.hpp"

using json = nlohmann::json;
using namespace qvo;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::string cartan = "A1";
  std::string q = "exact";
  std::vector<std::string> lambdas;
  std::string trunc = "auto";
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--cartan", c.cartan, "Cartan preset (A1, A2, B2, G2, A3, B3, ...)");
  app->add_option("--q", c.q, "exact | float:Q0:TOL");
  app->add_option("--lambda", c.lambdas, "weight in fundamental coordinates, \"a/b,c/d\"");
  app->add_option("--trunc", c.trunc, "Verma truncation height or auto");
  app->add_option("--out", c.out, "output file (default stdout)");
}

QMode parse_q(const std::string& s) {
  if (s == "exact") return QMode::Exact();
  if (s.rfind("float", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    try {
      double q0 = parts.size() > 1 ? std::stod(parts[1]) : 0.83;
      double tol = parts.size() > 2 ? std::stod(parts[2]) : 1e-9;
      return QMode::Float(q0, tol);
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "bad --q '" + s + "'");
    }
  }
  fail(ErrorCode::ConfigError, "bad --q '" + s + "' (exact | float:Q0:TOL)");
}

int parse_trunc(const std::string& s) {
  if (s == "auto") return -1;
  try {
    int h = std::stoi(s);
    if (h < 0) throw std::invalid_argument("negative");
    return h;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "bad --trunc '" + s + "'");
  }
}

CartanPtr parse_cartan(const std::string& s) {
  try {
    return CartanData::preset(s);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) fail(ErrorCode::ConfigError, "cannot write '" + out + "'");
  f << j.dump(2) << "\n";
}

// Operator dumps are cached under $QVO_CACHE_DIR keyed by their parameters.
json cached(const std::string& key, const std::function<json()>& make) {
  const char* dir = std::getenv("QVO_CACHE_DIR");
  if (!dir || !*dir) return make();
  std::filesystem::path p = std::filesystem::path(dir) / ("dump-" + std::to_string(std::hash<std::string>{}(key)) + ".json");
  if (std::filesystem::exists(p)) {
    json j = read_json(p.string());
    if (j.value("key", std::string()) == key) return j["value"];
  }
  json v = make();
  std::filesystem::create_directories(dir);
  std::ofstream f(p);
  if (f) f << json{{"key", key}, {"value", v}}.dump();
  return v;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownName:
    case ErrorCode::NotGeneric:
      return kExitConfig;
    default:
      return kExitFail;
  }
}

int cmd_check(const Common& c, const std::vector<std::string>& suites, std::uint64_t seed, int jobs, int samples) {
  SuiteConfig cfg;
  cfg.cartan = c.cartan;
  cfg.mode = parse_q(c.q);
  CartanPtr ct = parse_cartan(c.cartan);
  for (const auto& l : c.lambdas) cfg.lambdas.push_back(parse_lambda(ct, l));
  cfg.trunc = parse_trunc(c.trunc);
  cfg.suites = suites;
  cfg.seed = seed;
  cfg.jobs = jobs;
  cfg.samples = samples;
  validate_config(cfg);
  Report rep = run_suites(cfg);
  json j = rep.to_json();
  j["config"] = json{{"cartan", cfg.cartan}, {"q", cfg.mode.str()}, {"lambda", c.lambdas},
                     {"trunc", c.trunc},     {"suites", suites},      {"seed", seed}};
  emit(j, c.out);
  std::cerr << (rep.pass() ? "PASS" : "FAIL") << " " << rep.checks.size() << " checks, max residual "
            << rep.max_residual() << "\n";
  return rep.pass() ? kExitPass : kExitFail;
}

Diagram load_diagram(const std::string& path, json& inline_env) {
  json j = read_json(path);
  if (j.contains("env")) inline_env = j["env"];
  return diagram_from_json(j);
}

int cmd_eval(const Common& c, const std::string& file, const std::string& env_file, const std::string& compare) {
  QMode mode = parse_q(c.q);
  CartanPtr ct = parse_cartan(c.cartan);
  int H = parse_trunc(c.trunc);
  json env_j = json::object();
  Diagram d = load_diagram(file, env_j);
  if (!env_file.empty()) env_j = read_json(env_file);
  ColoringEnv env = ColoringEnv::from_json(env_j, ct, mode, H < 0 ? 4 : H);
  Boundary b = typecheck(d, env);
  json out{{"mode", mode_name(d.mode)}, {"source", obj_to_json(b.source)}, {"target", obj_to_json(b.target)}};
  if (!compare.empty()) {
    json other_env;
    Diagram d2 = load_diagram(compare, other_env);
    DotResult r = dot_equal(d, d2, env);
    out["dot_equal"] = r.equal;
    out["max_residual"] = r.max_residual;
    if (!r.equal) out["witness"] = r.witness;
    emit(out, c.out);
    return r.equal ? kExitPass : kExitFail;
  }
  out["map"] = evaluate(d, env).to_json();
  emit(out, c.out);
  return kExitPass;
}

int cmd_dump(const Common& c, const std::string& kind, const std::vector<std::string>& specs, int index) {
  QMode mode = parse_q(c.q);
  CartanPtr ct = parse_cartan(c.cartan);
  int H = parse_trunc(c.trunc);
  int h = H < 0 ? 3 : H;
  auto module_of = [&](const std::string& s) {
    std::string spec = s;
    if (spec.rfind("M(", 0) == 0 && spec.find(':') == std::string::npos) spec += ":" + std::to_string(h);
    return module_from_spec(ct, spec, mode);
  };
  std::vector<std::string> ms = specs;
  if (ms.empty()) {
    std::string vec = "L(1";
    for (int i = 1; i < ct->rank(); ++i) vec += ",0";
    vec += ")";
    ms = {vec, vec};
  }
  std::vector<Weight> ls;
  for (const auto& l : c.lambdas) ls.push_back(parse_lambda(ct, l));
  auto need_lambda = [&] {
    if (ls.empty()) fail(ErrorCode::ConfigError, kind + " needs --lambda");
    if (!ct->is_generic(ls[0])) fail(ErrorCode::ConfigError, "weight not generic: " + ls[0].str());
    return ls[0];
  };
  std::string key = kind + "|" + c.cartan + "|" + mode.str() + "|" + c.trunc + "|" + std::to_string(index);
  for (const auto& s : ms) key += "|" + s;
  for (const auto& l : c.lambdas) key += "|" + l;

  json out;
  if (kind == "rmatrix") {
    if (ms.size() != 2) fail(ErrorCode::ConfigError, "rmatrix needs two --module");
    out = cached(key, [&] { return r_op(module_of(ms[0]), module_of(ms[1])).to_json(); });
  } else if (kind == "ribbon") {
    out = cached(key, [&] {
      ModulePtr m = module_of(ms[0]);
      json j{{"map", ribbon_op(m).to_json()}};
      if (m->highest_weight && (m->kind == ModuleKind::Verma || m->kind == ModuleKind::Simple)) {
        const Weight& l = *m->highest_weight;
        Frac e = ct->pairing(l, l + Frac(2) * ct->rho());
        j["scalar"] = json{{"exponent", e.str()}, {"value", Scalar::q_pow(e, mode).to_json()}};
      }
      return j;
    });
  } else if (kind == "fusion") {
    Weight l = need_lambda();
    out = cached(key, [&] {
      std::vector<ModulePtr> spins;
      for (const auto& s : ms) spins.push_back(module_of(s));
      return fusion_operator(l, spins).to_json();
    });
  } else if (kind == "vertex") {
    Weight l = need_lambda();
    out = cached(key, [&] {
      ModulePtr v = module_of(ms[0]);
      if (index < 0 || index >= v->dim()) fail(ErrorCode::ConfigError, "--index out of range");
      VertexOp op = vertex_from_ev(l, v, unit_vector(v->dim(), index), h);
      json j{{"lambda", op.lambda.str()}, {"mu", op.mu.str()}, {"map", op.map.to_json()}};
      json ev = json::array();
      for (const auto& x : op.expectation) ev.push_back(x.to_json());
      j["expectation"] = ev;
      return j;
    });
  } else {
    fail(ErrorCode::ConfigError, "unknown dump kind '" + kind + "' (rmatrix, ribbon, fusion, vertex)");
  }
  emit(out, c.out);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum vertex operator and string diagram checker"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  int jobs = 1;
  int samples = 100;
  auto* check = app.add_subcommand("check", "run verification suites");
  add_common(check, common);
  check->add_option("--suite", suites, "suite name (repeatable); default all");
  check->add_option("--seed", seed, "random seed");
  check->add_option("--jobs", jobs, "worker threads");
  check->add_option("--samples", samples, "random diagrams in the diagram suite");

  std::string file, env_file, compare;
  auto* eval = app.add_subcommand("eval", "evaluate a diagram file");
  add_common(eval, common);
  eval->add_option("diagram", file, "diagram JSON")->required();
  eval->add_option("--env", env_file, "coloring environment JSON");
  eval->add_option("--compare", compare, "second diagram; prints dot-equality");

  std::string kind;
  std::vector<std::string> modules;
  int index = 0;
  auto* dump = app.add_subcommand("dump", "dump an operator");
  add_common(dump, common);
  dump->add_option("kind", kind, "rmatrix | ribbon | fusion | vertex")->required();
  dump->add_option("--module", modules, "module spec, e.g. L(1), M(1/3):4 (repeatable)");
  dump->add_option("--index", index, "basis index of the expectation value (vertex)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*check) return cmd_check(common, suites, seed, jobs, samples);
    if (*eval) return cmd_eval(common, file, env_file, compare);
    if (*dump) return cmd_dump(common, kind, modules, index);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}
