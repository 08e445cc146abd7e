// Acceptance driver: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qvo/errors.hpp"
#include "qvo/suites.hpp"

using namespace qvo;

namespace {

constexpr double kFloatQ0 = 0.83;
constexpr double kFloatTol = 1e-9;

struct Run {
  std::string cartan;
  std::string suite;
};

struct Criterion {
  int number;
  std::string title;
  double limit_seconds;
  std::vector<Run> runs;
};

SuiteConfig config_for(const Run& r, const QMode& mode) {
  SuiteConfig cfg;
  cfg.cartan = r.cartan;
  cfg.mode = mode;
  cfg.suites = {r.suite};
  cfg.seed = 1;
  cfg.samples = 100;
  return cfg;
}

struct Outcome {
  bool pass = true;
  double seconds = 0.0;
  double max_residual = 0.0;
  int checks = 0;
  std::string witness;
};

Outcome execute(const std::vector<Run>& runs, const QMode& mode) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  for (const Run& r : runs) {
    try {
      Report rep = run_suite(r.suite, config_for(r, mode));
      o.checks += static_cast<int>(rep.checks.size());
      o.max_residual = std::max(o.max_residual, rep.max_residual());
      for (const auto& c : rep.checks)
        if (!c.pass && o.witness.empty()) o.witness = r.cartan + " " + c.identity + ": " + c.witness;
      o.pass = o.pass && rep.pass() && !rep.checks.empty();
    } catch (const Error& e) {
      o.pass = false;
      if (o.witness.empty()) o.witness = r.cartan + " " + r.suite + ": " + e.what();
    }
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

bool report(const std::string& label, double limit, const Outcome& o, double residual_bound) {
  bool in_time = o.seconds < limit;
  bool residual_ok = residual_bound == 0.0 ? o.max_residual == 0.0 : o.max_residual < residual_bound;
  bool ok = o.pass && in_time && residual_ok;
  std::printf("%s %s: %d checks, %.2f s (limit %.0f s), max residual %.3g", ok ? "PASS" : "FAIL", label.c_str(), o.checks,
              o.seconds, limit, o.max_residual);
  if (!o.pass) std::printf(" [%s]", o.witness.c_str());
  if (!in_time) std::printf(" [over time]");
  if (!residual_ok) std::printf(" [residual]");
  std::printf("\n");
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "relations", 10, {{"A1", "relations"}, {"A2", "relations"}, {"B2", "relations"}}},
      {2, "R-matrix", 30, {{"A1", "rmatrix"}, {"A2", "rmatrix"}, {"B2", "rmatrix"}}},
      {3, "ribbon", 30, {{"A1", "ribbon"}, {"A2", "ribbon"}, {"B2", "ribbon"}}},
      {4, "duality", 5, {{"A1", "duality"}, {"A2", "duality"}, {"B2", "duality"}}},
      {5, "diagrams", 60, {{"A1", "diagrams"}}},
      {6, "vertex operators", 60, {{"A1", "vertexops"}}},
      {7, "ABRR and qKZ", 300, {{"A1", "abrr"}, {"A2", "abrr"}, {"A1", "qkz"}}},
  };

  bool all = true;
  std::vector<Run> every;
  for (const auto& c : criteria) {
    Outcome o = execute(c.runs, QMode::Exact());
    all = report("criterion " + std::to_string(c.number) + " (" + c.title + ", exact)", c.limit_seconds, o, 0.0) && all;
    every.insert(every.end(), c.runs.begin(), c.runs.end());
  }

  Outcome f = execute(every, QMode::Float(kFloatQ0, kFloatTol));
  all = report("criterion 8 (float mode q0=0.83 tol=1e-9, all suites)", 60, f, kFloatTol) && all;
  return all ? 0 : 1;
}
