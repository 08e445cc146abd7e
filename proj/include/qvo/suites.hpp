#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qvo/modules.hpp"
#include "qvo/report.hpp"

namespace qvo {

struct SuiteConfig {
  std::string cartan = "A1";
  QMode mode = QMode::Exact();
  std::vector<Weight> lambdas;  // empty: per-type defaults
  int trunc = -1;               // -1: auto
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  int jobs = 1;
  int samples = 100;  // random diagrams / stackings in the diagram suite
};

// Parses "a/b,c/d" into fundamental-weight coordinates.
Weight parse_lambda(const CartanPtr& c, const std::string& text);

// Generic weights used when the config gives none.
std::vector<Weight> default_lambdas(const CartanPtr& c);

// Names accepted by run_suite, in run order.
const std::vector<std::string>& suite_names();
// Suites that need generic weights.
bool suite_needs_generic(const std::string& name);

// Raises ConfigError when a weight required by the suites is not generic.
void validate_config(const SuiteConfig& cfg);

Report run_suite(const std::string& name, const SuiteConfig& cfg);
Report run_suites(const SuiteConfig& cfg);

// Independent jobs evaluated on a pool of `jobs` threads; results keep the input order.
std::vector<CheckResult> run_tasks(const std::vector<std::function<CheckResult()>>& tasks, int jobs);

// Weyl character formula at the principal specialization: Π [⟨λ+ρ,α^∨⟩]_{q_α} / [⟨ρ,α^∨⟩]_{q_α}.
Scalar weyl_quantum_dimension(const CartanPtr& c, const Weight& lambda, const QMode& mode);

}  // namespace qvo
