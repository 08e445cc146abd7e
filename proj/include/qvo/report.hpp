#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qvo/matrix.hpp"

namespace qvo {

// Outcome of one identity check.
struct CheckResult {
  std::string identity;
  nlohmann::json params = nlohmann::json::object();
  std::string mode = "exact";
  bool pass = true;
  double max_residual = 0.0;
  int compared = 0;
  int skipped = 0;
  std::string witness;
  double seconds = 0.0;

  // Folds a matrix comparison into this result.
  void absorb(const CompareResult& r, const std::string& what = "");
  void fail_with(const std::string& why);
  nlohmann::json to_json() const;
};

struct Report {
  std::vector<CheckResult> checks;
  bool pass() const;
  double max_residual() const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void merge(const Report& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
  nlohmann::json to_json() const;
};

}  // namespace qvo
