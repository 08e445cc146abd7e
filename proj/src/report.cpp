#include "qvo/report.hpp"

#include <algorithm>

namespace qvo {

using json = nlohmann::json;

void CheckResult::absorb(const CompareResult& r, const std::string& what) {
  max_residual = std::max(max_residual, r.max_residual);
  compared += r.compared_columns;
  skipped += r.skipped_columns;
  if (!r.pass && pass) {
    pass = false;
    witness = (what.empty() ? std::string() : what + ": ") + "entry (" + std::to_string(r.row) + "," +
              std::to_string(r.col) + ") lhs=" + r.lhs + " rhs=" + r.rhs;
  }
}

void CheckResult::fail_with(const std::string& why) {
  if (pass) witness = why;
  pass = false;
}

json CheckResult::to_json() const {
  json j{{"identity", identity},  {"params", params},   {"mode", mode},     {"pass", pass},
         {"max_residual", max_residual}, {"compared", compared}, {"skipped", skipped}, {"seconds", seconds}};
  if (compared == 0) j["untestable"] = true;
  if (!witness.empty()) j["witness"] = witness;
  return j;
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

double Report::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.max_residual);
  return m;
}

json Report::to_json() const {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  return json{{"pass", pass()}, {"max_residual", max_residual()}, {"checks", arr}};
}

}  // namespace qvo
