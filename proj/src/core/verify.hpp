#pragma once

// Property suites behind the `verify` subcommand: each check reports a
// pass/fail flag and its worst-case slack. The acceptance tests reuse these
// routines with the full sample counts.

#include <string>
#include <vector>

namespace soliton {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst slack observed (sign convention per check)
  std::string detail;
};

// suite in {convexity, monotonicity, bounds, gradients, oracle}
std::vector<CheckResult> run_verify_suite(const std::string& suite, bool quick);

bool known_suite(const std::string& suite);

}  // namespace soliton
