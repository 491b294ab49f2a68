#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace palm::acceptance {

struct Criterion {
  std::string name;
  /// Wall-clock limit; exceeding it fails the criterion.
  double limitSeconds = 0;
  /// Returns an empty string on success, else the reason for failure.
  std::function<std::string()> check;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// Every criterion that runs in-process.
std::vector<Criterion> librarySuite();

CriterionResult evaluate(const Criterion& c);

/// Evaluates each criterion and prints one PASS/FAIL line per result.
/// Returns true when all pass.
bool runSuite(const std::vector<Criterion>& suite, std::ostream& out);

}  // namespace palm::acceptance
