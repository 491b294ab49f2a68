#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palm/extraction.hpp"
#include "palm/interpreter.hpp"

namespace palm {

class DomainTooLarge : public PalmError {
 public:
  explicit DomainTooLarge(double size, std::size_t budget)
      : PalmError("input domain has " + std::to_string(static_cast<long long>(size)) +
                  " candidates, budget is " + std::to_string(budget)) {}
};

/// Finite input domains for exhaustive search.
struct InputDomains {
  std::int64_t intMin = -8;
  std::int64_t intMax = 8;
  std::vector<double> doubles{-2.0, -1.1, -1.0, -0.5, 0.0, 0.5, 1.0, 1.1, 2.0, 3.0};
  std::string chars = "abc-f. ";
  std::string stringAlphabet = "abc -f";
  int maxStringLength = 4;
  int maxArrayLength = 3;
  std::size_t budget = 5'000'000;

  /// Values of one type in search order.
  std::vector<Value> values(SubjectType type) const;
  /// Number of candidates for one type (may be astronomically large).
  double size(SubjectType type) const;
};

nlohmann::json toJson(const InputDomains& d);
InputDomains domainsFromJson(const nlohmann::json& j);

struct SearchResult {
  /// First accepting test, if any.
  std::optional<TestCase> test;
  std::size_t candidates = 0;

  bool exhausted() const { return !test; }
};

/// Tries every argument tuple (first parameter outermost) until the variant
/// accepts one. Throws DomainTooLarge when the product exceeds the budget.
SearchResult bruteForceSearch(const PathVariant& variant, const SubjectProgram& program,
                              const InputDomains& domains, const ExecOptions& options = {});

}  // namespace palm
