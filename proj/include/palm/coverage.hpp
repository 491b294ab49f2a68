#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "palm/extraction.hpp"
#include "palm/interpreter.hpp"
#include "palm/symtree.hpp"

namespace palm {

struct TestAttribution {
  std::string testText;
  std::optional<int> pathId;
  /// Runtime error or diagnostic when no path was located.
  std::string note;
};

struct Ratio {
  std::size_t covered = 0;
  std::size_t total = 0;
  double value = 0.0;
};

struct CoverageReport {
  /// Feasible leaves: not pruned, not bound-exceeded, not marked infeasible.
  Ratio paths;
  /// (condition, outcome) pairs over every condition of the program.
  Ratio branches;
  /// Pairs asserted by some feasible path.
  Ratio inBoundsBranches;
  /// Lines holding a statement or a condition.
  Ratio lines;
  std::vector<TestAttribution> tests;

  nlohmann::json toJson() const;
  std::string table() const;
};

std::set<std::pair<NodeId, bool>> branchPairs(const SubjectProgram& program);
std::set<int> executableLines(const SubjectProgram& program);

/// Runs every test on the original program. Path coverage counts each leaf
/// once however many tests reach it.
CoverageReport measure(const SubjectProgram& program, const std::vector<PathVariant>& paths, const SymTree& tree,
                       const ExtractionConfig& cfg, const std::vector<TestCase>& tests,
                       const ExecOptions& options = {});

}  // namespace palm
