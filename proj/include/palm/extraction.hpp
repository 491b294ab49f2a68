#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "palm/ast.hpp"

namespace palm {

struct ExtractionConfig {
  int loopBound = 2;
  int recursionBound = 2;
  int maxPaths = 50;
  /// Empty selects the first declared function.
  std::string entryFunction;
  /// The entry function is always symbolic, whether listed or not.
  std::set<std::string> symbolicFunctions;

  std::string entryName(const SubjectProgram& program) const;
  std::set<std::string> effectiveSymbolic(const SubjectProgram& program) const;
  void validate(const SubjectProgram& program) const;
};

nlohmann::json toJson(const ExtractionConfig& cfg);
ExtractionConfig configFromJson(const nlohmann::json& j);

/// One statement of a linearized path. `provenance` is the id of the
/// original node the statement came from (the branch condition for asserts).
struct Step {
  StmtPtr stmt;
  NodeId provenance = kSyntheticNode;
  /// Asserts that fold to their expected value stay on the path but are not
  /// displayed.
  bool hidden = false;

  const AssertStmt* assertion() const { return stmt->as<AssertStmt>(); }
};

struct PathVariant {
  int id = 0;
  std::string entry;
  std::vector<Param> params;
  SubjectType returnType;
  std::vector<Step> steps;
  bool boundExceeded = false;
  bool prunedInfeasible = false;

  bool feasibleCandidate() const { return !boundExceeded && !prunedInfeasible; }
  /// (condition node, expected outcome) of every assert, hidden ones included.
  std::vector<std::pair<NodeId, bool>> outcomes() const;
  /// Printed asserts, hidden ones excluded.
  std::vector<std::string> assertTexts() const;
};

struct ExtractionResult {
  std::vector<PathVariant> paths;
  /// Set when enumeration stopped at maxPaths with paths left unexplored.
  bool truncated = false;
};

/// Intra-procedural enumeration of one function: branches become asserts,
/// loops unroll up to `loopBound`, calls stay as they are.
ExtractionResult enumerateIntra(const SubjectProgram& program, const FunctionDecl& fn,
                                int loopBound, int maxPaths);

/// Splices symbolic callees into each path (one variant per callee path).
/// Symbolic calls under the right operand of && or || stay opaque.
std::vector<PathVariant> inlineSymbolicCalls(const std::vector<PathVariant>& paths,
                                             const SubjectProgram& program,
                                             const ExtractionConfig& cfg);

/// Gives duplicated locals per-instance names base_0, base_1, ... binding
/// every use to the nearest preceding declaration.
PathVariant renameVariables(const PathVariant& path);

/// Propagates int/boolean/char constants along the path and folds constant
/// expressions. A folded assert that contradicts its expectation truncates
/// the path there and marks it prunedInfeasible.
PathVariant foldConstants(const PathVariant& path);

/// Full pipeline: enumerate, inline, rename, fold, drop duplicate pruned
/// paths, number 0..n-1.
ExtractionResult enumeratePaths(const SubjectProgram& program, const ExtractionConfig& cfg);

/// Ids of call expressions that inlining splices (unconditional calls of
/// symbolic functions inside symbolic functions).
std::set<NodeId> inlinedCallSites(const SubjectProgram& program, const ExtractionConfig& cfg);

/// Variant rendered as a function whose body is the visible steps.
std::string variantText(const PathVariant& path);

nlohmann::json toJson(const PathVariant& path);
nlohmann::json toJson(const ExtractionResult& result);

}  // namespace palm
