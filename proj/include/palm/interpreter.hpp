#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "palm/ast.hpp"
#include "palm/errors.hpp"
#include "palm/extraction.hpp"
#include "palm/symtree.hpp"
#include "palm/value.hpp"

namespace palm {

class TestParseError : public PalmError {
 public:
  using PalmError::PalmError;
};

/// A call of the entry function with literal arguments, e.g. `f(1, "ab", {1, 2})`.
struct TestCase {
  std::string entry;
  std::vector<Value> args;

  std::string text() const;
};

/// Parses test-call text and checks it against the signature of `entry`
/// (or of the called function when `entry` is empty). int literals widen to
/// double parameters. Throws TestParseError.
TestCase parseTestCase(std::string_view text, const SubjectProgram& program,
                       const std::string& entry = {});

struct TraceEvent {
  NodeId condNodeId = kSyntheticNode;
  bool outcome = false;
  /// False inside frames that path extraction keeps opaque.
  bool inPathContext = false;

  bool operator==(const TraceEvent&) const = default;
};

/// Loop iterations and recursion depth observed in path-context frames.
struct ExecStats {
  int maxLoopIterations = 0;
  int maxRecursionDepth = 0;
};

struct ExecOptions {
  std::size_t stepLimit = 100000;
  /// Call sites whose callee frames belong to the path context.
  std::set<NodeId> inlinedCallSites;
};

struct ExecResult {
  enum class Outcome { Returned, AssertionViolated, RuntimeError, StepLimitExceeded };

  Outcome outcome = Outcome::Returned;
  Value returnValue;
  // AssertionViolated
  std::size_t stepIndex = 0;
  std::string assertText;
  bool expected = true;
  // RuntimeError: divide-by-zero, index-out-of-bounds, negative-substring,
  // negative-array-size, null-array, missing-return, call-depth-exceeded
  std::string errorKind;
  SourcePos errorPos;

  std::vector<TraceEvent> trace;
  std::set<int> linesExecuted;
  ExecStats stats;

  bool returned() const { return outcome == Outcome::Returned; }
  std::string describe() const;
};

std::string toString(ExecResult::Outcome o);

ExecResult runProgram(const SubjectProgram& program, const TestCase& test,
                      const ExecOptions& options = {});

/// Executes the straight-line steps of a variant; asserts halt execution
/// with AssertionViolated on the first mismatch.
ExecResult runVariant(const PathVariant& variant, const SubjectProgram& program,
                      const TestCase& test, const ExecOptions& options = {});

/// True when the execution stayed within the loop and recursion bounds.
bool withinBounds(const ExecResult& r, const ExtractionConfig& cfg);

struct LocateResult {
  std::optional<int> pathId;
  ExecResult exec;
  std::string diagnostic;
};

/// Runs the original program and walks the tree along the path-context
/// branch outcomes. Returns no path for errors and for executions that end
/// on a bound-exceeded or infeasible leaf or leave the tree.
LocateResult locatePath(const SymTree& tree, const SubjectProgram& program, const TestCase& test,
                        const ExtractionConfig& cfg, const ExecOptions& options = {});

}  // namespace palm
