#include <gtest/gtest.h>

#include "palm/corpus.hpp"
#include "palm/coverage.hpp"
#include "palm/generation.hpp"
#include "palm/parser.hpp"

using namespace palm;

namespace {

struct Loaded {
  ProgramSpec spec;
  SubjectProgram program;
  ExtractionResult result;
  SymTree tree;

  explicit Loaded(const std::string& name)
      : spec(*findExample(name)),
        program(parse(spec.source)),
        result(enumeratePaths(program, spec.cfg)),
        tree(SymTree::build(result.paths)) {}

  CoverageReport measureTexts(const std::vector<std::string>& texts) const {
    std::vector<TestCase> tests;
    for (const auto& t : texts) tests.push_back(parseTestCase(t, program));
    return measure(program, result.paths, tree, spec.cfg, tests);
  }
};

}  // namespace

TEST(Coverage, EmptySuiteIsZero) {
  Loaded l("tutorial");
  auto r = l.measureTexts({});
  EXPECT_EQ(r.paths.value, 0.0);
  EXPECT_EQ(r.branches.value, 0.0);
  EXPECT_EQ(r.lines.value, 0.0);
  EXPECT_EQ(r.paths.total, 4u);
  EXPECT_EQ(r.branches.total, 4u);
}

TEST(Coverage, SameLeafCountedOnce) {
  Loaded l("tutorial");
  auto r = l.measureTexts({"tutorial(1,6,0)", "tutorial(2,7,0)"});
  EXPECT_EQ(r.paths.covered, 1u);
  EXPECT_DOUBLE_EQ(r.paths.value, 0.25);
  EXPECT_EQ(r.tests[0].pathId, r.tests[1].pathId);
}

TEST(Coverage, FullTutorialSuite) {
  Loaded l("tutorial");
  auto r = l.measureTexts({"tutorial(1,6,0)", "tutorial(1,1,0)", "tutorial(0,1,0)", "tutorial(0,0,0)"});
  EXPECT_DOUBLE_EQ(r.paths.value, 1.0);
  EXPECT_DOUBLE_EQ(r.branches.value, 1.0);
  EXPECT_DOUBLE_EQ(r.lines.value, 1.0);
  // Two ifs, the assignment and two returns; brace-only lines do not count.
  EXPECT_EQ(r.lines.total, 5u);
}

TEST(Coverage, MonotoneInTests) {
  Loaded l("palindrome");
  std::vector<std::string> suite{"is_palindrome(\"\")", "is_palindrome(\"ab\")", "is_palindrome(\"abca\")",
                                 "is_palindrome(\"abcba\")", "is_palindrome(\"a\")"};
  CoverageReport prev = l.measureTexts({});
  for (std::size_t n = 1; n <= suite.size(); ++n) {
    auto cur = l.measureTexts(std::vector<std::string>(suite.begin(), suite.begin() + static_cast<long>(n)));
    EXPECT_GE(cur.paths.value, prev.paths.value);
    EXPECT_GE(cur.branches.value, prev.branches.value);
    EXPECT_GE(cur.lines.value, prev.lines.value);
    prev = cur;
  }
}

TEST(Coverage, RuntimeErrorKeepsPartialTrace) {
  auto src = "int f(int x) { if (x > 0) { return 10 / (x - 1); } return 0; }";
  auto prog = parse(src);
  auto r = enumeratePaths(prog, {});
  auto tree = SymTree::build(r.paths);
  auto rep = measure(prog, r.paths, tree, {}, {parseTestCase("f(1)", prog)});
  EXPECT_EQ(rep.paths.covered, 0u);
  EXPECT_EQ(rep.branches.covered, 1u);
  EXPECT_FALSE(rep.tests[0].pathId);
  EXPECT_NE(rep.tests[0].note.find("divide-by-zero"), std::string::npos);
}

TEST(Coverage, PrunedLeafExcludedFromDenominator) {
  Loaded l("pruning");
  std::size_t pruned = 0;
  for (const auto& p : l.result.paths) pruned += p.prunedInfeasible;
  EXPECT_EQ(pruned, 1u);
  auto r = l.measureTexts({"pruned(5)", "pruned(0)"});
  EXPECT_EQ(r.paths.total, l.result.paths.size() - 1);
  EXPECT_DOUBLE_EQ(r.paths.value, 1.0);
  EXPECT_DOUBLE_EQ(r.inBoundsBranches.value, 1.0);
  EXPECT_LT(r.branches.value, 1.0);
  auto j = r.toJson();
  EXPECT_EQ(j["pathCoverage"]["ratio"], 1.0);
  EXPECT_NE(r.table().find("branch (in bounds)"), std::string::npos);
}

// A full brute-force run reaches every leaf it does not prove empty, and the
// resulting suite measures complete path and in-bounds branch coverage.
TEST(Coverage, BruteForceSuitesAreComplete) {
  for (const auto& spec : builtinCorpus()) {
    SCOPED_TRACE(spec.name);
    Loaded l(spec.name);
    BruteForceBackend backend(l.program, l.result.paths, l.spec.domains);
    auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
    ASSERT_EQ(state.status, RunStatus::Done) << state.error;
    std::vector<TestCase> suite;
    for (const auto& [path, list] : state.trials) {
      for (const auto& rec : list) {
        if (rec.verdict == Verdict::Covered) suite.push_back(parseTestCase(rec.testText, l.program));
      }
    }
    auto rep = measure(l.program, l.result.paths, state.tree, l.spec.cfg, suite);
    EXPECT_DOUBLE_EQ(rep.paths.value, 1.0) << rep.table();
    EXPECT_DOUBLE_EQ(rep.inBoundsBranches.value, 1.0) << rep.table();
    std::size_t exhausted = 0;
    for (const auto& [path, leaf] : state.tree.leaves()) {
      exhausted += l.result.paths[static_cast<std::size_t>(path)].feasibleCandidate() &&
                   state.tree.leafStatus(path) == NodeStatus::Infeasible;
    }
    std::cout << spec.name << ": " << l.result.paths.size() << " paths, " << suite.size() << " covered, "
              << exhausted << " exhausted\n";
  }
}
