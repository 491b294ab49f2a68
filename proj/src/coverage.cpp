#include "palm/coverage.hpp"

#include <cstdio>

#include "palm/rewrite.hpp"

namespace palm {

namespace {

Ratio ratio(std::size_t covered, std::size_t total, bool anyTests) {
  Ratio r{covered, total, 0.0};
  if (total > 0) {
    r.value = static_cast<double>(covered) / static_cast<double>(total);
  } else if (anyTests) {
    r.value = 1.0;
  }
  return r;
}

const Expr* conditionOf(const Stmt& s) {
  if (const auto* n = s.as<IfStmt>()) return n->cond.get();
  if (const auto* n = s.as<WhileStmt>()) return n->cond.get();
  if (const auto* n = s.as<DoWhileStmt>()) return n->cond.get();
  if (const auto* n = s.as<ForStmt>()) return n->cond.get();
  return nullptr;
}

nlohmann::json ratioJson(const Ratio& r) { return {{"covered", r.covered}, {"total", r.total}, {"ratio", r.value}}; }

}  // namespace

std::set<std::pair<NodeId, bool>> branchPairs(const SubjectProgram& program) {
  std::set<std::pair<NodeId, bool>> out;
  for (const auto& fn : program.functions) {
    forEachStmt(*fn.body, [&](const Stmt& s) {
      if (const Expr* c = conditionOf(s)) {
        out.insert({c->id, true});
        out.insert({c->id, false});
      }
    });
  }
  return out;
}

std::set<int> executableLines(const SubjectProgram& program) {
  std::set<int> out;
  for (const auto& fn : program.functions) {
    forEachStmt(*fn.body, [&](const Stmt& s) {
      if (!s.is<BlockStmt>()) out.insert(s.pos.line);
      if (const Expr* c = conditionOf(s)) out.insert(c->pos.line);
    });
  }
  return out;
}

CoverageReport measure(const SubjectProgram& program, const std::vector<PathVariant>& paths, const SymTree& tree,
                       const ExtractionConfig& cfg, const std::vector<TestCase>& tests, const ExecOptions& options) {
  auto allPairs = branchPairs(program);
  auto allLines = executableLines(program);

  std::set<int> feasible;
  std::set<std::pair<NodeId, bool>> inBounds;
  for (const auto& p : paths) {
    if (!p.feasibleCandidate() || tree.leafStatus(p.id) == NodeStatus::Infeasible) continue;
    feasible.insert(p.id);
    for (const auto& o : p.outcomes()) inBounds.insert(o);
  }

  CoverageReport report;
  std::set<int> coveredPaths, coveredLines;
  std::set<std::pair<NodeId, bool>> coveredPairs;
  for (const auto& test : tests) {
    auto located = locatePath(tree, program, test, cfg, options);
    for (const auto& ev : located.exec.trace) coveredPairs.insert({ev.condNodeId, ev.outcome});
    coveredLines.insert(located.exec.linesExecuted.begin(), located.exec.linesExecuted.end());
    TestAttribution a{test.text(), std::nullopt, located.diagnostic};
    if (located.pathId && feasible.count(*located.pathId)) {
      a.pathId = located.pathId;
      coveredPaths.insert(*located.pathId);
    }
    report.tests.push_back(std::move(a));
  }

  auto countIn = [](const auto& covered, const auto& universe) {
    std::size_t n = 0;
    for (const auto& x : covered) n += universe.count(x);
    return n;
  };
  bool any = !tests.empty();
  report.paths = ratio(coveredPaths.size(), feasible.size(), any);
  report.branches = ratio(countIn(coveredPairs, allPairs), allPairs.size(), any);
  report.inBoundsBranches = ratio(countIn(coveredPairs, inBounds), inBounds.size(), any);
  report.lines = ratio(countIn(coveredLines, allLines), allLines.size(), any);
  return report;
}

nlohmann::json CoverageReport::toJson() const {
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& t : tests) {
    nlohmann::json j = {{"test", t.testText}};
    j["pathId"] = t.pathId ? nlohmann::json(*t.pathId) : nlohmann::json(nullptr);
    if (!t.note.empty()) j["note"] = t.note;
    tj.push_back(std::move(j));
  }
  return {{"pathCoverage", ratioJson(paths)},
          {"branchCoverage", ratioJson(branches)},
          {"inBoundsBranchCoverage", ratioJson(inBoundsBranches)},
          {"lineCoverage", ratioJson(lines)},
          {"tests", std::move(tj)}};
}

std::string CoverageReport::table() const {
  std::string out = "metric              covered  total  ratio\n";
  auto row = [&](const char* name, const Ratio& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-18s %8zu %6zu %6.3f\n", name, r.covered, r.total, r.value);
    out += buf;
  };
  row("path", paths);
  row("branch", branches);
  row("branch (in bounds)", inBoundsBranches);
  row("line", lines);
  return out;
}

}  // namespace palm
