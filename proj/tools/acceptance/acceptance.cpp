#include "acceptance.hpp"

#include <chrono>
#include <random>
#include <sstream>

#include "palm/corpus.hpp"
#include "palm/coverage.hpp"
#include "palm/generation.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

namespace palm::acceptance {

namespace {

constexpr double kEnumerationLimit = 1.0;
constexpr double kExactLimit = 30.0;
constexpr double kDifferentialLimit = 30.0;
constexpr double kOracleLimit = 300.0;
constexpr int kDifferentialSamples = 500;
constexpr int kDifferentialAttempts = 50000;

struct Loaded {
  ProgramSpec spec;
  SubjectProgram program;
  ExtractionResult result;
  SymTree tree;

  explicit Loaded(const std::string& name) : spec(*findExample(name)), program(parse(spec.source)) {
    result = enumeratePaths(program, spec.cfg);
    tree = SymTree::build(result.paths);
  }
};

std::vector<std::string> compactAsserts(const PathVariant& p) {
  std::vector<std::string> out;
  for (const auto& t : p.assertTexts()) out.push_back(compactText(t));
  return out;
}

std::vector<bool> outcomeBits(const PathVariant& p) {
  std::vector<bool> out;
  for (const auto& [node, b] : p.outcomes()) out.push_back(b);
  return out;
}

std::optional<int> pathWithOutcomes(const std::vector<PathVariant>& paths, const std::vector<bool>& bits) {
  for (const auto& p : paths) {
    if (p.feasibleCandidate() && outcomeBits(p) == bits) return p.id;
  }
  return std::nullopt;
}

std::vector<TestCase> coveringSuite(const SubjectProgram& program, const RunState& state) {
  std::vector<TestCase> suite;
  for (const auto& [path, list] : state.trials) {
    for (const auto& rec : list) {
      if (rec.verdict == Verdict::Covered) suite.push_back(parseTestCase(rec.testText, program));
    }
  }
  return suite;
}

std::string enumerationGoldens() {
  using Bits = std::vector<std::vector<bool>>;
  auto bitsOf = [](const ExtractionResult& r) {
    Bits out;
    for (const auto& p : r.paths) out.push_back(outcomeBits(p));
    return out;
  };

  auto straight = enumeratePaths(parse("int f(int a) { int b = a + 1; int c = b * 2; return c; }"), {});
  if (straight.paths.size() != 1 || !straight.paths[0].outcomes().empty()) return "straight-line program";

  auto ifs = enumeratePaths(
      parse("int f(int a, int b) { int r = 0; if (a > 0) { r = r + 1; } if (b > 0) { r = r + 2; } return r; }"), {});
  if (bitsOf(ifs) != Bits{{true, true}, {true, false}, {false, true}, {false, false}}) return "two sequential ifs";

  ExtractionConfig k2;
  k2.loopBound = 2;
  auto loop = enumeratePaths(parse("int f(int n) { int i = 0; while (i < n) { i = i + 1; } return i; }"), k2);
  if (bitsOf(loop) != Bits{{false}, {true, false}, {true, true, false}, {true, true}}) return "loop outcome sequences";
  for (std::size_t i = 0; i < loop.paths.size(); ++i) {
    if (loop.paths[i].boundExceeded != (i == 3)) return "loop bound-exceeded flag on path " + std::to_string(i);
  }
  return {};
}

std::string palindromeFidelity() {
  Loaded l("palindrome");
  if (l.spec.cfg.loopBound != 2) return "palindrome loop bound is not 2";
  bool innerTrue = false;
  for (const auto& p : l.result.paths) {
    auto a = compactAsserts(p);
    innerTrue |= a.size() >= 2 && a[0] == "assertTrue(0<len)" &&
                 a[1] == "assertTrue(text.charAt(0)!=text.charAt(len-0-1))";
  }
  if (!innerTrue) return "no path starting assertTrue(0<len) then the inner condition";

  auto d = pathWithOutcomes(l.result.paths, {true, false, true, true});
  if (!d) return "no path with outcome sequence (T,F,T,T)";
  const auto& variant = l.result.paths[static_cast<std::size_t>(*d)];
  auto ab = runVariant(variant, l.program, parseTestCase("is_palindrome(\"ab\")", l.program));
  if (ab.outcome != ExecResult::Outcome::AssertionViolated || ab.assertText.find("charAt") == std::string::npos) {
    return "\"ab\" did not diverge at the inner condition: " + ab.describe();
  }
  auto abca = runVariant(variant, l.program, parseTestCase("is_palindrome(\"abca\")", l.program));
  if (!abca.returned()) return "\"abca\" did not pass: " + abca.describe();
  return {};
}

std::string tutorialFidelity() {
  Loaded l("tutorial");
  std::size_t feasible = 0;
  for (const auto& p : l.result.paths) feasible += p.feasibleCandidate();
  if (feasible != 4) return std::to_string(feasible) + " feasible paths";
  auto tt = pathWithOutcomes(l.result.paths, {true, true});
  if (!tt) return "no (T,T) path";
  auto good = verifyTest(l.program, l.result.paths, l.tree, *tt, "tutorial(1,6,0)");
  if (good.record.verdict != Verdict::Covered) return "tutorial(1,6,0): " + good.record.detail;
  auto bad = verifyTest(l.program, l.result.paths, l.tree, *tt, "tutorial(1,1,0)");
  if (bad.record.verdict != Verdict::Diverged || compactText(bad.record.detail) != "assertTrue(y+z>0)") {
    return "tutorial(1,1,0): " + toString(bad.record.verdict) + " " + bad.record.detail;
  }
  auto loc = locatePath(l.tree, l.program, parseTestCase("tutorial(1,6,0)", l.program), l.spec.cfg);
  if (loc.pathId != tt) return "locate tutorial(1,6,0) missed the (T,T) leaf";
  return {};
}

class RandomInputs {
 public:
  explicit RandomInputs(unsigned seed) : rng_(seed) {}

  Value operator()(SubjectType type) {
    if (type.isArray) {
      auto a = std::make_shared<Array>();
      a->elementType = type.element();
      int n = pick(0, 4);
      for (int i = 0; i < n; ++i) a->items.push_back((*this)(type.element()));
      return a;
    }
    switch (type.kind) {
      case SubjectType::Kind::Int: return std::int64_t{pick(-20, 20)};
      case SubjectType::Kind::Double:
        return pick(0, 1) ? static_cast<double>(pick(-10, 10)) : pick(-100, 100) / 10.0;
      case SubjectType::Kind::Boolean: return pick(0, 1) == 1;
      case SubjectType::Kind::Char: return Char{static_cast<std::uint8_t>(element(kChars))};
      case SubjectType::Kind::String: {
        std::string s;
        int n = pick(0, 5);
        for (int i = 0; i < n; ++i) s += element(kStringChars);
        return s;
      }
      case SubjectType::Kind::Void: break;
    }
    return {};
  }

 private:
  static constexpr std::string_view kChars = "abzAZ0 -.";
  static constexpr std::string_view kStringChars = "abcA -fv";

  char element(std::string_view s) { return s[static_cast<std::size_t>(pick(0, static_cast<int>(s.size()) - 1))]; }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::mt19937 rng_;
};

std::string differentialSemantics() {
  std::ostringstream problems;
  for (const auto& spec : builtinCorpus()) {
    Loaded l(spec.name);
    const auto& entry = *l.program.findFunction(l.spec.cfg.entryName(l.program));
    ExecOptions exec;
    exec.inlinedCallSites = inlinedCallSites(l.program, l.spec.cfg);
    RandomInputs random(20240601);
    int sampled = 0;
    for (int attempt = 0; attempt < kDifferentialAttempts && sampled < kDifferentialSamples; ++attempt) {
      TestCase test{entry.name, {}};
      for (const auto& p : entry.params) test.args.push_back(random(p.type));
      auto original = runProgram(l.program, test, exec);
      if (!original.returned() || !withinBounds(original, l.spec.cfg)) continue;
      ++sampled;
      std::vector<int> accepting;
      std::optional<Value> variantReturn;
      for (const auto& v : l.result.paths) {
        if (!v.feasibleCandidate()) continue;
        auto r = runVariant(v, l.program, test, exec);
        if (r.returned()) {
          accepting.push_back(v.id);
          variantReturn = r.returnValue;
        }
      }
      auto located = locatePath(l.tree, l.program, test, l.spec.cfg, exec);
      std::string where = spec.name + " " + test.text() + ": ";
      if (accepting.size() != 1) {
        problems << where << accepting.size() << " accepting variants; ";
      } else if (located.pathId != accepting.front()) {
        problems << where << "locate disagrees with the accepting variant; ";
      } else if (!sameValue(*variantReturn, original.returnValue)) {
        problems << where << "return values differ; ";
      }
    }
    if (sampled < kDifferentialSamples) problems << spec.name << ": only " << sampled << " in-bounds inputs; ";
  }
  return problems.str();
}

std::string driverContract() {
  Loaded l("tutorial");
  auto tt = pathWithOutcomes(l.result.paths, {true, true});
  if (!tt) return "no (T,T) path";
  // y + z > 0 with z = -5 needs y > 5, so each of these diverges.
  std::vector<std::string> wrong;
  for (int y = 1; y <= 5; ++y) wrong.push_back("tutorial(1, " + std::to_string(y) + ", 0)");
  std::map<int, std::string> feedbackSeen;
  ScriptedBackend backend([&](const GenRequest& r) -> std::string {
    if (r.pathId != *tt) return "no answer";
    if (!r.previousTrials.empty()) feedbackSeen[r.trialIndex] = r.previousTrials.back().feedback;
    return fencedReply(wrong[static_cast<std::size_t>(r.trialIndex - 1) % wrong.size()]);
  });
  DriverOptions options;
  options.maxTrials = 5;
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg, options);
  const auto& records = state.trials[*tt];
  if (records.size() != 5) return std::to_string(records.size()) + " trial records";
  if (state.tree.leafStatus(*tt) != NodeStatus::Uncovered) return "leaf is not uncovered";
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].verdict != Verdict::Diverged) return "trial " + std::to_string(k + 1) + " did not diverge";
    if (compactText(records[k].testText) != compactText(wrong[k])) return "trial test text mismatch";
    if (k + 1 < records.size()) {
      const auto& fb = feedbackSeen[static_cast<int>(k + 2)];
      if (fb != records[k].detail) return "feedback of trial " + std::to_string(k + 2) + " is '" + fb + "'";
      if (records[k + 1].promptText.find(fb) == std::string::npos) return "feedback missing from prompt";
    }
  }
  return {};
}

std::string oracleCompleteness() {
  std::ostringstream problems;
  for (const auto& spec : builtinCorpus()) {
    Loaded l(spec.name);
    ExecOptions exec;
    exec.inlinedCallSites = inlinedCallSites(l.program, l.spec.cfg);
    BruteForceBackend backend(l.program, l.result.paths, l.spec.domains, exec);
    DriverOptions options;
    options.exec = exec;
    auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg, options);
    if (state.status != RunStatus::Done) {
      problems << spec.name << ": run " << toString(state.status) << " " << state.error << "; ";
      continue;
    }
    for (const auto& [path, leaf] : state.tree.leaves()) {
      const auto& v = l.result.paths[static_cast<std::size_t>(path)];
      auto status = state.tree.leafStatus(path);
      if (v.feasibleCandidate() && status != NodeStatus::Covered && status != NodeStatus::Infeasible) {
        problems << spec.name << ": path " << path << " left " << toString(status) << "; ";
      }
    }
    auto report = measure(l.program, l.result.paths, state.tree, l.spec.cfg, coveringSuite(l.program, state), exec);
    if (report.paths.value != 1.0 || report.inBoundsBranches.value != 1.0) {
      problems << spec.name << ": pathCoverage " << report.paths.value << ", in-bounds branch coverage "
               << report.inBoundsBranches.value << "; ";
    }
  }
  return problems.str();
}

std::string pruning() {
  Loaded l("pruning");
  std::optional<int> pruned;
  for (const auto& p : l.result.paths) {
    if (p.prunedInfeasible) pruned = p.id;
  }
  if (!pruned) return "no prunedInfeasible path";
  int leaf = l.tree.leafOf(*pruned);
  if (l.tree.node(leaf).status != NodeStatus::Infeasible) return "pruned leaf status is not infeasible";
  std::string dot = l.tree.toDot();
  std::string node = "  n" + std::to_string(leaf) + " [";
  auto at = dot.find(node);
  if (at == std::string::npos || dot.substr(at, dot.find('\n', at) - at).find("fillcolor=gray") == std::string::npos) {
    return "pruned leaf is not drawn gray";
  }
  if (l.tree.toJson()["nodes"][static_cast<std::size_t>(leaf)]["status"] != "infeasible") return "tree JSON status";

  BruteForceBackend backend(l.program, l.result.paths, l.spec.domains);
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  auto report = measure(l.program, l.result.paths, state.tree, l.spec.cfg, coveringSuite(l.program, state));
  std::size_t feasible = 0;
  for (const auto& p : l.result.paths) feasible += p.feasibleCandidate();
  if (report.paths.total != feasible || feasible + 1 != l.result.paths.size()) {
    return "path denominator " + std::to_string(report.paths.total) + " of " + std::to_string(l.result.paths.size());
  }
  if (state.trials.count(*pruned)) return "generation ran on the pruned path";
  return {};
}

std::string argparseBug() {
  Loaded l("argparse");
  std::vector<int> targets;
  for (const auto& p : l.result.paths) {
    if (!p.feasibleCandidate()) continue;
    bool flag = false, followerFlagLike = false;
    for (const auto& s : compactAsserts(p)) {
      flag |= s == "assertTrue(args[0].equalsIgnoreCase(\"-f\"))";
      followerFlagLike |= s == "assertTrue(args[1].startsWith(\"-\"))";
    }
    if (flag && followerFlagLike) targets.push_back(p.id);
  }
  if (targets.empty()) return "no path where the argument after -f is flag-like";
  BruteForceBackend backend(l.program, l.result.paths, l.spec.domains);
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  for (int target : targets) {
    for (const auto& rec : state.trials[target]) {
      if (rec.verdict != Verdict::Covered) continue;
      auto loc = locatePath(l.tree, l.program, parseTestCase(rec.testText, l.program), l.spec.cfg);
      if (loc.pathId == target) return {};
    }
  }
  return "brute force located no test on the " + std::to_string(targets.size()) + " flag-like-follower paths";
}

}  // namespace

std::vector<Criterion> librarySuite() {
  return {
      {"enumeration-goldens", kEnumerationLimit, enumerationGoldens},
      {"palindrome-fidelity", kExactLimit, palindromeFidelity},
      {"tutorial-fidelity", kExactLimit, tutorialFidelity},
      {"differential-semantics", kDifferentialLimit, differentialSemantics},
      {"driver-contract", kExactLimit, driverContract},
      {"oracle-completeness", kOracleLimit, oracleCompleteness},
      {"pruning", kExactLimit, pruning},
      {"argparse-bug-surfacing", kExactLimit, argparseBug},
  };
}

CriterionResult evaluate(const Criterion& c) {
  CriterionResult r{c.name, false, {}, 0};
  auto start = std::chrono::steady_clock::now();
  try {
    r.detail = c.check();
    r.passed = r.detail.empty();
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.passed && r.seconds > c.limitSeconds) {
    r.passed = false;
    r.detail = "over the " + std::to_string(c.limitSeconds) + "s limit";
  }
  return r;
}

bool runSuite(const std::vector<Criterion>& suite, std::ostream& out) {
  bool all = true;
  for (const auto& c : suite) {
    auto r = evaluate(c);
    all &= r.passed;
    char time[32];
    std::snprintf(time, sizeof time, "%.3fs", r.seconds);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << time << ")";
    if (!r.detail.empty()) out << ": " << r.detail;
    out << std::endl;
  }
  return all;
}

}  // namespace palm::acceptance
