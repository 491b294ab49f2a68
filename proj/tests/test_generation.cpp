#include <gtest/gtest.h>

#include <sstream>

#include "httplib.h"
#include "palm/corpus.hpp"
#include "palm/generation.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

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

  int pathWith(std::vector<bool> outcomes) const {
    for (const auto& p : result.paths) {
      std::vector<bool> o;
      for (const auto& [id, b] : p.outcomes()) o.push_back(b);
      if (o == outcomes && p.feasibleCandidate()) return p.id;
    }
    throw std::runtime_error("no such path");
  }
};

}  // namespace

TEST(Fenced, Extraction) {
  EXPECT_EQ(extractFencedBlock("```\ntutorial(1,6,0)\n```"), "tutorial(1,6,0)");
  EXPECT_EQ(extractFencedBlock("```is_palindrome(\"abca\")```"), "is_palindrome(\"abca\")");
  EXPECT_EQ(extractFencedBlock("Sure:\n```java\nf(1);\n```\nand ```g(2)```"), "f(1);");
  EXPECT_FALSE(extractFencedBlock("just f(1)").has_value());
  EXPECT_FALSE(extractFencedBlock("```f(1)").has_value());
}

TEST(Prompt, IncludesHelpersAndVariantOnly) {
  Loaded l("last_char");
  const auto& v = l.result.paths.back();
  auto prompt = buildPrompt(l.program, v, l.spec.cfg, defaultPromptTemplate());
  EXPECT_NE(prompt.find("boolean isLetter(char c)"), std::string::npos);
  EXPECT_NE(prompt.find("c >= 'a' && c <= 'z'"), std::string::npos);
  EXPECT_NE(prompt.find("check_if_last_char_is_a_letter"), std::string::npos);
  // The variant replaces the entry's body: no if statement survives.
  EXPECT_EQ(prompt.find("if (parts.length == 0)"), std::string::npos);
  EXPECT_NE(prompt.find("assertFalse(parts.length == 0);"), std::string::npos);
  // Builtins appear only as calls.
  EXPECT_EQ(prompt.find("split("), prompt.rfind("split("));
  EXPECT_EQ(prompt.find("{{"), std::string::npos);
}

TEST(Prompt, FieldsAreIncluded) {
  Loaded l("argparse");
  auto prompt = buildPrompt(l.program, l.result.paths[0], l.spec.cfg, defaultPromptTemplate());
  EXPECT_NE(prompt.find("int flagCount = 0;"), std::string::npos);
}

TEST(Prompt, RetryAppendsFeedback) {
  auto p = withFeedback("base", {{"tutorial(1, 1, 0)", "assertTrue(y + z > 0)"}});
  EXPECT_EQ(p.rfind("base", 0), 0u);
  EXPECT_NE(p.find("tutorial(1, 1, 0)"), std::string::npos);
  EXPECT_NE(p.find("assertTrue(y + z > 0)"), std::string::npos);
  EXPECT_EQ(withFeedback("base", {}), "base");
}

TEST(Driver, FiveWrongTrials) {
  Loaded l("tutorial");
  int tt = l.pathWith({true, true});
  std::vector<GenRequest> seen;
  ScriptedBackend backend([&](const GenRequest& r) {
    seen.push_back(r);
    return fencedReply(r.pathId == tt ? "tutorial(1,1,0)" : "tutorial(0,0,0)");
  });
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  EXPECT_EQ(state.status, RunStatus::Done);
  ASSERT_EQ(state.trials[tt].size(), 5u);
  EXPECT_EQ(state.tree.leafStatus(tt), NodeStatus::Uncovered);
  std::vector<GenRequest> forPath;
  for (const auto& r : seen) {
    if (r.pathId == tt) forPath.push_back(r);
  }
  ASSERT_EQ(forPath.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(forPath[k].trialIndex, static_cast<int>(k + 1));
    ASSERT_EQ(forPath[k].previousTrials.size(), k);
    const auto& rec = state.trials[tt][k];
    EXPECT_EQ(rec.verdict, Verdict::Diverged);
    EXPECT_EQ(compactText(rec.detail), "assertTrue(y+z>0)");
    if (k + 1 < 5) {
      EXPECT_EQ(forPath[k + 1].previousTrials.back().feedback, rec.detail);
      EXPECT_NE(forPath[k + 1].promptText.find(rec.detail), std::string::npos);
    }
  }
}

TEST(Driver, FirstTryCovers) {
  Loaded l("tutorial");
  int tt = l.pathWith({true, true});
  ScriptedBackend backend([&](const GenRequest& r) {
    return fencedReply(r.pathId == tt ? "tutorial(1,6,0)" : "nonsense");
  });
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  ASSERT_EQ(state.trials[tt].size(), 1u);
  EXPECT_EQ(state.trials[tt][0].verdict, Verdict::Covered);
  EXPECT_EQ(state.tree.leafStatus(tt), NodeStatus::Covered);
  for (const auto& [path, list] : state.trials) {
    if (path == tt) continue;
    EXPECT_EQ(list.size(), 5u);
    for (const auto& r : list) EXPECT_EQ(r.verdict, Verdict::ParseError);
  }
}

TEST(Driver, BruteForceCoversTutorial) {
  Loaded l("tutorial");
  BruteForceBackend backend(l.program, l.result.paths, l.spec.domains);
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  EXPECT_EQ(state.tree.leaves().size(), 4u);
  for (const auto& [path, leaf] : state.tree.leaves()) EXPECT_EQ(state.tree.leafStatus(path), NodeStatus::Covered);
  EXPECT_EQ(state.trialCount(), 4u);
}

TEST(Driver, SkipsPrunedAndBoundLeaves) {
  Loaded l("palindrome");
  std::set<int> asked;
  ScriptedBackend backend([&](const GenRequest& r) {
    asked.insert(r.pathId);
    return std::string();
  });
  generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  for (const auto& p : l.result.paths) EXPECT_EQ(asked.count(p.id) > 0, p.feasibleCandidate()) << p.id;
}

TEST(Driver, ReplayReproducesStatuses) {
  Loaded l("palindrome");
  BruteForceBackend brute(l.program, l.result.paths, l.spec.domains);
  auto first = generateAll(l.program, l.result.paths, l.tree, brute, l.spec.cfg);
  std::map<std::pair<int, int>, std::string> replies;
  for (const auto& [path, list] : first.trials) {
    for (const auto& r : list) replies[{path, r.trialIndex}] = r.reply;
  }
  auto replay = ScriptedBackend::replay(replies);
  auto second = generateAll(l.program, l.result.paths, l.tree, replay, l.spec.cfg);
  for (const auto& [path, leaf] : l.tree.leaves()) {
    if (first.tree.leafStatus(path) == NodeStatus::Infeasible) continue;
    EXPECT_EQ(second.tree.leafStatus(path), first.tree.leafStatus(path)) << path;
  }
}

TEST(Driver, CancelAndLog) {
  Loaded l("tutorial");
  std::stop_source stop;
  std::ostringstream log;
  DriverOptions options;
  options.stop = stop.get_token();
  options.log = &log;
  int calls = 0;
  options.onTrial = [&](const RunState&, const TrialRecord&) {
    if (++calls == 2) stop.request_stop();
  };
  auto backend = ScriptedBackend::constant("no code");
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg, options);
  EXPECT_EQ(state.status, RunStatus::Cancelled);
  EXPECT_EQ(state.trialCount(), 2u);
  std::istringstream lines(log.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    auto rec = trialFromJson(nlohmann::json::parse(line));
    EXPECT_EQ(rec.verdict, Verdict::ParseError);
    EXPECT_EQ(rec.reply, "no code");
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST(Driver, BackendUnavailableKeepsPartialState) {
  Loaded l("tutorial");
  int calls = 0;
  ScriptedBackend backend([&](const GenRequest&) -> std::string {
    if (++calls > 3) throw BackendUnavailable("down");
    return "x";
  });
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg);
  EXPECT_EQ(state.status, RunStatus::Failed);
  EXPECT_EQ(state.error, "down");
  EXPECT_EQ(state.trialCount(), 3u);
}

TEST(Verify, Verdicts) {
  Loaded l("tutorial");
  int tt = l.pathWith({true, true});
  auto tree = l.tree;
  auto bad = verifyTest(l.program, l.result.paths, tree, tt, "tutorial(1,1,0)");
  EXPECT_EQ(bad.record.verdict, Verdict::Diverged);
  EXPECT_EQ(compactText(bad.record.detail), "assertTrue(y+z>0)");
  EXPECT_TRUE(bad.record.userAuthored);
  EXPECT_EQ(tree.leafStatus(tt), NodeStatus::Uncovered);
  auto good = verifyTest(l.program, l.result.paths, tree, tt, "tutorial(1,6,0)");
  EXPECT_EQ(good.record.verdict, Verdict::Covered);
  EXPECT_EQ(tree.leafStatus(tt), NodeStatus::Covered);
  EXPECT_EQ(verifyTest(l.program, l.result.paths, tree, tt, "tutorial(1,").record.verdict, Verdict::ParseError);
  EXPECT_EQ(verifyTest(l.program, l.result.paths, tree, tt, "tutorial(1,\"a\",0)").record.verdict,
            Verdict::ParseError);
  EXPECT_THROW(verifyTest(l.program, l.result.paths, tree, 77, "tutorial(1,6,0)"), UnknownPath);

  Loaded p("palindrome");
  auto tree2 = p.tree;
  int d = p.pathWith({true, false, true, true});
  EXPECT_EQ(verifyTest(p.program, p.result.paths, tree2, d, "is_palindrome(\"abca\")").record.verdict,
            Verdict::Covered);
}

TEST(BruteForce, DeterministicFirstHits) {
  Loaded p("palindrome");
  auto c = bruteForceSearch(p.result.paths[static_cast<std::size_t>(p.pathWith({true, true}))], p.program,
                            p.spec.domains);
  ASSERT_TRUE(c.test);
  EXPECT_EQ(c.test->text(), "is_palindrome(\"ab\")");
  Loaded t("tutorial");
  auto tt = bruteForceSearch(t.result.paths[static_cast<std::size_t>(t.pathWith({true, true}))], t.program,
                             t.spec.domains);
  ASSERT_TRUE(tt.test);
  EXPECT_EQ(tt.test->text(), "tutorial(1, -2, -8)");
}

TEST(BruteForce, ExhaustionAndBudget) {
  auto prog = parse("int f(int x) { if (x > 100) { return 1; } return 0; }");
  auto r = enumeratePaths(prog, {});
  InputDomains d;
  auto res = bruteForceSearch(r.paths[0], prog, d);
  EXPECT_TRUE(res.exhausted());
  EXPECT_EQ(res.candidates, 17u);
  d.budget = 10;
  EXPECT_THROW(bruteForceSearch(r.paths[0], prog, d), DomainTooLarge);
}

TEST(BruteForce, DomainShapes) {
  InputDomains d;
  using K = SubjectType::Kind;
  EXPECT_EQ(d.values(SubjectType::scalar(K::String)).size(), 1u + 6 + 36 + 216 + 1296);
  EXPECT_EQ(d.size(SubjectType::scalar(K::String)), 1555.0);
  d.maxStringLength = 1;
  SubjectType arr{K::String, true};
  EXPECT_EQ(d.values(arr).size(), 1u + 7 + 49 + 343);
  EXPECT_EQ(formatValue(d.values(arr)[1]), "{\"\"}");
  EXPECT_EQ(formatValue(d.values(SubjectType::scalar(K::Char))[3]), "'-'");
}

namespace {

struct FakeServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  FakeServer() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST(LlmHttp, SendsPromptAndParsesReply) {
  FakeServer fake;
  nlohmann::json received;
  std::string auth;
  fake.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    received = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(completion("Here:\n```\ntutorial(1,6,0)\n```"), "application/json");
  });
  ::setenv("PALM_TEST_KEY", "k123", 1);
  LlmHttpBackend backend({fake.url(), "m1", "PALM_TEST_KEY", {{"temperature", 0.2}}, 5, 5});
  GenRequest req;
  req.promptText = "PROMPT";
  auto r = backend.generate(req);
  EXPECT_EQ(extractFencedBlock(r.reply), "tutorial(1,6,0)");
  EXPECT_EQ(received["model"], "m1");
  EXPECT_EQ(received["temperature"], 0.2);
  ASSERT_EQ(received["messages"].size(), 1u);
  EXPECT_EQ(received["messages"][0]["role"], "user");
  EXPECT_EQ(received["messages"][0]["content"], "PROMPT");
  EXPECT_EQ(auth, "Bearer k123");
}

TEST(LlmHttp, RetryAfterHonoredOnce) {
  FakeServer fake;
  int calls = 0;
  fake.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 429;
      res.set_header("Retry-After", "0");
      return;
    }
    res.set_content(completion("```f(1)```"), "application/json");
  });
  LlmHttpBackend backend({fake.url(), "m", "PALM_UNSET_KEY", nlohmann::json::object(), 5, 5});
  EXPECT_EQ(backend.generate({}).reply, "```f(1)```");
  EXPECT_EQ(calls, 2);
}

TEST(LlmHttp, FailuresBecomeUnavailable) {
  FakeServer fake;
  int calls = 0;
  fake.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 503;
    res.set_header("Retry-After", "0");
  });
  LlmHttpBackend backend({fake.url(), "m", "PALM_UNSET_KEY", nlohmann::json::object(), 5, 5});
  EXPECT_THROW(backend.generate({}), BackendUnavailable);
  EXPECT_EQ(calls, 2);
  LlmHttpBackend nowhere({"http://127.0.0.1:1/v1", "m", "PALM_UNSET_KEY", nlohmann::json::object(), 1, 1});
  EXPECT_THROW(nowhere.generate({}), BackendUnavailable);
}

TEST(LlmHttp, ProseReplyIsParseErrorTrial) {
  FakeServer fake;
  fake.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("I think x should be positive."), "application/json");
  });
  Loaded l("tutorial");
  LlmHttpBackend backend({fake.url(), "m", "PALM_UNSET_KEY", nlohmann::json::object(), 5, 5});
  DriverOptions options;
  options.maxTrials = 1;
  auto state = generateAll(l.program, l.result.paths, l.tree, backend, l.spec.cfg, options);
  ASSERT_EQ(state.trials[0].size(), 1u);
  EXPECT_EQ(state.trials[0][0].verdict, Verdict::ParseError);
  EXPECT_EQ(state.trials[0][0].reply, "I think x should be positive.");
}

TEST(Scripted, FromJsonFencesBareReplies) {
  auto backend = ScriptedBackend::fromJson(
      {{"replies", {{"2", {"f(1)", "```java\nf(2)\n```"}}}}, {"default", "f(0)"}});
  GenRequest r;
  r.pathId = 2;
  r.trialIndex = 1;
  EXPECT_EQ(extractFencedBlock(backend.generate(r).reply), "f(1)");
  r.trialIndex = 2;
  EXPECT_EQ(extractFencedBlock(backend.generate(r).reply), "f(2)");
  r.pathId = 7;
  EXPECT_EQ(extractFencedBlock(backend.generate(r).reply), "f(0)");
}
