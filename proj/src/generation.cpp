#include "palm/generation.hpp"

#include <cctype>
#include <chrono>
#include <ctime>

#include "palm/corpus.hpp"

namespace palm {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool isLanguageTag(const std::string& line) {
  if (line.empty()) return true;
  for (char c : line) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '+') return false;
  }
  return true;
}

const PathVariant& variantOf(const std::vector<PathVariant>& paths, int pathId) {
  for (const auto& p : paths) {
    if (p.id == pathId) return p;
  }
  throw UnknownPath(pathId);
}

// Validates one test text against a variant.
TrialRecord check(const SubjectProgram& program, const PathVariant& variant, const std::string& testText,
                  const ExecOptions& options, ExecResult* execOut) {
  TrialRecord r;
  r.pathId = variant.id;
  r.testText = testText;
  r.timestamp = isoTimestamp();
  try {
    auto test = parseTestCase(testText, program, variant.entry);
    r.testText = test.text();
    auto exec = runVariant(variant, program, test, options);
    switch (exec.outcome) {
      case ExecResult::Outcome::Returned:
        r.verdict = Verdict::Covered;
        break;
      case ExecResult::Outcome::AssertionViolated:
        r.verdict = Verdict::Diverged;
        r.detail = exec.assertText;
        break;
      default:
        r.verdict = Verdict::RuntimeError;
        r.detail = exec.describe();
        break;
    }
    if (execOut) *execOut = std::move(exec);
  } catch (const TestParseError& e) {
    r.verdict = Verdict::ParseError;
    r.detail = e.what();
  }
  return r;
}

}  // namespace

std::optional<std::string> extractFencedBlock(const std::string& reply) {
  auto open = reply.find("```");
  if (open == std::string::npos) return std::nullopt;
  auto start = open + 3;
  auto close = reply.find("```", start);
  if (close == std::string::npos) return std::nullopt;
  std::string body = reply.substr(start, close - start);
  auto nl = body.find('\n');
  if (nl != std::string::npos && isLanguageTag(trim(body.substr(0, nl)))) body = body.substr(nl + 1);
  return trim(body);
}

std::string fencedReply(const std::string& testText) { return "```\n" + testText + "\n```"; }

ScriptedBackend ScriptedBackend::constant(std::string reply) {
  return ScriptedBackend([reply = std::move(reply)](const GenRequest&) { return reply; });
}

ScriptedBackend ScriptedBackend::replay(std::map<std::pair<int, int>, std::string> replies) {
  return ScriptedBackend(
      [replies = std::move(replies)](const GenRequest& req) {
        auto it = replies.find({req.pathId, req.trialIndex});
        return it == replies.end() ? std::string() : it->second;
      },
      "replay");
}

ScriptedBackend ScriptedBackend::fromJson(const nlohmann::json& j) {
  auto asReply = [](const std::string& r) { return r.empty() || r.find("```") != std::string::npos ? r : fencedReply(r); };
  std::map<std::pair<int, int>, std::string> replies;
  if (j.contains("replies")) {
    for (const auto& [path, list] : j.at("replies").items()) {
      int trial = 1;
      for (const auto& r : list) replies[{std::stoi(path), trial++}] = asReply(r.get<std::string>());
    }
  }
  std::string fallback = asReply(j.value("default", ""));
  return ScriptedBackend(
      [replies = std::move(replies), fallback](const GenRequest& req) {
        auto it = replies.find({req.pathId, req.trialIndex});
        return it == replies.end() ? fallback : it->second;
      },
      "scripted");
}

BruteForceBackend::BruteForceBackend(const SubjectProgram& program, std::vector<PathVariant> paths,
                                     InputDomains domains, ExecOptions options)
    : program_(program), paths_(std::move(paths)), domains_(std::move(domains)), options_(std::move(options)) {}

GenResponse BruteForceBackend::generate(const GenRequest& request) {
  const auto& variant = variantOf(paths_, request.pathId);
  auto found = bruteForceSearch(variant, program_, domains_, options_);
  if (!found.test) return {"no input in the search domains satisfies the path", true};
  return {fencedReply(found.test->text()), false};
}

std::string toString(Verdict v) {
  switch (v) {
    case Verdict::Covered: return "covered";
    case Verdict::Diverged: return "diverged";
    case Verdict::ParseError: return "parse-error";
    case Verdict::RuntimeError: return "runtime-error";
    case Verdict::Exhausted: return "exhausted";
  }
  return "parse-error";
}

Verdict verdictFromString(const std::string& s) {
  for (auto v : {Verdict::Covered, Verdict::Diverged, Verdict::ParseError, Verdict::RuntimeError, Verdict::Exhausted}) {
    if (toString(v) == s) return v;
  }
  throw PalmError("unknown verdict '" + s + "'");
}

std::string toString(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Done: return "done";
    case RunStatus::Cancelled: return "cancelled";
    case RunStatus::Failed: return "failed";
  }
  return "running";
}

nlohmann::json toJson(const TrialRecord& r) {
  return {{"pathId", r.pathId},       {"trialIndex", r.trialIndex}, {"promptText", r.promptText},
          {"testText", r.testText},   {"reply", r.reply},           {"verdict", toString(r.verdict)},
          {"detail", r.detail},       {"timestamp", r.timestamp},   {"userAuthored", r.userAuthored}};
}

TrialRecord trialFromJson(const nlohmann::json& j) {
  TrialRecord r;
  r.pathId = j.at("pathId").get<int>();
  r.trialIndex = j.value("trialIndex", 0);
  r.promptText = j.value("promptText", "");
  r.testText = j.value("testText", "");
  r.reply = j.value("reply", "");
  r.verdict = verdictFromString(j.at("verdict").get<std::string>());
  r.detail = j.value("detail", "");
  r.timestamp = j.value("timestamp", "");
  r.userAuthored = j.value("userAuthored", false);
  return r;
}

std::size_t RunState::trialCount() const {
  std::size_t n = 0;
  for (const auto& [path, list] : trials) n += list.size();
  return n;
}

nlohmann::json toJson(const RunState& s) {
  nlohmann::json trials = nlohmann::json::object();
  for (const auto& [path, list] : s.trials) {
    auto& arr = trials[std::to_string(path)] = nlohmann::json::array();
    for (const auto& r : list) arr.push_back(toJson(r));
  }
  nlohmann::json j = {{"runId", s.runId},          {"status", toString(s.status)}, {"backend", s.backend},
                      {"cfg", toJson(s.cfg)},       {"tree", s.tree.toJson()},      {"trials", std::move(trials)}};
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

std::string isoTimestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string pathPrompt(const SubjectProgram& program, const PathVariant& variant, const ExtractionConfig& cfg,
                       const DriverOptions& options) {
  if (options.promptOverride) {
    if (auto text = options.promptOverride(variant.id)) return *text;
  }
  const std::string& tmpl = options.promptTemplate.empty() ? defaultPromptTemplate() : options.promptTemplate;
  return buildPrompt(program, variant, cfg, tmpl);
}

RunState generateAll(const SubjectProgram& program, const std::vector<PathVariant>& paths, const SymTree& tree,
                     GeneratorBackend& backend, const ExtractionConfig& cfg, const DriverOptions& options) {
  RunState state;
  state.backend = backend.identity();
  state.cfg = cfg;
  state.tree = tree;

  // Leaves in enumeration order.
  for (const auto& [pathId, leaf] : tree.leaves()) {
    const auto& variant = variantOf(paths, pathId);
    if (!variant.feasibleCandidate()) continue;
    if (state.tree.leafStatus(pathId) != NodeStatus::Uncovered) continue;

    std::vector<PriorTrial> previous;
    for (int trial = 1; trial <= options.maxTrials; ++trial) {
      if (options.stop.stop_requested()) {
        state.status = RunStatus::Cancelled;
        return state;
      }
      GenRequest request;
      request.pathId = pathId;
      request.trialIndex = trial;
      request.variant = toJson(variant);
      request.previousTrials = previous;
      request.promptText = withFeedback(pathPrompt(program, variant, cfg, options), previous);

      GenResponse response;
      try {
        response = backend.generate(request);
      } catch (const BackendUnavailable& e) {
        state.status = RunStatus::Failed;
        state.error = e.what();
        return state;
      } catch (const DomainTooLarge& e) {
        state.status = RunStatus::Failed;
        state.error = e.what();
        return state;
      }

      TrialRecord record;
      if (response.exhausted) {
        record.pathId = pathId;
        record.verdict = Verdict::Exhausted;
        record.detail = response.reply;
        record.timestamp = isoTimestamp();
      } else if (auto block = extractFencedBlock(response.reply)) {
        record = check(program, variant, *block, options.exec, nullptr);
      } else {
        record.pathId = pathId;
        record.verdict = Verdict::ParseError;
        record.detail = "reply has no fenced code block";
        record.timestamp = isoTimestamp();
      }
      record.trialIndex = trial;
      record.promptText = request.promptText;
      record.reply = response.reply;

      if (record.verdict == Verdict::Covered) state.tree.markStatus(pathId, NodeStatus::Covered);
      if (record.verdict == Verdict::Exhausted) state.tree.markStatus(pathId, NodeStatus::Infeasible);
      state.trials[pathId].push_back(record);
      if (options.log) *options.log << toJson(record).dump() << '\n' << std::flush;
      if (options.onTrial) options.onTrial(state, record);

      if (record.verdict == Verdict::Covered || record.verdict == Verdict::Exhausted) break;
      previous.push_back({record.testText.empty() ? record.reply : record.testText, record.detail});
    }
  }
  state.status = RunStatus::Done;
  return state;
}

VerifyResult verifyTest(const SubjectProgram& program, const std::vector<PathVariant>& paths, SymTree& tree,
                        int pathId, const std::string& testText, const ExecOptions& options) {
  tree.leafOf(pathId);
  VerifyResult out;
  out.record = check(program, variantOf(paths, pathId), testText, options, &out.exec);
  out.record.userAuthored = true;
  out.record.trialIndex = 0;
  // A bound-exceeded variant accepts inputs that run past the bound; that is not coverage.
  if (out.record.verdict == Verdict::Covered && variantOf(paths, pathId).feasibleCandidate()) {
    tree.markStatus(pathId, NodeStatus::Covered);
  }
  return out;
}

}  // namespace palm
