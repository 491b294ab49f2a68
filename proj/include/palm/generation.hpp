#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stop_token>
#include <string>
#include <vector>

#include "json.hpp"
#include "palm/bruteforce.hpp"
#include "palm/extraction.hpp"
#include "palm/interpreter.hpp"
#include "palm/prompt.hpp"
#include "palm/symtree.hpp"

namespace palm {

class BackendUnavailable : public PalmError {
 public:
  using PalmError::PalmError;
};

struct GenRequest {
  int pathId = 0;
  std::string promptText;
  nlohmann::json variant;
  std::vector<PriorTrial> previousTrials;
  /// 1-based.
  int trialIndex = 1;
};

struct GenResponse {
  std::string reply;
  /// Set by generators that proved no input exists (the brute-force oracle).
  bool exhausted = false;
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string identity() const = 0;
  virtual GenResponse generate(const GenRequest& request) = 0;
};

/// First fenced code block of a reply, without its language tag, trimmed.
std::optional<std::string> extractFencedBlock(const std::string& reply);

/// Wraps a test call in the fenced-block answer format.
std::string fencedReply(const std::string& testText);

/// Replies computed by a callback; used for tests and for replaying runs.
class ScriptedBackend : public GeneratorBackend {
 public:
  using Script = std::function<std::string(const GenRequest&)>;

  explicit ScriptedBackend(Script script, std::string name = "scripted")
      : script_(std::move(script)), name_(std::move(name)) {}

  /// Same reply for every request.
  static ScriptedBackend constant(std::string reply);
  /// Replies keyed by (pathId, trialIndex); missing keys get an empty reply.
  static ScriptedBackend replay(std::map<std::pair<int, int>, std::string> replies);
  /// {"replies": {"<pathId>": ["reply for trial 1", ...]}, "default": "reply"}.
  /// A reply without a fenced block is taken as a bare test call.
  static ScriptedBackend fromJson(const nlohmann::json& j);

  std::string identity() const override { return name_; }
  GenResponse generate(const GenRequest& request) override { return {script_(request), false}; }

 private:
  Script script_;
  std::string name_;
};

/// Exhaustive search over finite domains; reports exhaustion when the path
/// has no accepting input in the domains.
class BruteForceBackend : public GeneratorBackend {
 public:
  BruteForceBackend(const SubjectProgram& program, std::vector<PathVariant> paths, InputDomains domains,
                    ExecOptions options = {});

  std::string identity() const override { return "brute-force"; }
  GenResponse generate(const GenRequest& request) override;

 private:
  const SubjectProgram& program_;
  std::vector<PathVariant> paths_;
  InputDomains domains_;
  ExecOptions options_;
};

struct LlmEndpoint {
  /// e.g. https://api.openai.com/v1; requests go to <baseUrl>/chat/completions.
  std::string baseUrl;
  std::string model;
  std::string apiKeyEnv = "PALM_API_KEY";
  /// Merged into the request body (temperature and similar).
  nlohmann::json extraParams = nlohmann::json::object();
  int timeoutSeconds = 120;
  /// Longest Retry-After wait that is honored.
  int maxRetryAfterSeconds = 60;
};

LlmEndpoint endpointFromJson(const nlohmann::json& j);

/// OpenAI-compatible chat-completions client. The prompt is sent as the only
/// user message; the reply content is returned as is.
class LlmHttpBackend : public GeneratorBackend {
 public:
  explicit LlmHttpBackend(LlmEndpoint endpoint);

  std::string identity() const override { return "llm-http:" + endpoint_.model; }
  GenResponse generate(const GenRequest& request) override;

 private:
  LlmEndpoint endpoint_;
};

enum class Verdict { Covered, Diverged, ParseError, RuntimeError, Exhausted };

std::string toString(Verdict v);
Verdict verdictFromString(const std::string& s);

struct TrialRecord {
  int pathId = 0;
  /// 1..maxTrials for driver trials, 0 for user-authored checks.
  int trialIndex = 0;
  std::string promptText;
  std::string testText;
  /// Raw generator reply (kept when it does not parse).
  std::string reply;
  Verdict verdict = Verdict::ParseError;
  /// Diverging assertion, error text or parse error.
  std::string detail;
  std::string timestamp;
  bool userAuthored = false;
};

nlohmann::json toJson(const TrialRecord& r);
TrialRecord trialFromJson(const nlohmann::json& j);

enum class RunStatus { Running, Done, Cancelled, Failed };

std::string toString(RunStatus s);

struct RunState {
  std::string runId;
  RunStatus status = RunStatus::Running;
  std::string backend;
  ExtractionConfig cfg;
  SymTree tree;
  std::map<int, std::vector<TrialRecord>> trials;
  /// Set when the run failed.
  std::string error;

  std::size_t trialCount() const;
};

nlohmann::json toJson(const RunState& s);

struct DriverOptions {
  int maxTrials = 5;
  /// Empty selects the built-in template.
  std::string promptTemplate;
  /// Replaces the rendered prompt of a path (feedback is still appended).
  std::function<std::optional<std::string>(int pathId)> promptOverride;
  ExecOptions exec;
  /// Called after every trial with the updated state.
  std::function<void(const RunState&, const TrialRecord&)> onTrial;
  std::stop_token stop;
  /// JSON-lines trial log.
  std::ostream* log = nullptr;
};

/// Base prompt of a path: the override if one is set, else the template.
std::string pathPrompt(const SubjectProgram& program, const PathVariant& variant, const ExtractionConfig& cfg,
                       const DriverOptions& options);

/// Depth-first over the leaves in enumeration order, skipping pruned and
/// bound-exceeded paths; up to maxTrials generate/validate cycles per leaf.
RunState generateAll(const SubjectProgram& program, const std::vector<PathVariant>& paths, const SymTree& tree,
                     GeneratorBackend& backend, const ExtractionConfig& cfg, const DriverOptions& options = {});

struct VerifyResult {
  TrialRecord record;
  ExecResult exec;
};

/// Checks a test against one path's variant. Covered verdicts mark the leaf
/// covered. The record is flagged user-authored.
VerifyResult verifyTest(const SubjectProgram& program, const std::vector<PathVariant>& paths, SymTree& tree,
                        int pathId, const std::string& testText, const ExecOptions& options = {});

std::string isoTimestamp();

}  // namespace palm
