#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "palm/corpus.hpp"
#include "palm/coverage.hpp"
#include "palm/generation.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"
#include "palm/service.hpp"

using namespace palm;
using nlohmann::json;

namespace {

struct ProgramOptions {
  std::string file;
  std::string example;
  std::string entry;
  std::vector<std::string> symbolic;
  std::optional<int> loopBound;
  std::optional<int> recursionBound;
  std::optional<int> maxPaths;
  std::string domainsFile;
};

/// Exit status for a command that ran but did not reach its goal.
struct Unmet {
  int code = 1;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PalmError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json readJson(const std::string& path) {
  try {
    return json::parse(readFile(path));
  } catch (const json::parse_error& e) {
    throw PalmError(path + ": " + e.what());
  }
}

struct Workspace {
  ProgramSpec spec;
  SubjectProgram program;
  ExtractionResult result;
  SymTree tree;
  ExecOptions exec;

  const PathVariant& path(int id) const {
    if (id < 0 || id >= static_cast<int>(result.paths.size())) throw UnknownPath(id);
    return result.paths[static_cast<std::size_t>(id)];
  }
};

ProgramSpec loadSpec(const ProgramOptions& o) {
  if (o.file.empty() == o.example.empty()) throw PalmError("give exactly one of --program and --example");
  ProgramSpec spec;
  if (!o.example.empty()) {
    auto found = findExample(o.example);
    if (!found) throw PalmError("unknown example '" + o.example + "' (see `palm examples`)");
    spec = *found;
  } else {
    spec = programSpec(std::filesystem::path(o.file).stem().string(), readFile(o.file));
  }
  if (!o.entry.empty()) spec.cfg.entryFunction = o.entry;
  for (const auto& s : o.symbolic) spec.cfg.symbolicFunctions.insert(s);
  if (o.loopBound) spec.cfg.loopBound = *o.loopBound;
  if (o.recursionBound) spec.cfg.recursionBound = *o.recursionBound;
  if (o.maxPaths) spec.cfg.maxPaths = *o.maxPaths;
  if (!o.domainsFile.empty()) {
    json d = toJson(spec.domains);
    d.merge_patch(readJson(o.domainsFile));
    spec.domains = domainsFromJson(d);
  }
  return spec;
}

Workspace load(const ProgramOptions& o) {
  Workspace w{loadSpec(o), {}, {}, {}, {}};
  w.program = parse(w.spec.source);
  w.spec.cfg.validate(w.program);
  w.result = enumeratePaths(w.program, w.spec.cfg);
  w.tree = SymTree::build(w.result.paths);
  w.exec.inlinedCallSites = inlinedCallSites(w.program, w.spec.cfg);
  return w;
}

std::string pathKind(const PathVariant& p) {
  if (p.prunedInfeasible) return " [infeasible]";
  if (p.boundExceeded) return " [bound exceeded]";
  return "";
}

void printTree(const SymTree& tree, int id, int depth) {
  const auto& n = tree.node(id);
  std::cout << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.outcome) std::cout << (*n.outcome ? "T: " : "F: ");
  std::cout << n.label;
  if (n.hidden) std::cout << "  (folded)";
  if (n.pathId) std::cout << "  <path " << *n.pathId << ", " << toString(n.status) << ">";
  std::cout << "\n";
  for (int c : n.children) printTree(tree, c, depth + 1);
}

void printExec(const ExecResult& r) {
  std::cout << r.describe() << "\n";
  for (const auto& e : r.trace) {
    std::cout << "  branch " << e.condNodeId << " " << (e.outcome ? "T" : "F")
              << (e.inPathContext ? "" : " (opaque)") << "\n";
  }
}

std::vector<TestCase> readTests(const std::string& path, const SubjectProgram& program) {
  std::vector<TestCase> tests;
  if (path.ends_with(".jsonl")) {
    std::istringstream in(readFile(path));
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      auto rec = trialFromJson(json::parse(line));
      if (rec.verdict == Verdict::Covered) tests.push_back(parseTestCase(rec.testText, program));
    }
    return tests;
  }
  json j = readJson(path);
  if (!j.is_array()) throw PalmError(path + ": expected a JSON array of test calls");
  for (const auto& t : j) tests.push_back(parseTestCase(t.get<std::string>(), program));
  return tests;
}

std::vector<TestCase> coveringTests(const RunState& state, const SubjectProgram& program) {
  std::vector<TestCase> tests;
  for (const auto& [path, list] : state.trials) {
    for (const auto& rec : list) {
      if (rec.verdict == Verdict::Covered) tests.push_back(parseTestCase(rec.testText, program));
    }
  }
  return tests;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-aware test generation workbench"};
  app.require_subcommand(1);
  ProgramOptions po;

  auto programOptions = [&po](CLI::App* cmd) {
    auto* file = cmd->add_option("--program", po.file, "Subject program file");
    cmd->add_option("--example", po.example, "Built-in example name")->excludes(file);
    cmd->add_option("--entry", po.entry, "Entry function");
    cmd->add_option("--symbolic", po.symbolic, "Functions to inline")->delimiter(',');
    cmd->add_option("--loop-bound", po.loopBound, "Loop unrolling bound")->check(CLI::NonNegativeNumber);
    cmd->add_option("--recursion-bound", po.recursionBound, "Recursion bound")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-paths", po.maxPaths, "Path enumeration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--domains", po.domainsFile, "JSON overrides for the brute-force domains");
  };

  std::string testText;
  int pathId = 0;
  bool asJson = false, asDot = false;

  auto* examples = app.add_subcommand("examples", "List the built-in examples");
  examples->callback([] {
    for (const auto& s : builtinCorpus()) std::cout << s.name << "\t" << s.title << "\n";
  });

  auto* parseCmd = app.add_subcommand("parse", "Parse and pretty-print a program");
  programOptions(parseCmd);
  parseCmd->callback([&] { std::cout << prettyPrint(parse(loadSpec(po).source)); });

  auto* extract = app.add_subcommand("extract", "Enumerate path variants");
  programOptions(extract);
  extract->add_flag("--json", asJson, "Print JSON");
  extract->callback([&] {
    auto w = load(po);
    if (asJson) {
      std::cout << toJson(w.result).dump(2) << "\n";
      return;
    }
    for (const auto& p : w.result.paths) std::cout << "// path " << p.id << pathKind(p) << "\n" << variantText(p) << "\n";
    if (w.result.truncated) std::cout << "// stopped at " << w.spec.cfg.maxPaths << " paths\n";
  });

  auto* tree = app.add_subcommand("tree", "Print the symbolic tree");
  programOptions(tree);
  auto* dotFlag = tree->add_flag("--dot", asDot, "Graphviz output");
  tree->add_flag("--json", asJson, "JSON output")->excludes(dotFlag);
  tree->callback([&] {
    auto w = load(po);
    if (asDot) {
      std::cout << w.tree.toDot();
    } else if (asJson) {
      std::cout << w.tree.toJson().dump(2) << "\n";
    } else {
      printTree(w.tree, w.tree.rootId(), 0);
    }
  });

  auto* exec = app.add_subcommand("exec", "Run a test on the original program");
  programOptions(exec);
  exec->add_option("--test", testText, "Test call, e.g. f(1, \"ab\")")->required();
  exec->callback([&] {
    auto w = load(po);
    auto r = runProgram(w.program, parseTestCase(testText, w.program, w.spec.cfg.entryName(w.program)), w.exec);
    printExec(r);
    if (!r.returned()) throw Unmet{};
  });

  auto* verify = app.add_subcommand("verify", "Check that a test follows a path");
  programOptions(verify);
  verify->add_option("--path", pathId, "Path id")->required();
  verify->add_option("--test", testText, "Test call")->required();
  verify->callback([&] {
    auto w = load(po);
    w.path(pathId);
    auto v = verifyTest(w.program, w.result.paths, w.tree, pathId, testText, w.exec);
    std::cout << toString(v.record.verdict);
    if (!v.record.detail.empty()) std::cout << ": " << v.record.detail;
    std::cout << "\n";
    if (v.record.verdict == Verdict::ParseError) throw Unmet{2};
    if (v.record.verdict != Verdict::Covered) throw Unmet{};
  });

  auto* locate = app.add_subcommand("locate", "Find the path a test follows");
  programOptions(locate);
  locate->add_option("--test", testText, "Test call")->required();
  locate->callback([&] {
    auto w = load(po);
    auto test = parseTestCase(testText, w.program, w.spec.cfg.entryName(w.program));
    auto r = locatePath(w.tree, w.program, test, w.spec.cfg, w.exec);
    if (r.pathId) {
      std::cout << "path " << *r.pathId << "\n";
      return;
    }
    std::cout << "none: " << r.diagnostic << "\n";
    throw Unmet{};
  });

  std::string templateFile;
  auto* prompt = app.add_subcommand("prompt", "Show the generation prompt of a path");
  programOptions(prompt);
  prompt->add_option("--path", pathId, "Path id")->required();
  prompt->add_option("--template", templateFile, "Prompt template file");
  prompt->callback([&] {
    auto w = load(po);
    DriverOptions options;
    if (!templateFile.empty()) options.promptTemplate = readFile(templateFile);
    std::cout << pathPrompt(w.program, w.path(pathId), w.spec.cfg, options);
  });

  std::string backendName = "brute-force", outFile, scriptFile, llmConfig;
  int maxTrials = 5;
  auto* run = app.add_subcommand("run", "Generate tests for every path");
  programOptions(run);
  run->add_option("--backend", backendName, "brute-force, scripted or llm-http")
      ->check(CLI::IsMember({"brute-force", "scripted", "llm-http"}));
  run->add_option("--out", outFile, "JSON-lines trial log");
  run->add_option("--script", scriptFile, "Replies for the scripted backend (JSON)");
  run->add_option("--llm-config", llmConfig, "Endpoint settings for llm-http (JSON)");
  run->add_option("--max-trials", maxTrials, "Trials per path")->check(CLI::PositiveNumber);
  run->add_option("--template", templateFile, "Prompt template file");
  run->callback([&] {
    auto w = load(po);
    std::unique_ptr<GeneratorBackend> backend;
    if (backendName == "brute-force") {
      backend = std::make_unique<BruteForceBackend>(w.program, w.result.paths, w.spec.domains, w.exec);
    } else if (backendName == "scripted") {
      if (scriptFile.empty()) throw PalmError("the scripted backend needs --script");
      backend = std::make_unique<ScriptedBackend>(ScriptedBackend::fromJson(readJson(scriptFile)));
    } else {
      if (llmConfig.empty()) throw PalmError("the llm-http backend needs --llm-config");
      backend = std::make_unique<LlmHttpBackend>(endpointFromJson(readJson(llmConfig)));
    }
    std::ofstream log;
    DriverOptions options;
    options.maxTrials = maxTrials;
    options.exec = w.exec;
    if (!templateFile.empty()) options.promptTemplate = readFile(templateFile);
    if (!outFile.empty()) {
      log.open(outFile);
      if (!log) throw PalmError("cannot write " + outFile);
      options.log = &log;
    }
    auto state = generateAll(w.program, w.result.paths, w.tree, *backend, w.spec.cfg, options);
    for (const auto& p : w.result.paths) {
      std::cout << "path " << p.id << ": " << toString(state.tree.leafStatus(p.id));
      const auto& trials = state.trials[p.id];
      if (!trials.empty()) {
        const auto& last = trials.back();
        std::cout << " after " << trials.size() << " trial(s)";
        if (last.verdict == Verdict::Covered) std::cout << ", " << last.testText;
      }
      std::cout << "\n";
    }
    auto report = measure(w.program, w.result.paths, state.tree, w.spec.cfg, coveringTests(state, w.program), w.exec);
    std::cout << report.table() << "run " << toString(state.status) << " with " << backend->identity() << "\n";
    if (state.status != RunStatus::Done) {
      std::cerr << "error: " << state.error << "\n";
      throw Unmet{};
    }
  });

  std::string testsFile;
  auto* coverage = app.add_subcommand("coverage", "Measure a test suite");
  programOptions(coverage);
  coverage->add_option("--tests", testsFile, "JSON array of test calls, or a run log (.jsonl)")->required();
  coverage->add_flag("--json", asJson, "Print JSON");
  coverage->callback([&] {
    auto w = load(po);
    auto report = measure(w.program, w.result.paths, w.tree, w.spec.cfg, readTests(testsFile, w.program), w.exec);
    if (asJson) {
      std::cout << report.toJson().dump(2) << "\n";
    } else {
      std::cout << report.table();
    }
  });

  std::string host = "127.0.0.1", staticDir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--static-dir", staticDir, "Directory served at /");
  serve->add_option("--llm-config", llmConfig, "Endpoint settings for llm-http runs (JSON)");
  serve->add_option("--max-trials", maxTrials, "Default trials per path")->check(CLI::PositiveNumber);
  serve->callback([&] {
    ServiceConfig cfg;
    if (!llmConfig.empty()) cfg.llm = endpointFromJson(readJson(llmConfig));
    cfg.maxTrials = maxTrials;
    cfg.staticDir = staticDir;
    Service service(cfg);
    std::cout << "listening on " << host << ":" << port << std::endl;
    if (!service.listen(host, port)) throw PalmError("cannot listen on " + host + ":" + std::to_string(port));
  });

  auto* acceptance = app.add_subcommand("acceptance", "Run the acceptance checks");
  acceptance->callback([] {
    if (!acceptance::runSuite(acceptance::librarySuite(), std::cout)) throw Unmet{};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Unmet& u) {
    return u.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
