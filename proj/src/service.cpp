#include "palm/service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "palm/corpus.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

namespace palm {

namespace {

using nlohmann::json;

struct HttpError {
  int status;
  std::string message;
};

json diagnostic(const std::string& kind, const std::string& message, std::optional<SourcePos> pos) {
  json d = {{"kind", kind}, {"message", message}};
  if (pos) {
    d["line"] = pos->line;
    d["column"] = pos->column;
  }
  return d;
}

struct Run {
  std::string id;
  std::stop_source stop;
  // Guarded by the owning session's mutex.
  RunState state;
  std::jthread worker;
};

struct Session {
  std::mutex mutex;
  std::string id;
  std::string source;
  ExtractionConfig cfg;
  InputDomains domains;
  json diagnostics = json::array();
  std::optional<SubjectProgram> program;
  std::optional<ExtractionResult> extraction;
  std::optional<SymTree> tree;
  std::map<int, std::string> promptOverrides;
  std::map<int, std::vector<TrialRecord>> userTrials;
  std::shared_ptr<Run> run;
  int runCounter = 0;

  bool runActive() const { return run && run->state.status == RunStatus::Running; }
};

json parseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw HttpError{400, "request body must be a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError{400, std::string("malformed JSON body: ") + e.what()};
  }
}

std::string stringField(const json& body, const char* name) {
  if (!body.contains(name) || !body[name].is_string()) {
    throw HttpError{400, std::string("body needs a string field '") + name + "'"};
  }
  return body[name].get<std::string>();
}

int pathParam(const httplib::Request& req, std::size_t index) {
  try {
    return std::stoi(req.matches[index].str());
  } catch (const std::exception&) {
    throw HttpError{404, "unknown path"};
  }
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  httplib::Server server;
  std::mutex sessionsMutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::atomic<int> counter{0};
  std::thread listener;

  explicit Impl(ServiceConfig c) : config(std::move(c)) { routes(); }

  ~Impl() {
    std::vector<std::shared_ptr<Session>> all;
    {
      std::lock_guard lock(sessionsMutex);
      for (auto& [id, s] : sessions) all.push_back(s);
      sessions.clear();
    }
    for (auto& s : all) stopRun(*s);
  }

  // Requests stop and waits for the worker outside the session lock, since
  // the worker takes that lock to publish trials.
  static void stopRun(Session& s) {
    std::shared_ptr<Run> run;
    {
      std::lock_guard lock(s.mutex);
      run = s.run;
    }
    if (!run) return;
    run->stop.request_stop();
    if (run->worker.joinable()) run->worker.join();
  }

  std::shared_ptr<Session> session(const httplib::Request& req) {
    std::lock_guard lock(sessionsMutex);
    auto it = sessions.find(req.matches[1].str());
    if (it == sessions.end()) throw HttpError{404, "unknown session " + req.matches[1].str()};
    return it->second;
  }

  static void requireExtraction(Session& s) {
    if (!s.program) throw HttpError{400, "program has errors; see the session diagnostics"};
    if (!s.tree) {
      try {
        s.extraction = enumeratePaths(*s.program, s.cfg);
      } catch (const PalmError& e) {
        throw HttpError{400, e.what()};
      }
      s.tree = SymTree::build(s.extraction->paths);
    }
  }

  static const PathVariant& variant(Session& s, int pathId) {
    requireExtraction(s);
    for (const auto& p : s.extraction->paths) {
      if (p.id == pathId) return p;
    }
    throw HttpError{404, "unknown path " + std::to_string(pathId)};
  }

  std::string promptFor(Session& s, const PathVariant& v) {
    if (auto it = s.promptOverrides.find(v.id); it != s.promptOverrides.end()) return it->second;
    return buildPrompt(*s.program, v, s.cfg, defaultPromptTemplate());
  }

  static json sessionJson(const Session& s) {
    return {{"sessionId", s.id},
            {"source", s.source},
            {"cfg", toJson(s.cfg)},
            {"domains", toJson(s.domains)},
            {"diagnostics", s.diagnostics},
            {"extracted", s.tree.has_value()}};
  }

  json runJson(const Session& s) {
    json j = toJson(s.run->state);
    // The session tree also carries user verifications.
    if (s.tree) j["tree"] = s.tree->toJson();
    json user = json::object();
    for (const auto& [path, list] : s.userTrials) {
      auto& arr = user[std::to_string(path)] = json::array();
      for (const auto& r : list) arr.push_back(toJson(r));
    }
    j["userTrials"] = std::move(user);
    return j;
  }

  std::shared_ptr<GeneratorBackend> makeBackend(const SubjectProgram& program, const std::vector<PathVariant>& paths,
                                                const InputDomains& sessionDomains, const json& body) {
    std::string name = body.value("backend", "brute-force");
    if (name == "brute-force") {
      InputDomains domains = body.contains("domains") ? domainsFromJson(body["domains"]) : sessionDomains;
      return std::make_shared<BruteForceBackend>(program, paths, domains, config.exec);
    }
    if (name == "scripted") {
      return std::make_shared<ScriptedBackend>(ScriptedBackend::fromJson(body));
    }
    if (name == "llm-http") {
      std::optional<LlmEndpoint> endpoint = config.llm;
      if (body.contains("endpoint")) endpoint = endpointFromJson(body["endpoint"]);
      if (!endpoint) throw HttpError{400, "no LLM endpoint configured"};
      return std::make_shared<LlmHttpBackend>(*endpoint);
    }
    throw HttpError{400, "unknown backend '" + name + "'"};
  }

  template <typename Handler>
  httplib::Server::Handler wrap(Handler h) {
    return [this, h](const httplib::Request& req, httplib::Response& res) {
      try {
        json out = h(req);
        res.set_content(out.dump(), "application/json");
      } catch (const HttpError& e) {
        res.status = e.status;
        res.set_content(json{{"error", e.message}}.dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const PalmError& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    };
  }

  void routes() {
    server.Get("/examples", wrap([](const httplib::Request&) {
      json list = json::array();
      for (const auto& p : builtinCorpus()) {
        list.push_back({{"name", p.name}, {"title", p.title}, {"source", p.source}, {"cfg", toJson(p.cfg)}});
      }
      return list;
    }));

    server.Post("/sessions", wrap([this](const httplib::Request& req) { return createSession(req); }));

    server.Get(R"(/sessions/([^/]+))", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      return sessionJson(*s);
    }));

    server.Delete(R"(/sessions/([^/]+))", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      {
        std::lock_guard lock(sessionsMutex);
        sessions.erase(s->id);
      }
      stopRun(*s);
      return json{{"deleted", s->id}};
    }));

    server.Post(R"(/sessions/([^/]+)/extract)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      if (s->runActive()) throw HttpError{409, "a run is active"};
      s->tree.reset();
      s->extraction.reset();
      s->userTrials.clear();
      requireExtraction(*s);
      json j = s->tree->toJson();
      j["truncated"] = s->extraction->truncated;
      return j;
    }));

    server.Get(R"(/sessions/([^/]+)/tree)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      requireExtraction(*s);
      return s->tree->toJson();
    }));

    server.Get(R"(/sessions/([^/]+)/paths/(\d+))", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      const auto& v = variant(*s, pathParam(req, 2));
      json j = toJson(v);
      j["text"] = variantText(v);
      j["status"] = toString(s->tree->leafStatus(v.id));
      j["leafNodeId"] = s->tree->leafOf(v.id);
      json trials = json::array();
      if (s->run) {
        if (auto it = s->run->state.trials.find(v.id); it != s->run->state.trials.end()) {
          for (const auto& r : it->second) trials.push_back(toJson(r));
        }
      }
      if (auto it = s->userTrials.find(v.id); it != s->userTrials.end()) {
        for (const auto& r : it->second) trials.push_back(toJson(r));
      }
      j["trials"] = std::move(trials);
      return j;
    }));

    server.Get(R"(/sessions/([^/]+)/paths/(\d+)/prompt)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      const auto& v = variant(*s, pathParam(req, 2));
      return json{{"pathId", v.id}, {"prompt", promptFor(*s, v)}, {"overridden", s->promptOverrides.count(v.id) > 0}};
    }));

    server.Put(R"(/sessions/([^/]+)/paths/(\d+)/prompt)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      auto body = parseBody(req);
      std::string prompt = stringField(body, "prompt");
      std::lock_guard lock(s->mutex);
      const auto& v = variant(*s, pathParam(req, 2));
      if (prompt.empty()) {
        s->promptOverrides.erase(v.id);
      } else {
        s->promptOverrides[v.id] = prompt;
      }
      return json{{"pathId", v.id}, {"prompt", promptFor(*s, v)}, {"overridden", !prompt.empty()}};
    }));

    server.Post(R"(/sessions/([^/]+)/paths/(\d+)/verify)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      auto body = parseBody(req);
      std::string text = stringField(body, "testText");
      std::lock_guard lock(s->mutex);
      int pathId = variant(*s, pathParam(req, 2)).id;
      auto result = verifyTest(*s->program, s->extraction->paths, *s->tree, pathId, text, config.exec);
      const auto& r = result.record;
      if (r.verdict == Verdict::ParseError) {
        throw HttpError{400, r.detail};
      }
      s->userTrials[pathId].push_back(r);
      json j = {{"pathId", pathId},
                {"verdict", toString(r.verdict)},
                {"testText", r.testText},
                {"detail", r.detail},
                {"status", toString(s->tree->leafStatus(pathId))},
                {"record", toJson(r)}};
      if (r.verdict == Verdict::Diverged) {
        j["assert"] = r.detail;
        j["stepIndex"] = result.exec.stepIndex;
      }
      return j;
    }));

    server.Post(R"(/sessions/([^/]+)/locate)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      auto body = parseBody(req);
      std::string text = stringField(body, "testText");
      std::lock_guard lock(s->mutex);
      requireExtraction(*s);
      TestCase test;
      try {
        test = parseTestCase(text, *s->program, s->cfg.entryName(*s->program));
      } catch (const TestParseError& e) {
        throw HttpError{400, e.what()};
      }
      auto located = locatePath(*s->tree, *s->program, test, s->cfg, config.exec);
      json trace = json::array();
      for (const auto& ev : located.exec.trace) {
        trace.push_back({{"nodeId", ev.condNodeId}, {"outcome", ev.outcome}, {"inPathContext", ev.inPathContext}});
      }
      json j = {{"pathId", located.pathId ? json(*located.pathId) : json(nullptr)},
                {"trace", std::move(trace)},
                {"execution", located.exec.describe()},
                {"diagnostic", located.diagnostic}};
      if (located.pathId) j["leafNodeId"] = s->tree->leafOf(*located.pathId);
      return j;
    }));

    server.Post(R"(/sessions/([^/]+)/runs)", wrap([this](const httplib::Request& req) { return startRun(req); }));

    server.Get(R"(/sessions/([^/]+)/runs/current)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::lock_guard lock(s->mutex);
      if (!s->run) throw HttpError{404, "no run in this session"};
      return runJson(*s);
    }));

    server.Post(R"(/sessions/([^/]+)/runs/current/cancel)", wrap([this](const httplib::Request& req) {
      auto s = session(req);
      std::shared_ptr<Run> run;
      {
        std::lock_guard lock(s->mutex);
        if (!s->run) throw HttpError{404, "no run in this session"};
        run = s->run;
      }
      run->stop.request_stop();
      return json{{"runId", run->id}, {"cancelRequested", true}};
    }));

    if (!config.staticDir.empty()) server.set_mount_point("/", config.staticDir);
  }

  json createSession(const httplib::Request& req) {
    auto body = parseBody(req);
    auto s = std::make_shared<Session>();
    s->id = "s" + std::to_string(++counter);
    if (body.contains("example")) {
      auto spec = findExample(stringField(body, "example"));
      if (!spec) throw HttpError{404, "unknown example"};
      s->source = spec->source;
      s->cfg = spec->cfg;
      s->domains = spec->domains;
    } else {
      auto source = stringField(body, "source");
      auto spec = programSpec("session", source);
      s->source = source;
      s->cfg = spec.cfg;
      s->domains = spec.domains;
    }
    if (body.contains("cfg")) {
      auto merged = toJson(s->cfg);
      merged.merge_patch(body["cfg"]);
      s->cfg = configFromJson(merged);
    }
    if (body.contains("domains")) s->domains = domainsFromJson(body["domains"]);
    try {
      auto program = parse(s->source);
      s->cfg.validate(program);
      s->program = std::move(program);
    } catch (const SyntaxError& e) {
      s->diagnostics.push_back(diagnostic("syntax", e.what(), e.position()));
    } catch (const ResolveError& e) {
      s->diagnostics.push_back(diagnostic("resolve", e.what(), e.position()));
    } catch (const TypeError& e) {
      s->diagnostics.push_back(diagnostic("type", e.what(), e.position()));
    } catch (const PalmError& e) {
      s->diagnostics.push_back(diagnostic("config", e.what(), std::nullopt));
    }
    {
      std::lock_guard lock(sessionsMutex);
      sessions[s->id] = s;
    }
    return sessionJson(*s);
  }

  json startRun(const httplib::Request& req) {
    auto s = session(req);
    auto body = parseBody(req);
    std::lock_guard lock(s->mutex);
    if (s->runActive()) throw HttpError{409, "a run is already active"};
    requireExtraction(*s);
    // The worker keeps its own copies of the program and paths, so that a
    // later extract cannot invalidate them.
    auto program = std::make_shared<SubjectProgram>(*s->program);
    auto paths = std::make_shared<std::vector<PathVariant>>(s->extraction->paths);
    auto backend = makeBackend(*program, *paths, s->domains, body);

    if (s->run && s->run->worker.joinable()) s->run->worker.join();
    auto run = std::make_shared<Run>();
    run->id = s->id + "-r" + std::to_string(++s->runCounter);
    run->state.runId = run->id;
    run->state.backend = backend->identity();
    run->state.cfg = s->cfg;
    run->state.tree = *s->tree;
    s->run = run;

    DriverOptions options;
    options.maxTrials = body.value("maxTrials", config.maxTrials);
    options.exec = config.exec;
    options.stop = run->stop.get_token();
    std::weak_ptr<Session> weak = s;
    std::weak_ptr<Run> weakRun = run;
    // Called on the worker; overrides may change while the run is going.
    options.promptOverride = [weak](int pathId) -> std::optional<std::string> {
      auto session = weak.lock();
      if (!session) return std::nullopt;
      std::lock_guard lock(session->mutex);
      auto it = session->promptOverrides.find(pathId);
      if (it == session->promptOverrides.end()) return std::nullopt;
      return it->second;
    };
    options.onTrial = [weak, weakRun](const RunState& state, const TrialRecord& record) {
      auto session = weak.lock();
      auto r = weakRun.lock();
      if (!session || !r) return;
      std::lock_guard lock(session->mutex);
      r->state.trials = state.trials;
      if (session->tree && session->run == r) {
        if (record.verdict == Verdict::Covered) session->tree->markStatus(record.pathId, NodeStatus::Covered);
        if (record.verdict == Verdict::Exhausted) session->tree->markStatus(record.pathId, NodeStatus::Infeasible);
      }
    };

    SymTree tree = *s->tree;
    ExtractionConfig cfg = s->cfg;
    run->worker = std::jthread([weak, weakRun, program, paths, tree, cfg, backend, options] {
      RunState final = generateAll(*program, *paths, tree, *backend, cfg, options);
      auto session = weak.lock();
      auto r = weakRun.lock();
      if (!session || !r) return;
      std::lock_guard lock(session->mutex);
      final.runId = r->id;
      final.tree = session->tree ? *session->tree : final.tree;
      r->state = std::move(final);
    });
    return json{{"runId", run->id}, {"backend", run->state.backend}};
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw PalmError("cannot bind " + host + ":" + std::to_string(port));
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void Service::stop() {
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

}  // namespace palm
