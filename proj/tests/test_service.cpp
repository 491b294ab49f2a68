#include <gtest/gtest.h>

#include <chrono>
#include <condition_variable>
#include <thread>

#include "httplib.h"
#include "palm/corpus.hpp"
#include "palm/printer.hpp"
#include "palm/service.hpp"

using namespace palm;
using nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    port = service.start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  json post(const std::string& path, const json& body, int expect = 200) {
    auto res = client->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect = 200) {
    auto res = client->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  std::string tutorialSession() {
    auto j = post("/sessions", {{"source", findExample("tutorial")->source}});
    EXPECT_TRUE(j["diagnostics"].empty());
    return j["sessionId"];
  }

  json waitForRun(const std::string& sid) {
    for (int i = 0; i < 500; ++i) {
      auto run = get("/sessions/" + sid + "/runs/current");
      if (run["status"] != "running") return run;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ADD_FAILURE() << "run did not finish";
    return {};
  }

  Service service;
  int port = 0;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_F(ServiceTest, ExamplesListed) {
  auto list = get("/examples");
  bool tutorial = false;
  for (const auto& e : list) tutorial |= e["name"] == "tutorial";
  EXPECT_TRUE(tutorial);
}

TEST_F(ServiceTest, DiagnosticsForBadSource) {
  auto j = post("/sessions", {{"source", "int f() { return y; }"}});
  ASSERT_EQ(j["diagnostics"].size(), 1u);
  EXPECT_EQ(j["diagnostics"][0]["kind"], "resolve");
  EXPECT_EQ(j["diagnostics"][0]["line"], 1);
  post("/sessions/" + j["sessionId"].get<std::string>() + "/extract", json::object(), 400);
  post("/sessions", json::array(), 400);
  auto res = client->Post("/sessions", "{not json", "application/json");
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServiceTest, ExtractTreeAndPaths) {
  auto sid = tutorialSession();
  auto tree = post("/sessions/" + sid + "/extract", json::object());
  EXPECT_EQ(tree["leaves"].size(), 4u);
  auto again = post("/sessions/" + sid + "/extract", json::object());
  EXPECT_EQ(again, tree);
  auto got = get("/sessions/" + sid + "/tree");
  EXPECT_EQ(got["nodes"], tree["nodes"]);
  auto path = get("/sessions/" + sid + "/paths/0");
  EXPECT_NE(path["text"].get<std::string>().find("assertTrue(x > 0);"), std::string::npos);
  EXPECT_EQ(path["status"], "uncovered");
  get("/sessions/" + sid + "/paths/9", 404);
  get("/sessions/nope/tree", 404);
}

TEST_F(ServiceTest, VerifyAndLocate) {
  auto sid = tutorialSession();
  post("/sessions/" + sid + "/extract", json::object());
  auto bad = post("/sessions/" + sid + "/paths/0/verify", {{"testText", "tutorial(1,1,0)"}});
  EXPECT_EQ(bad["verdict"], "diverged");
  EXPECT_EQ(compactText(bad["assert"].get<std::string>()), "assertTrue(y+z>0)");
  auto good = post("/sessions/" + sid + "/paths/0/verify", {{"testText", "tutorial(1,6,0)"}});
  EXPECT_EQ(good["verdict"], "covered");
  EXPECT_EQ(good["status"], "covered");
  auto history = get("/sessions/" + sid + "/paths/0")["trials"];
  ASSERT_EQ(history.size(), 2u);
  EXPECT_EQ(history[0]["verdict"], "diverged");
  EXPECT_TRUE(history[0]["userAuthored"].get<bool>());
  post("/sessions/" + sid + "/paths/0/verify", {{"testText", "tutorial(1,"}}, 400);
  post("/sessions/" + sid + "/paths/0/verify", json::object(), 400);

  auto loc = post("/sessions/" + sid + "/locate", {{"testText", "tutorial(1,6,0)"}});
  EXPECT_EQ(loc["pathId"], 0);
  EXPECT_EQ(loc["trace"].size(), 2u);
  auto tf = post("/sessions/" + sid + "/locate", {{"testText", "tutorial(1,1,0)"}});
  EXPECT_EQ(tf["pathId"], 1);
  post("/sessions/" + sid + "/locate", {{"testText", "other(1)"}}, 400);
}

TEST_F(ServiceTest, PromptOverride) {
  auto sid = tutorialSession();
  auto p = get("/sessions/" + sid + "/paths/1/prompt");
  EXPECT_FALSE(p["overridden"].get<bool>());
  EXPECT_NE(p["prompt"].get<std::string>().find("assertFalse(y + z > 0);"), std::string::npos);
  auto res = client->Put("/sessions/" + sid + "/paths/1/prompt", json{{"prompt", "custom"}}.dump(), "application/json");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(get("/sessions/" + sid + "/paths/1/prompt")["prompt"], "custom");
  // The override reaches the generator.
  post("/sessions/" + sid + "/runs", {{"backend", "scripted"}, {"default", "x"}, {"maxTrials", 1}});
  auto run = waitForRun(sid);
  EXPECT_EQ(run["trials"]["1"][0]["promptText"], "custom");
  EXPECT_NE(run["trials"]["0"][0]["promptText"], "custom");
}

TEST_F(ServiceTest, BruteForceRunCoversTutorial) {
  auto sid = tutorialSession();
  post("/sessions/" + sid + "/extract", json::object());
  auto started = post("/sessions/" + sid + "/runs", {{"backend", "brute-force"}});
  EXPECT_FALSE(started["runId"].get<std::string>().empty());
  auto run = waitForRun(sid);
  EXPECT_EQ(run["status"], "done");
  auto tree = get("/sessions/" + sid + "/tree");
  for (const auto& n : tree["nodes"]) {
    if (n.contains("pathId")) {
      EXPECT_EQ(n["status"], "covered");
    }
  }
  EXPECT_EQ(tree["nodes"][0]["status"], "covered");
}

TEST_F(ServiceTest, ConflictCancelAndDelete) {
  std::mutex m;
  std::condition_variable cv;
  bool release = false;
  httplib::Server fake;
  int fakePort = fake.bind_to_any_port("127.0.0.1");
  fake.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    std::unique_lock lock(m);
    cv.wait_for(lock, std::chrono::seconds(10), [&] { return release; });
    res.set_content(R"({"choices":[{"message":{"content":"none"}}]})", "application/json");
  });
  std::thread fakeThread([&] { fake.listen_after_bind(); });
  fake.wait_until_ready();

  auto sid = tutorialSession();
  auto other = tutorialSession();
  json endpoint = {{"baseUrl", "http://127.0.0.1:" + std::to_string(fakePort) + "/v1"}, {"model", "m"}};
  post("/sessions/" + sid + "/runs", {{"backend", "llm-http"}, {"endpoint", endpoint}});
  post("/sessions/" + sid + "/runs", {{"backend", "brute-force"}}, 409);
  post("/sessions/" + sid + "/extract", json::object(), 409);
  post("/sessions/" + sid + "/runs/current/cancel", json::object());
  {
    std::lock_guard lock(m);
    release = true;
  }
  cv.notify_all();
  auto run = waitForRun(sid);
  EXPECT_EQ(run["status"], "cancelled");
  EXPECT_EQ(run["trials"]["0"].size(), 1u);

  auto res = client->Delete("/sessions/" + sid);
  EXPECT_EQ(res->status, 200);
  get("/sessions/" + sid, 404);
  get("/sessions/" + other);
  post("/sessions/" + other + "/runs", {{"backend", "nope"}}, 400);
  get("/sessions/" + other + "/runs/current", 404);
  fake.stop();
  fakeThread.join();
}
