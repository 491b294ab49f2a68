#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "palm/generation.hpp"

namespace palm {

LlmEndpoint endpointFromJson(const nlohmann::json& j) {
  LlmEndpoint e;
  e.baseUrl = j.at("baseUrl").get<std::string>();
  e.model = j.at("model").get<std::string>();
  e.apiKeyEnv = j.value("apiKeyEnv", e.apiKeyEnv);
  e.extraParams = j.value("extraParams", nlohmann::json::object());
  e.timeoutSeconds = j.value("timeoutSeconds", e.timeoutSeconds);
  e.maxRetryAfterSeconds = j.value("maxRetryAfterSeconds", e.maxRetryAfterSeconds);
  return e;
}

LlmHttpBackend::LlmHttpBackend(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.baseUrl.find("://") == std::string::npos) {
    throw PalmError("endpoint base URL needs a scheme: " + endpoint_.baseUrl);
  }
  while (!endpoint_.baseUrl.empty() && endpoint_.baseUrl.back() == '/') endpoint_.baseUrl.pop_back();
}

GenResponse LlmHttpBackend::generate(const GenRequest& request) {
  auto schemeEnd = endpoint_.baseUrl.find("://") + 3;
  auto slash = endpoint_.baseUrl.find('/', schemeEnd);
  std::string origin = endpoint_.baseUrl.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : endpoint_.baseUrl.substr(slash);

  nlohmann::json body = endpoint_.extraParams.is_object() ? endpoint_.extraParams : nlohmann::json::object();
  body["model"] = endpoint_.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.promptText}}});

  httplib::Headers headers;
  if (const char* key = std::getenv(endpoint_.apiKeyEnv.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(origin);
  client.set_connection_timeout(endpoint_.timeoutSeconds, 0);
  client.set_read_timeout(endpoint_.timeoutSeconds, 0);
  client.set_write_timeout(endpoint_.timeoutSeconds, 0);

  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw BackendUnavailable("chat endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status == 200) {
      try {
        auto reply = nlohmann::json::parse(res->body);
        return {reply.at("choices").at(0).at("message").at("content").get<std::string>(), false};
      } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("malformed chat completion: ") + e.what());
      }
    }
    std::string retryAfter = res->get_header_value("Retry-After");
    if (attempt == 0 && !retryAfter.empty()) {
      int seconds = std::atoi(retryAfter.c_str());
      if (seconds >= 0 && seconds <= endpoint_.maxRetryAfterSeconds) {
        std::this_thread::sleep_for(std::chrono::seconds(seconds));
        continue;
      }
    }
    throw BackendUnavailable("chat endpoint returned HTTP " + std::to_string(res->status));
  }
}

}  // namespace palm
