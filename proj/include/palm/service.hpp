#pragma once

#include <memory>
#include <optional>
#include <string>

#include "palm/generation.hpp"

namespace palm {

struct ServiceConfig {
  /// Used by runs started with backend "llm-http".
  std::optional<LlmEndpoint> llm;
  int maxTrials = 5;
  ExecOptions exec;
  /// Served at / when set (the built web UI).
  std::string staticDir;
};

/// JSON-over-HTTP facade over sessions. Each session owns a program, its
/// extraction, the tree, prompt overrides, verification history and at most
/// one generation run executing on a background worker.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port
  /// (port 0 picks a free one).
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace palm
