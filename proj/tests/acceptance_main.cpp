#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acceptance.hpp"
#include "json.hpp"
#include "palm/printer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kParityLimit = 300.0;

struct Output {
  int status = -1;
  std::string text;
};

Output cli(const std::string& args) {
  std::string cmd = std::string(PALM_CLI_PATH) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.text.append(buf.data(), n);
  int raw = pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

std::vector<json> readLog(const fs::path& p) {
  std::vector<json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string headlessParity() {
  fs::path dir = fs::temp_directory_path() / ("palm-acceptance-" + std::to_string(getpid()));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() { fs::remove_all(dir); }
  } cleanup{dir};

  auto all = cli("acceptance");
  std::size_t passes = 0;
  std::istringstream lines(all.text);
  for (std::string line; std::getline(lines, line);) passes += line.starts_with("PASS ");
  if (all.status != 0 || passes != palm::acceptance::librarySuite().size()) return "palm acceptance:\n" + all.text;

  auto brute = cli("run --example tutorial --backend brute-force --out " + (dir / "brute.jsonl").string());
  if (brute.status != 0) return "palm run brute-force: " + brute.text;
  std::size_t covered = 0;
  for (const auto& rec : readLog(dir / "brute.jsonl")) covered += rec["verdict"] == "covered";
  if (covered != 4) return "brute-force run covered " + std::to_string(covered) + " tutorial paths";

  json script = {{"replies", {{"0", {"tutorial(1,1,0)", "tutorial(1,2,0)", "tutorial(1,3,0)", "tutorial(1,4,0)",
                                     "tutorial(1,5,0)"}}}}};
  std::ofstream(dir / "script.json") << script.dump();
  auto scripted = cli("run --example tutorial --backend scripted --max-trials 5 --script " +
                      (dir / "script.json").string() + " --out " + (dir / "scripted.jsonl").string());
  if (scripted.status != 0) return "palm run scripted: " + scripted.text;
  std::size_t diverged = 0;
  for (const auto& rec : readLog(dir / "scripted.jsonl")) diverged += rec["pathId"] == 0 && rec["verdict"] == "diverged";
  if (diverged != 5) return "scripted run logged " + std::to_string(diverged) + " diverged trials on path 0";

  auto verify = cli("verify --example tutorial --path 0 --test 'tutorial(1,1,0)'");
  if (verify.status != 1 || palm::compactText(verify.text) != "diverged:assertTrue(y+z>0)") {
    return "palm verify: " + verify.text;
  }
  auto locate = cli("locate --example tutorial --test 'tutorial(1,6,0)'");
  if (locate.status != 0 || locate.text != "path 0\n") return "palm locate: " + locate.text;
  auto dot = cli("tree --example pruning --dot");
  if (dot.status != 0 || dot.text.find("fillcolor=gray") == std::string::npos) return "palm tree --dot: " + dot.text;
  return {};
}

}  // namespace

int main() {
  auto suite = palm::acceptance::librarySuite();
  suite.push_back({"headless-parity", kParityLimit, headlessParity});
  return palm::acceptance::runSuite(suite, std::cout) ? 0 : 1;
}
