#include "palm/corpus.hpp"

#include <algorithm>
#include <sstream>

namespace palm {

// Defined in the build-generated embedded_assets.cpp.
namespace embedded {
struct Asset {
  const char* name;
  const char* text;
};
extern const Asset kCorpus[];
extern const std::size_t kCorpusSize;
extern const char* const kPromptTemplate;
}  // namespace embedded

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int toInt(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw PalmError("directive @" + key + " expects an integer, got '" + value + "'");
}

}  // namespace

ProgramSpec programSpec(std::string name, std::string source) {
  ProgramSpec spec;
  spec.name = std::move(name);
  std::istringstream in(source);
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.rfind("// @", 0) != 0) continue;
    t = t.substr(4);
    auto space = t.find(' ');
    std::string key = t.substr(0, space);
    std::string value = space == std::string::npos ? "" : trim(t.substr(space));
    if (key == "title") {
      spec.title = value;
    } else if (key == "entry") {
      spec.cfg.entryFunction = value;
    } else if (key == "symbolic") {
      std::istringstream names(value);
      std::string n;
      while (std::getline(names, n, ',')) {
        if (auto clean = trim(n); !clean.empty()) spec.cfg.symbolicFunctions.insert(clean);
      }
    } else if (key == "loopBound") {
      spec.cfg.loopBound = toInt(key, value);
    } else if (key == "recursionBound") {
      spec.cfg.recursionBound = toInt(key, value);
    } else if (key == "maxPaths") {
      spec.cfg.maxPaths = toInt(key, value);
    } else if (key == "intMin") {
      spec.domains.intMin = toInt(key, value);
    } else if (key == "intMax") {
      spec.domains.intMax = toInt(key, value);
    } else if (key == "maxStringLength") {
      spec.domains.maxStringLength = toInt(key, value);
    } else if (key == "maxArrayLength") {
      spec.domains.maxArrayLength = toInt(key, value);
    } else {
      throw PalmError("unknown directive @" + key);
    }
  }
  if (spec.title.empty()) spec.title = spec.name;
  spec.source = std::move(source);
  return spec;
}

const std::vector<ProgramSpec>& builtinCorpus() {
  static const std::vector<ProgramSpec> corpus = [] {
    std::vector<ProgramSpec> out;
    for (std::size_t i = 0; i < embedded::kCorpusSize; ++i) {
      out.push_back(programSpec(embedded::kCorpus[i].name, embedded::kCorpus[i].text));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
  }();
  return corpus;
}

std::optional<ProgramSpec> findExample(std::string_view name) {
  for (const auto& p : builtinCorpus()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

const std::string& defaultPromptTemplate() {
  static const std::string text = embedded::kPromptTemplate;
  return text;
}

}  // namespace palm
