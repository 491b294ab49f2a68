#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "palm/bruteforce.hpp"
#include "palm/extraction.hpp"

namespace palm {

/// A subject program plus the settings given by its `// @key value` header
/// comments: title, entry, symbolic (comma separated), loopBound,
/// recursionBound, maxPaths, intMin, intMax, maxStringLength, maxArrayLength.
struct ProgramSpec {
  std::string name;
  std::string title;
  std::string source;
  ExtractionConfig cfg;
  InputDomains domains;
};

ProgramSpec programSpec(std::string name, std::string source);

/// Programs compiled into the binary, in name order.
const std::vector<ProgramSpec>& builtinCorpus();
std::optional<ProgramSpec> findExample(std::string_view name);

/// Default prompt template compiled into the binary.
const std::string& defaultPromptTemplate();

}  // namespace palm
