#pragma once

#include <string>
#include <vector>

#include "palm/extraction.hpp"

namespace palm {

/// A failed attempt shown to the generator on retries.
struct PriorTrial {
  std::string testText;
  std::string feedback;
};

/// Fields and non-symbolic functions, printed in source order. Symbolic
/// function bodies are left out; they appear only through the variant.
std::string promptContext(const SubjectProgram& program, const ExtractionConfig& cfg);

/// Renders the template. Placeholders: {{entry}}, {{signature}}, {{context}},
/// {{variant}}, {{feedback}}, {{example}}. Unknown placeholders are kept.
std::string buildPrompt(const SubjectProgram& program, const PathVariant& variant, const ExtractionConfig& cfg,
                        const std::string& templateText);

/// Appends the previous failing tests and their first diverging assertion.
std::string withFeedback(const std::string& prompt, const std::vector<PriorTrial>& previous);

}  // namespace palm
