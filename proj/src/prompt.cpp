#include "palm/prompt.hpp"

#include <algorithm>

#include "palm/printer.hpp"
#include "palm/value.hpp"

namespace palm {

namespace {

void replaceAll(std::string& text, const std::string& from, const std::string& to) {
  for (std::size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
}

std::string signature(const PathVariant& v) {
  std::string out = toString(v.returnType) + " " + v.entry + "(";
  for (std::size_t i = 0; i < v.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += toString(v.params[i].type) + " " + v.params[i].name;
  }
  return out + ")";
}

std::string exampleCall(const PathVariant& v) {
  std::string out = v.entry + "(";
  for (std::size_t i = 0; i < v.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += formatValue(defaultValue(v.params[i].type));
  }
  return out + ")";
}

}  // namespace

std::string promptContext(const SubjectProgram& program, const ExtractionConfig& cfg) {
  auto symbolic = cfg.effectiveSymbolic(program);
  struct Item {
    std::pair<int, int> order;
    std::string text;
  };
  std::vector<Item> items;
  for (const auto& f : program.fields) items.push_back({{f.pos.line, f.pos.column}, printField(f)});
  for (const auto& fn : program.functions) {
    if (!symbolic.count(fn.name)) items.push_back({{fn.pos.line, fn.pos.column}, printFunction(fn)});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.order < b.order; });
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += "\n";
    out += item.text;
    if (out.back() != '\n') out += "\n";
  }
  if (out.empty()) return "// none\n";
  return out;
}

std::string buildPrompt(const SubjectProgram& program, const PathVariant& variant, const ExtractionConfig& cfg,
                        const std::string& templateText) {
  std::string out = templateText;
  auto context = promptContext(program, cfg);
  if (!context.empty() && context.back() == '\n') context.pop_back();
  auto variantBody = variantText(variant);
  if (!variantBody.empty() && variantBody.back() == '\n') variantBody.pop_back();
  replaceAll(out, "{{entry}}", variant.entry);
  replaceAll(out, "{{signature}}", signature(variant));
  replaceAll(out, "{{context}}", context);
  replaceAll(out, "{{variant}}", variantBody);
  replaceAll(out, "{{feedback}}", "");
  replaceAll(out, "{{example}}", exampleCall(variant));
  return out;
}

std::string withFeedback(const std::string& prompt, const std::vector<PriorTrial>& previous) {
  if (previous.empty()) return prompt;
  std::string out = prompt;
  if (!out.empty() && out.back() != '\n') out += "\n";
  out += "\nPrevious attempts did not follow the path:\n";
  for (const auto& t : previous) {
    out += "- test: " + t.testText + "\n";
    out += "  first failing assertion: " + t.feedback + "\n";
  }
  out += "Propose a different call that satisfies every assertion.\n";
  return out;
}

}  // namespace palm
