#include "palm/bruteforce.hpp"

#include <cmath>

namespace palm {

using K = SubjectType::Kind;

namespace {

void strings(const std::string& alphabet, int maxLength, std::vector<Value>& out) {
  std::vector<std::string> layer{""};
  out.emplace_back(std::string());
  for (int len = 1; len <= maxLength; ++len) {
    std::vector<std::string> next;
    for (const auto& prefix : layer) {
      for (char c : alphabet) next.push_back(prefix + c);
    }
    for (const auto& s : next) out.emplace_back(s);
    layer = std::move(next);
  }
}

}  // namespace

std::vector<Value> InputDomains::values(SubjectType type) const {
  std::vector<Value> out;
  if (type.isArray) {
    auto elements = values(type.element());
    std::vector<std::vector<Value>> layer{{}};
    for (int len = 0; len <= maxArrayLength; ++len) {
      if (len > 0) {
        std::vector<std::vector<Value>> next;
        for (const auto& prefix : layer) {
          for (const auto& e : elements) {
            next.push_back(prefix);
            next.back().push_back(e);
          }
        }
        layer = std::move(next);
      }
      for (const auto& items : layer) {
        auto a = std::make_shared<Array>();
        a->elementType = type.element();
        a->items = items;
        out.emplace_back(std::move(a));
      }
    }
    return out;
  }
  switch (type.kind) {
    case K::Int:
      for (std::int64_t i = intMin; i <= intMax; ++i) out.emplace_back(i);
      break;
    case K::Double:
      for (double d : doubles) out.emplace_back(d);
      break;
    case K::Boolean:
      out.emplace_back(false);
      out.emplace_back(true);
      break;
    case K::Char:
      for (char c : chars) out.emplace_back(Char{static_cast<std::uint8_t>(c)});
      break;
    case K::String:
      strings(stringAlphabet, maxStringLength, out);
      break;
    case K::Void:
      break;
  }
  return out;
}

double InputDomains::size(SubjectType type) const {
  auto geometric = [](double base, int maxLen) {
    double total = 0, term = 1;
    for (int i = 0; i <= maxLen; ++i, term *= base) total += term;
    return total;
  };
  if (type.isArray) return geometric(size(type.element()), maxArrayLength);
  switch (type.kind) {
    case K::Int: return static_cast<double>(intMax - intMin + 1);
    case K::Double: return static_cast<double>(doubles.size());
    case K::Boolean: return 2;
    case K::Char: return static_cast<double>(chars.size());
    case K::String: return geometric(static_cast<double>(stringAlphabet.size()), maxStringLength);
    case K::Void: return 0;
  }
  return 0;
}

nlohmann::json toJson(const InputDomains& d) {
  return {{"intMin", d.intMin},
          {"intMax", d.intMax},
          {"doubles", d.doubles},
          {"chars", d.chars},
          {"stringAlphabet", d.stringAlphabet},
          {"maxStringLength", d.maxStringLength},
          {"maxArrayLength", d.maxArrayLength},
          {"budget", d.budget}};
}

InputDomains domainsFromJson(const nlohmann::json& j) {
  InputDomains d;
  d.intMin = j.value("intMin", d.intMin);
  d.intMax = j.value("intMax", d.intMax);
  d.doubles = j.value("doubles", d.doubles);
  d.chars = j.value("chars", d.chars);
  d.stringAlphabet = j.value("stringAlphabet", d.stringAlphabet);
  d.maxStringLength = j.value("maxStringLength", d.maxStringLength);
  d.maxArrayLength = j.value("maxArrayLength", d.maxArrayLength);
  d.budget = j.value("budget", d.budget);
  if (d.intMin > d.intMax || d.maxStringLength < 0 || d.maxArrayLength < 0) {
    throw PalmError("invalid input domains");
  }
  return d;
}

SearchResult bruteForceSearch(const PathVariant& variant, const SubjectProgram& program,
                              const InputDomains& domains, const ExecOptions& options) {
  double total = 1;
  for (const auto& p : variant.params) total *= domains.size(p.type);
  if (total > static_cast<double>(domains.budget)) throw DomainTooLarge(total, domains.budget);

  std::vector<std::vector<Value>> axes;
  for (const auto& p : variant.params) axes.push_back(domains.values(p.type));
  SearchResult result;
  for (const auto& axis : axes) {
    if (axis.empty()) return result;
  }
  std::vector<std::size_t> at(axes.size(), 0);
  TestCase test{variant.entry, {}};
  while (true) {
    test.args.clear();
    for (std::size_t i = 0; i < axes.size(); ++i) test.args.push_back(axes[i][at[i]]);
    ++result.candidates;
    if (runVariant(variant, program, test, options).returned()) {
      result.test = test;
      return result;
    }
    std::size_t i = axes.size();
    while (i > 0) {
      --i;
      if (++at[i] < axes[i].size()) break;
      at[i] = 0;
      if (i == 0) return result;
    }
    if (axes.empty()) return result;
  }
}

}  // namespace palm
