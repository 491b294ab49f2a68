#include "palm/builtins.hpp"

#include <algorithm>

namespace palm {

namespace {

using K = SubjectType::Kind;

SubjectType s(K k) { return SubjectType::scalar(k); }

std::vector<BuiltinSignature> makeTable() {
  using F = BuiltinSignature::Form;
  const SubjectType str = s(K::String), i = s(K::Int), d = s(K::Double), b = s(K::Boolean),
                    c = s(K::Char);
  return {
      {F::StringMethod, "length", {}, i},
      {F::StringMethod, "charAt", {i}, c},
      {F::StringMethod, "equals", {str}, b},
      {F::StringMethod, "equalsIgnoreCase", {str}, b},
      {F::StringMethod, "substring", {i}, str},
      {F::StringMethod, "substring", {i, i}, str},
      {F::StringMethod, "indexOf", {str}, i},
      {F::StringMethod, "split", {str}, SubjectType::arrayOf(K::String)},
      {F::StringMethod, "trim", {}, str},
      {F::StringMethod, "toLowerCase", {}, str},
      {F::StringMethod, "toUpperCase", {}, str},
      {F::StringMethod, "startsWith", {str}, b},
      {F::StringMethod, "endsWith", {str}, b},
      {F::StringMethod, "contains", {str}, b},
      {F::StringMethod, "isEmpty", {}, b},
      {F::FreeFunction, "abs", {i}, i},
      {F::FreeFunction, "abs", {d}, d},
      {F::FreeFunction, "min", {i, i}, i},
      {F::FreeFunction, "min", {d, d}, d},
      {F::FreeFunction, "max", {i, i}, i},
      {F::FreeFunction, "max", {d, d}, d},
      {F::FreeFunction, "floor", {d}, d},
      {F::ArrayLength, "length", {}, i},
  };
}

bool accepts(const BuiltinSignature& sig, std::span<const SubjectType> args) {
  if (sig.params.size() != args.size()) return false;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (!isAssignable(sig.params[k], args[k])) return false;
  }
  return true;
}

}  // namespace

std::string BuiltinSignature::display() const {
  std::string out;
  switch (form) {
    case Form::StringMethod: out = "String." + name; break;
    case Form::FreeFunction: out = name; break;
    case Form::ArrayLength: return "T[].length -> int";
  }
  out += "(";
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (k > 0) out += ", ";
    out += toString(params[k]);
  }
  return out + ") -> " + toString(returnType);
}

const std::vector<BuiltinSignature>& listBuiltins() {
  static const std::vector<BuiltinSignature> table = makeTable();
  return table;
}

const BuiltinSignature* resolveStringMethod(std::string_view name,
                                            std::span<const SubjectType> args) {
  for (const auto& sig : listBuiltins()) {
    if (sig.form == BuiltinSignature::Form::StringMethod && sig.name == name && accepts(sig, args)) {
      return &sig;
    }
  }
  return nullptr;
}

const BuiltinSignature* resolveFreeFunction(std::string_view name,
                                            std::span<const SubjectType> args) {
  bool anyDouble = std::any_of(args.begin(), args.end(),
                               [](SubjectType t) { return t == SubjectType::scalar(K::Double); });
  const BuiltinSignature* fallback = nullptr;
  for (const auto& sig : listBuiltins()) {
    if (sig.form != BuiltinSignature::Form::FreeFunction || sig.name != name || !accepts(sig, args)) {
      continue;
    }
    bool isDoubleOverload = sig.returnType == SubjectType::scalar(K::Double);
    if (isDoubleOverload == anyDouble) return &sig;
    if (!fallback) fallback = &sig;
  }
  return fallback;
}

bool isFreeBuiltinName(std::string_view name) {
  return name == "abs" || name == "min" || name == "max" || name == "floor";
}

bool isStringMethodName(std::string_view name) {
  for (const auto& sig : listBuiltins()) {
    if (sig.form == BuiltinSignature::Form::StringMethod && sig.name == name) return true;
  }
  return false;
}

bool isAssignable(SubjectType to, SubjectType from) {
  if (to == from) return true;
  if (to.isArray || from.isArray) return false;
  if (to.kind == K::Double) return from.kind == K::Int || from.kind == K::Char;
  if (to.kind == K::Int) return from.kind == K::Char;
  return false;
}

}  // namespace palm
