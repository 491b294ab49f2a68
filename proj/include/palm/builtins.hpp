#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "palm/ast.hpp"

namespace palm {

struct BuiltinSignature {
  enum class Form { StringMethod, FreeFunction, ArrayLength };

  Form form = Form::FreeFunction;
  std::string name;
  std::vector<SubjectType> params;
  SubjectType returnType;

  /// e.g. "String.charAt(int) -> char", "abs(double) -> double", "T[].length -> int".
  std::string display() const;
};

const std::vector<BuiltinSignature>& listBuiltins();

/// Picks the string-method overload for the given argument types, or null.
const BuiltinSignature* resolveStringMethod(std::string_view name,
                                            std::span<const SubjectType> args);

/// Picks the free-function overload (abs/min/max/floor), or null. The double
/// overload is chosen when any argument is a double.
const BuiltinSignature* resolveFreeFunction(std::string_view name,
                                            std::span<const SubjectType> args);

bool isFreeBuiltinName(std::string_view name);
bool isStringMethodName(std::string_view name);

/// Implicit conversions allowed on assignment, argument passing and return:
/// identity, int/char -> double, char -> int.
bool isAssignable(SubjectType to, SubjectType from);

}  // namespace palm
