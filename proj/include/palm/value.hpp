#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "palm/ast.hpp"

namespace palm {

struct Array;
using ArrayRef = std::shared_ptr<Array>;

/// Runtime value. `std::monostate` is the result of a void call.
using Value = std::variant<std::monostate, std::int64_t, double, bool, Char, std::string, ArrayRef>;

struct Array {
  SubjectType elementType;
  std::vector<Value> items;
};

Value defaultValue(SubjectType type);

/// Literal rendering used in test text: 5, 1.5, true, 'a', "s", {1, 2}.
std::string formatValue(const Value& v);

/// Java-style string conversion used by string concatenation.
std::string concatText(const Value& v);

/// Deep equality (arrays compare element-wise, doubles bitwise-equal or ==).
bool sameValue(const Value& a, const Value& b);

/// Copy with fresh arrays, so that the copy can be mutated independently.
Value deepCopy(const Value& v);

/// Integer view of an int or char value.
std::int64_t asInt(const Value& v);
/// Numeric view of an int, char or double value.
double asDouble(const Value& v);

}  // namespace palm
