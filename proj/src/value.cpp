#include "palm/value.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "palm/errors.hpp"
#include "palm/printer.hpp"

namespace palm {

Value defaultValue(SubjectType type) {
  if (type.isArray) return ArrayRef{};
  switch (type.kind) {
    case SubjectType::Kind::Int: return std::int64_t{0};
    case SubjectType::Kind::Double: return 0.0;
    case SubjectType::Kind::Boolean: return false;
    case SubjectType::Kind::Char: return Char{0};
    case SubjectType::Kind::String: return std::string();
    case SubjectType::Kind::Void: return std::monostate{};
  }
  return std::monostate{};
}

std::string formatValue(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "void";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return formatDouble(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Char>) {
          return quoteChar(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quoteString(x);
        } else {
          if (!x) return "{}";
          std::string out = "{";
          for (std::size_t i = 0; i < x->items.size(); ++i) {
            if (i > 0) out += ", ";
            out += formatValue(x->items[i]);
          }
          return out + "}";
        }
      },
      v);
}

namespace {

std::string javaDouble(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  double mag = std::fabs(d);
  std::array<char, 64> buf{};
  if (mag == 0.0 || (mag >= 1e-3 && mag < 1e7)) {
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, std::chars_format::fixed);
    std::string s(buf.data(), ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
  }
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, std::chars_format::scientific);
  std::string s(buf.data(), ptr);
  auto e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  if (mant.find('.') == std::string::npos) mant += ".0";
  if (exp[0] == '+') exp.erase(0, 1);
  return mant + "E" + exp;
}

}  // namespace

std::string concatText(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return javaDouble(x);
        } else if constexpr (std::is_same_v<T, Char>) {
          return std::string(1, static_cast<char>(x.code));
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return formatValue(x);
        }
      },
      v);
}

bool sameValue(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    double y = std::get<double>(b);
    return *x == y || (std::isnan(*x) && std::isnan(y));
  }
  if (const auto* x = std::get_if<ArrayRef>(&a)) {
    const auto& y = std::get<ArrayRef>(b);
    if (!*x || !y) return !*x && !y;
    if ((*x)->items.size() != y->items.size()) return false;
    for (std::size_t i = 0; i < y->items.size(); ++i) {
      if (!sameValue((*x)->items[i], y->items[i])) return false;
    }
    return true;
  }
  return a == b;
}

std::int64_t asInt(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* c = std::get_if<Char>(&v)) return c->code;
  throw PalmError("value is not an integer: " + formatValue(v));
}

double asDouble(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return static_cast<double>(asInt(v));
}

Value deepCopy(const Value& v) {
  const auto* ref = std::get_if<ArrayRef>(&v);
  if (!ref || !*ref) return v;
  auto copy = std::make_shared<Array>();
  copy->elementType = (*ref)->elementType;
  for (const auto& item : (*ref)->items) copy->items.push_back(deepCopy(item));
  return copy;
}

}  // namespace palm
