#include <gtest/gtest.h>

#include "palm/errors.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

using namespace palm;

TEST(Parser, MinimalFunction) {
  auto p = parse("int f(int x){ return x+1; }");
  EXPECT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.fields.size(), 0u);
}

TEST(Parser, UndeclaredIdentifier) {
  try {
    parse("int f(){ return y; }");
    FAIL();
  } catch (const ResolveError& e) {
    EXPECT_EQ(e.name(), "y");
  }
}

TEST(Parser, RoundTrip) {
  const char* src = R"(int count = 0;
int f(int x, String s) {
  int[] a = {1, 2, -3};
  for (int i = 0; i < a.length; i++) { x += a[i] * -(2 - x); }
  do { x--; } while (x > 10 && !s.isEmpty());
  if (s.charAt(0) == 'a') return -x; else if (x % 2 == 0) { count = count + 1; } else { }
  while (true) { return Math.abs(x - -5) + s.length(); }
})";
  auto p = parse(src);
  std::string printed = prettyPrint(p);
  auto q = parse(printed);
  EXPECT_TRUE(structurallyEqual(p, q)) << printed;
  EXPECT_EQ(prettyPrint(q), printed);
  EXPECT_EQ(p.functions[0].lastNode, q.functions[0].lastNode);
  EXPECT_EQ(p.exprTypes, q.exprTypes);
}
