#include <gtest/gtest.h>

#include "palm/interpreter.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

using namespace palm;

namespace {

const char* kTutorial = R"(int tutorial(int x, int y, int z) {
  if (x > 0) {
    z = -z - 5;
  }
  if (y + z > 0) {
    return 1;
  }
  return 0;
})";

const char* kPalindrome = R"(boolean is_palindrome(String text) {
  int len = text.length();
  int i = 0;
  while (i < len) {
    if (text.charAt(i) != text.charAt(len - i - 1)) {
      return false;
    }
    i++;
  }
  return true;
})";

ExecResult run(const char* src, const std::string& test) {
  auto prog = parse(src);
  return runProgram(prog, parseTestCase(test, prog));
}

Value ret(const char* src, const std::string& test) {
  auto r = run(src, test);
  EXPECT_TRUE(r.returned()) << r.describe();
  return r.returnValue;
}

const PathVariant& pathWithOutcomes(const ExtractionResult& r, std::vector<bool> outcomes) {
  for (const auto& p : r.paths) {
    std::vector<bool> o;
    for (const auto& [id, b] : p.outcomes()) o.push_back(b);
    if (o == outcomes && p.feasibleCandidate()) return p;
  }
  throw std::runtime_error("no such path");
}

}  // namespace

TEST(Interpreter, PalindromeReturns) {
  EXPECT_EQ(ret(kPalindrome, R"(is_palindrome("aba"))"), Value{true});
  EXPECT_EQ(ret(kPalindrome, R"(is_palindrome("ab"))"), Value{false});
  EXPECT_EQ(ret(kPalindrome, R"(is_palindrome(""))"), Value{true});
}

TEST(Interpreter, ShortCircuitSkipsDivision) {
  EXPECT_EQ(ret("boolean f() { return false && (1 / 0 == 0); }", "f()"), Value{false});
  EXPECT_EQ(ret("boolean f() { return true || (1 / 0 == 0); }", "f()"), Value{true});
}

TEST(Interpreter, RuntimeErrors) {
  auto r = run("int f(int x) { return 1 / x; }", "f(0)");
  EXPECT_EQ(r.outcome, ExecResult::Outcome::RuntimeError);
  EXPECT_EQ(r.errorKind, "divide-by-zero");
  EXPECT_EQ(run("char f(String s) { return s.charAt(3); }", R"(f("ab"))").errorKind, "index-out-of-bounds");
  EXPECT_EQ(run("String f(String s) { return s.substring(2, 1); }", R"(f("abc"))").errorKind, "negative-substring");
  EXPECT_EQ(run("int f(int[] a) { return a[3]; }", "f({1, 2})").errorKind, "index-out-of-bounds");
  EXPECT_EQ(run("int f(int n) { int[] a = new int[n]; return 0; }", "f(-1)").errorKind, "negative-array-size");
  EXPECT_EQ(run("int f(int n) { return f(n + 1); }", "f(0)").errorKind, "call-depth-exceeded");
}

TEST(Interpreter, StepLimit) {
  EXPECT_EQ(run("void f() { while (true) { } }", "f()").outcome, ExecResult::Outcome::StepLimitExceeded);
}

TEST(Interpreter, IntWraps) {
  EXPECT_EQ(ret("int f(int x) { return x + 1; }", "f(9223372036854775807)"),
            Value{std::numeric_limits<std::int64_t>::min()});
  EXPECT_EQ(ret("int f(int x) { return x / -1; }", "f(-9223372036854775808)"),
            Value{std::numeric_limits<std::int64_t>::min()});
  EXPECT_EQ(ret("int f(int x) { return x % -1; }", "f(-9223372036854775808)"), Value{std::int64_t{0}});
  EXPECT_EQ(ret("int f(int x) { return x / 2; }", "f(-7)"), Value{std::int64_t{-3}});
  EXPECT_EQ(ret("int f(int x) { return x % 2; }", "f(-7)"), Value{std::int64_t{-1}});
}

TEST(Interpreter, Builtins) {
  EXPECT_EQ(ret(R"(int f() { return "abc".length(); })", "f()"), Value{std::int64_t{3}});
  EXPECT_EQ(ret(R"(boolean f() { return "-F".equalsIgnoreCase("-f"); })", "f()"), Value{true});
  auto a = ret(R"(String[] f(String s) { return s.split(" "); })", R"(f("a b"))");
  EXPECT_EQ(formatValue(a), R"({"a", "b"})");
  EXPECT_EQ(formatValue(ret(R"(String[] f(String s) { return s.split(" "); })", R"(f("a  b "))")),
            R"({"a", "", "b"})");
  EXPECT_EQ(formatValue(ret(R"(String[] f(String s) { return s.split(" "); })", R"(f(""))")), R"({""})");
  EXPECT_EQ(formatValue(ret(R"(String[] f(String s) { return s.split(" "); })", R"(f("  "))")), "{}");
  EXPECT_EQ(ret(R"(String f(String s) { return s.trim(); })", R"(f(" a b  "))"), Value{std::string("a b")});
  EXPECT_EQ(ret(R"(int f(String s) { return s.indexOf("b"); })", R"(f("abc"))"), Value{std::int64_t{1}});
  EXPECT_EQ(ret(R"(String f(String s) { return s.toUpperCase() + 1 + 'c'; })", R"(f("ab"))"),
            Value{std::string("AB1c")});
  EXPECT_EQ(ret("double f(double x) { return Math.floor(x) + Math.abs(-2); }", "f(1.5)"), Value{3.0});
  EXPECT_EQ(ret("int f(int x, int y) { return Math.max(x, y) - Math.min(x, y); }", "f(3, -4)"),
            Value{std::int64_t{7}});
  EXPECT_EQ(ret("int f(int[] a) { return a.length; }", "f({})"), Value{std::int64_t{0}});
}

TEST(Interpreter, Fields) {
  const char* src = "int count = 3; int f(int x) { count = count + x; return count; }";
  EXPECT_EQ(ret(src, "f(2)"), Value{std::int64_t{5}});
}

TEST(Interpreter, DoubleCoercion) {
  EXPECT_EQ(ret("double f(double x) { x = 1; return x / 2; }", "f(3)"), Value{0.5});
  EXPECT_EQ(ret("double f(int x) { return x; }", "f(3)"), Value{3.0});
}

TEST(Interpreter, AnyIntTraceReachesElseBranch) {
  const char* src = R"(boolean any_int(double x, double y, double z) {
  if (Math.floor(x) == x && Math.floor(y) == y && Math.floor(z) == z) {
    if (x + y == z || x + z == y || y + z == x) {
      return true;
    }
    return false;
  }
  return false;
})";
  auto r = run(src, "any_int(3.0, 1.1, 2.0)");
  ASSERT_TRUE(r.returned());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_FALSE(r.trace.front().outcome);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Interpreter, TraceDeterminism) {
  auto a = run(kPalindrome, R"(is_palindrome("abca"))");
  auto b = run(kPalindrome, R"(is_palindrome("abca"))");
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.linesExecuted, b.linesExecuted);
}

TEST(TestLiteral, ParsesAndReprints) {
  auto prog = parse("int f(int a, double b, boolean c, char d, String e, int[] g) { return 0; }");
  auto t = parseTestCase(R"(f(-3, 2, true, 'x', "q\"", {1, -2}))", prog);
  EXPECT_EQ(t.text(), R"(f(-3, 2.0, true, 'x', "q\"", {1, -2}))");
  EXPECT_EQ(parseTestCase(t.text(), prog).text(), t.text());
}

TEST(TestLiteral, Rejects) {
  auto prog = parse("int f(int a) { return a; }");
  EXPECT_THROW(parseTestCase("f(1,", prog), TestParseError);
  EXPECT_THROW(parseTestCase("f(1, 2)", prog), TestParseError);
  EXPECT_THROW(parseTestCase("f(1.5)", prog), TestParseError);
  EXPECT_THROW(parseTestCase("g(1)", prog), TestParseError);
  EXPECT_THROW(parseTestCase("f(\"a)", prog), TestParseError);
  EXPECT_THROW(parseTestCase("f(1)", prog, "h"), TestParseError);
}

TEST(Variant, TutorialVerdicts) {
  auto prog = parse(kTutorial);
  auto r = enumeratePaths(prog, {});
  const auto& tt = pathWithOutcomes(r, {true, true});
  auto ok = runVariant(tt, prog, parseTestCase("tutorial(1,6,0)", prog));
  EXPECT_TRUE(ok.returned());
  EXPECT_EQ(ok.returnValue, Value{std::int64_t{1}});
  auto bad = runVariant(tt, prog, parseTestCase("tutorial(1,1,0)", prog));
  ASSERT_EQ(bad.outcome, ExecResult::Outcome::AssertionViolated);
  EXPECT_EQ(compactText(bad.assertText), "assertTrue(y+z>0)");
  EXPECT_EQ(bad.stepIndex, 2u);
}

TEST(Variant, PalindromeRefinement) {
  auto prog = parse(kPalindrome);
  auto r = enumeratePaths(prog, {});
  const auto& d = pathWithOutcomes(r, {true, false, true, true});
  auto ab = runVariant(d, prog, parseTestCase(R"(is_palindrome("ab"))", prog));
  ASSERT_EQ(ab.outcome, ExecResult::Outcome::AssertionViolated);
  EXPECT_EQ(compactText(ab.assertText), "assertFalse(text.charAt(0)!=text.charAt(len-0-1))");
  auto abca = runVariant(d, prog, parseTestCase(R"(is_palindrome("abca"))", prog));
  EXPECT_TRUE(abca.returned()) << abca.describe();
  EXPECT_EQ(abca.returnValue, Value{false});
}

TEST(Locate, Tutorial) {
  auto prog = parse(kTutorial);
  auto r = enumeratePaths(prog, {});
  auto tree = SymTree::build(r.paths);
  auto tt = pathWithOutcomes(r, {true, true}).id;
  auto tf = pathWithOutcomes(r, {true, false}).id;
  EXPECT_EQ(locatePath(tree, prog, parseTestCase("tutorial(1,6,0)", prog), {}).pathId, tt);
  EXPECT_EQ(locatePath(tree, prog, parseTestCase("tutorial(1,1,0)", prog), {}).pathId, tf);
}

TEST(Locate, BeyondLoopBoundIsNone) {
  auto prog = parse(kPalindrome);
  auto r = enumeratePaths(prog, {});
  auto tree = SymTree::build(r.paths);
  auto far = locatePath(tree, prog, parseTestCase(R"(is_palindrome("abba"))", prog), {});
  EXPECT_FALSE(far.pathId);
  EXPECT_FALSE(far.diagnostic.empty());
  auto near = locatePath(tree, prog, parseTestCase(R"(is_palindrome("a"))", prog), {});
  ASSERT_TRUE(near.pathId);
  EXPECT_TRUE(runVariant(r.paths[static_cast<std::size_t>(*near.pathId)], prog,
                         parseTestCase(R"(is_palindrome("a"))", prog))
                  .returned());
}
