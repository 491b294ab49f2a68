#include <gtest/gtest.h>

#include <random>

#include "palm/extraction.hpp"
#include "palm/interpreter.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

using namespace palm;

namespace {

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

std::vector<std::string> compactAsserts(const PathVariant& p) {
  std::vector<std::string> out;
  for (const auto& t : p.assertTexts()) out.push_back(compactText(t));
  return out;
}

std::vector<bool> outcomeBits(const PathVariant& p) {
  std::vector<bool> out;
  for (const auto& [id, b] : p.outcomes()) out.push_back(b);
  return out;
}

ExtractionConfig withBound(int k) {
  ExtractionConfig cfg;
  cfg.loopBound = k;
  return cfg;
}

}  // namespace

TEST(Enumeration, StraightLine) {
  auto prog = parse("int f(int x) { int y = x * 2; y = y + 1; return y; }");
  for (int k : {0, 2, 5}) {
    auto r = enumeratePaths(prog, withBound(k));
    ASSERT_EQ(r.paths.size(), 1u);
    EXPECT_TRUE(r.paths[0].outcomes().empty());
    EXPECT_FALSE(r.truncated);
  }
}

TEST(Enumeration, TwoSequentialIfs) {
  auto prog = parse("int f(int a, int b) { int r = 0; if (a > 0) { r = r + 1; } if (b > 0) { r = r + 2; } return r; }");
  auto r = enumeratePaths(prog, {});
  ASSERT_EQ(r.paths.size(), 4u);
  std::vector<std::vector<bool>> expected{{true, true}, {true, false}, {false, true}, {false, false}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(outcomeBits(r.paths[i]), expected[i]);
    EXPECT_EQ(r.paths[i].id, static_cast<int>(i));
  }
}

TEST(Enumeration, SingleLoopBranchFree) {
  auto prog = parse("int f(int n) { int i = 0; int s = 0; while (i < n) { s = s + i; i = i + 1; } return s; }");
  for (int k = 0; k <= 4; ++k) {
    auto r = enumeratePaths(prog, withBound(k));
    ASSERT_EQ(r.paths.size(), static_cast<std::size_t>(k + 2)) << "K=" << k;
    for (int j = 0; j <= k; ++j) {
      const auto& p = r.paths[static_cast<std::size_t>(j)];
      EXPECT_FALSE(p.boundExceeded);
      std::vector<bool> bits(static_cast<std::size_t>(j), true);
      bits.push_back(false);
      EXPECT_EQ(outcomeBits(p), bits);
    }
    const auto& bound = r.paths.back();
    EXPECT_TRUE(bound.boundExceeded);
    EXPECT_EQ(outcomeBits(bound), std::vector<bool>(static_cast<std::size_t>(k), true));
  }
}

TEST(Enumeration, ForAndDoWhileDesugar) {
  auto forProg = parse("int f(int n) { int s = 0; for (int i = 0; i < n; i++) { s = s + 1; } return s; }");
  EXPECT_EQ(enumeratePaths(forProg, {}).paths.size(), 4u);
  auto doProg = parse("int f(int n) { int s = 0; do { s = s + 1; } while (s < n); return s; }");
  auto r = enumeratePaths(doProg, {});
  // Body runs once before the first test: exits after 1 or 2 runs, bound after the second re-entry.
  ASSERT_EQ(r.paths.size(), 4u);
  EXPECT_EQ(outcomeBits(r.paths[0]), (std::vector<bool>{false}));
}

TEST(Enumeration, PalindromeFigurePaths) {
  auto r = enumeratePaths(parse(kPalindrome), {});
  bool foundC = false, foundD = false;
  for (const auto& p : r.paths) {
    auto a = compactAsserts(p);
    if (a.size() == 2 && a[0] == "assertTrue(0<len)" && a[1] == "assertTrue(text.charAt(0)!=text.charAt(len-0-1))") {
      foundC = true;
    }
    if (outcomeBits(p) == std::vector<bool>{true, false, true, true} && p.feasibleCandidate()) foundD = true;
  }
  EXPECT_TRUE(foundC);
  EXPECT_TRUE(foundD);
  EXPECT_EQ(r.paths.size(), 6u);
}

TEST(Enumeration, ReturnStopsPath) {
  auto prog = parse("int f(int x) { if (x > 0) { return 1; } return 2; }");
  auto r = enumeratePaths(prog, {});
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_EQ(variantText(r.paths[0]).find("return 2"), std::string::npos);
}

TEST(Enumeration, MaxPathsTruncates) {
  auto prog = parse(
      "int f(int a, int b, int c) { int r = 0; if (a > 0) { r = 1; } if (b > 0) { r = 2; } if (c > 0) { r = 3; } "
      "return r; }");
  ExtractionConfig cfg;
  cfg.maxPaths = 5;
  auto r = enumeratePaths(prog, cfg);
  EXPECT_EQ(r.paths.size(), 5u);
  EXPECT_TRUE(r.truncated);
  cfg.maxPaths = 8;
  r = enumeratePaths(prog, cfg);
  EXPECT_EQ(r.paths.size(), 8u);
  EXPECT_FALSE(r.truncated);
}

TEST(Enumeration, VariantsAreLinear) {
  auto r = enumeratePaths(parse(kPalindrome), {});
  for (const auto& p : r.paths) {
    for (const auto& s : p.steps) {
      EXPECT_FALSE(s.stmt->is<IfStmt>() || s.stmt->is<WhileStmt>() || s.stmt->is<ForStmt>() ||
                   s.stmt->is<DoWhileStmt>() || s.stmt->is<BlockStmt>());
    }
  }
}

TEST(Config, Validation) {
  auto prog = parse("int f(int x) { return x; }");
  ExtractionConfig cfg;
  cfg.entryFunction = "g";
  EXPECT_THROW(enumeratePaths(prog, cfg), PalmError);
  cfg = {};
  cfg.symbolicFunctions = {"missing"};
  EXPECT_THROW(enumeratePaths(prog, cfg), CalleeNotFound);
  cfg = {};
  cfg.maxPaths = 0;
  EXPECT_THROW(enumeratePaths(prog, cfg), PalmError);
  cfg = {};
  cfg.loopBound = 3;
  cfg.symbolicFunctions = {"f"};
  EXPECT_EQ(toJson(configFromJson(toJson(cfg))), toJson(cfg));
}

TEST(Inline, TwoCallsFanOut) {
  auto prog = parse(R"(int sign(int x) { if (x > 0) { return 1; } return -1; }
int sumOfSigns(int a, int x) { int s = sign(a) + sign(x); return s; })");
  ExtractionConfig cfg;
  cfg.entryFunction = "sumOfSigns";
  cfg.symbolicFunctions = {"sign"};
  auto r = enumeratePaths(prog, cfg);
  ASSERT_EQ(r.paths.size(), 4u);
  auto text = variantText(r.paths[0]);
  EXPECT_NE(text.find("int x_1 = a;"), std::string::npos) << text;
  EXPECT_NE(text.find("int x_2 = x;"), std::string::npos) << text;
  // The renamed variant still resolves.
  const std::string stubs = "void assertTrue(boolean c) { }\nvoid assertFalse(boolean c) { }\n";
  for (const auto& p : r.paths) EXPECT_NO_THROW(parse(stubs + variantText(p))) << variantText(p);
}

TEST(Inline, NonSymbolicCallsStayOpaque) {
  auto prog = parse(R"(int sign(int x) { if (x > 0) { return 1; } return -1; }
int f(int a) { return sign(a); })");
  ExtractionConfig cfg;
  cfg.entryFunction = "f";
  auto r = enumeratePaths(prog, cfg);
  ASSERT_EQ(r.paths.size(), 1u);
  EXPECT_NE(variantText(r.paths[0]).find("return sign(a);"), std::string::npos);
}

TEST(Inline, RecursionBound) {
  auto prog = parse("int f(int n) { if (n <= 0) { return 0; } return f(n - 1) + 1; }");
  ExtractionConfig cfg;
  cfg.recursionBound = 2;
  auto r = enumeratePaths(prog, cfg);
  int bound = 0;
  for (const auto& p : r.paths) {
    if (!p.boundExceeded) continue;
    ++bound;
    int copies = 0;
    for (const auto& s : p.steps) {
      if (const auto* d = s.stmt->as<DeclStmt>(); d && d->name.rfind("n_", 0) == 0) ++copies;
    }
    EXPECT_EQ(copies, 2) << variantText(p);
  }
  EXPECT_EQ(bound, 1);
  // Depth 0, 1 and 2 returns.
  EXPECT_EQ(r.paths.size(), 4u);
}

TEST(Rename, LoopLocalsGetSuffixes) {
  auto prog = parse("int f(int n) { int i = 0; while (i < n) { int t = i * 2; i = i + 1; } return i; }");
  auto r = enumeratePaths(prog, {});
  const auto& twice = r.paths[2];
  auto text = variantText(twice);
  EXPECT_NE(text.find("int t_0 = "), std::string::npos) << text;
  EXPECT_NE(text.find("int t_1 = "), std::string::npos) << text;
  EXPECT_EQ(variantText(r.paths[0]).find("t_"), std::string::npos);
}

TEST(Rename, IdentityWithoutDuplicates) {
  auto prog = parse("int f(int x) { int y = x; if (y > 2) { y = 1; } return y; }");
  auto intra = enumerateIntra(prog, prog.functions[0], 2, 50);
  for (const auto& p : intra.paths) EXPECT_EQ(variantText(renameVariables(p)), variantText(p));
}

TEST(Fold, PrunesContradiction) {
  auto prog = parse("int f(int z) { int x = 1; int y = 0; if (x < y) { return 1; } return z; }");
  auto r = enumeratePaths(prog, {});
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_TRUE(r.paths[0].prunedInfeasible);
  EXPECT_FALSE(r.paths[1].prunedInfeasible);
  // The assert that holds is kept for provenance but hidden.
  ASSERT_EQ(r.paths[1].outcomes().size(), 1u);
  EXPECT_TRUE(r.paths[1].assertTexts().empty());
}

TEST(Fold, LeavesUnknownsAlone) {
  auto prog = parse("int f(int x) { if (x > 0) { return 1; } return 0; }");
  auto intra = enumerateIntra(prog, prog.functions[0], 2, 50);
  for (const auto& p : intra.paths) EXPECT_EQ(variantText(foldConstants(p)), variantText(p));
}

TEST(Fold, DivisionByZeroNotFolded) {
  auto prog = parse("int f(int x) { int z = 0; int q = 5 / z; if (q > 0) { return 1; } return 0; }");
  auto r = enumeratePaths(prog, {});
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_NE(variantText(r.paths[0]).find("5 / 0"), std::string::npos) << variantText(r.paths[0]);
}

// Folding never changes whether a variant accepts an input.
TEST(Property, FoldPreservesAcceptance) {
  const char* programs[] = {
      kPalindrome,
      "int f(int a, int b) { int k = 3; int m = k * 2; if (a + m > b) { k = k - 1; } while (k < a) { k = k + 2; } return k; }",
      "boolean g(int x) { boolean t = true; int c = 'a'; if (t && x > c) { return false; } return x == 7; }",
  };
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ints(-10, 110);
  std::uniform_int_distribution<int> len(0, 4);
  for (const char* src : programs) {
    auto prog = parse(src);
    const auto& fn = prog.functions[0];
    auto intra = enumerateIntra(prog, fn, 2, 50);
    for (const auto& raw : intra.paths) {
      auto renamed = renameVariables(raw);
      auto folded = foldConstants(renamed);
      for (int trial = 0; trial < 60; ++trial) {
        TestCase t{fn.name, {}};
        for (const auto& p : fn.params) {
          if (p.type.kind == SubjectType::Kind::String) {
            std::string s;
            for (int i = len(rng); i > 0; --i) s += "ab"[rng() % 2];
            t.args.emplace_back(s);
          } else {
            t.args.emplace_back(std::int64_t{ints(rng)});
          }
        }
        auto a = runVariant(renamed, prog, t);
        auto b = runVariant(folded, prog, t);
        EXPECT_EQ(a.returned(), b.returned()) << variantText(folded) << t.text();
        if (a.returned() && b.returned()) {
          EXPECT_TRUE(sameValue(a.returnValue, b.returnValue));
        }
      }
    }
  }
}

TEST(Json, VariantShape) {
  auto r = enumeratePaths(parse(kPalindrome), {});
  auto j = toJson(r.paths[1]);
  EXPECT_EQ(j["id"], 1);
  EXPECT_EQ(j["boundExceeded"], false);
  EXPECT_EQ(j["prunedInfeasible"], false);
  ASSERT_TRUE(j["steps"].is_array());
  bool sawAssert = false;
  for (const auto& s : j["steps"]) {
    EXPECT_TRUE(s.contains("kind") && s.contains("text") && s.contains("provenanceNodeId"));
    if (s["kind"] == "assert") {
      sawAssert = true;
      EXPECT_TRUE(s.contains("assertExpected"));
    }
  }
  EXPECT_TRUE(sawAssert);
  EXPECT_TRUE(toJson(r)["paths"].is_array());
}
