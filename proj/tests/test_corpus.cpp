#include <gtest/gtest.h>

#include "palm/corpus.hpp"
#include "palm/parser.hpp"
#include "palm/printer.hpp"

using namespace palm;

TEST(Corpus, ContainsFigurePrograms) {
  for (const char* name : {"tutorial", "palindrome", "argparse", "any_int", "last_char", "pruning"}) {
    EXPECT_TRUE(findExample(name).has_value()) << name;
  }
  EXPECT_FALSE(findExample("nope").has_value());
}

TEST(Corpus, EveryProgramRoundTripsAndEnumerates) {
  for (const auto& spec : builtinCorpus()) {
    SCOPED_TRACE(spec.name);
    auto prog = parse(spec.source);
    auto printed = prettyPrint(prog);
    auto again = parse(printed);
    EXPECT_TRUE(structurallyEqual(prog, again));
    EXPECT_EQ(prettyPrint(again), printed);
    auto r = enumeratePaths(prog, spec.cfg);
    EXPECT_FALSE(r.paths.empty());
    EXPECT_FALSE(r.truncated);
    EXPECT_LE(r.paths.size(), static_cast<std::size_t>(spec.cfg.maxPaths));
  }
}

TEST(Corpus, Directives) {
  auto spec = programSpec("x", "// @title T\n// @entry g\n// @symbolic a, b\n// @loopBound 3\n"
                               "// @maxStringLength 2\n// @intMin -3\nint g() { return 0; }\n");
  EXPECT_EQ(spec.title, "T");
  EXPECT_EQ(spec.cfg.entryFunction, "g");
  EXPECT_EQ(spec.cfg.symbolicFunctions, (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(spec.cfg.loopBound, 3);
  EXPECT_EQ(spec.domains.maxStringLength, 2);
  EXPECT_EQ(spec.domains.intMin, -3);
  EXPECT_THROW(programSpec("y", "// @bogus 1\n"), PalmError);
  EXPECT_THROW(programSpec("y", "// @loopBound two\n"), PalmError);
}

TEST(Corpus, PromptTemplateHasPlaceholders) {
  const auto& t = defaultPromptTemplate();
  for (const char* p : {"{{entry}}", "{{context}}", "{{variant}}", "{{example}}"}) {
    EXPECT_NE(t.find(p), std::string::npos) << p;
  }
}
