#include <gtest/gtest.h>

#include <future>
#include <regex>

#include "cogref/source_ir/analysis.hpp"
#include "program_gen.hpp"
#include "test_util.hpp"

using namespace cogref::source_ir;
using cogref::testing::fixture_corpus;
using cogref::testing::listing;
using cogref::testing::parse;

namespace {

std::vector<std::pair<ConstructKind, int>> shape(const FunctionUnit &fn) {
    std::vector<std::pair<ConstructKind, int>> out;
    for (const auto &c : fn.constructs)
        out.emplace_back(c.kind, c.depth);
    return out;
}

// Independent comment stripper: the corpus has no '#' inside string literals.
std::string strip_comments(const std::string &src) {
    std::string out;
    bool in_comment = false;
    for (char c : src) {
        if (c == '#')
            in_comment = true;
        if (c == '\n')
            in_comment = false;
        if (!in_comment)
            out.push_back(c);
    }
    return out;
}

}  // namespace

TEST(Tokenize, ReturnFloatLiteral) {
    const auto ts = tokenize("return 3.14");
    ASSERT_EQ(ts.size(), 2u);
    EXPECT_EQ(ts.tokens[0].cls, TokenClass::Keyword);
    EXPECT_EQ(ts.tokens[0].lexeme, "return");
    EXPECT_EQ(ts.tokens[1].cls, TokenClass::Number);
    EXPECT_EQ(ts.tokens[1].lexeme, "3.14");
}

TEST(Tokenize, StringCaseIsPreserved) {
    const auto a = tokenize("\"fizzbuzz\"");
    const auto b = tokenize("\"FizzBuzz\"");
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a.tokens[0].cls, TokenClass::String);
    EXPECT_NE(a.tokens[0].lexeme, b.tokens[0].lexeme);
    EXPECT_EQ(string_literal_body(b.tokens[0].lexeme), "FizzBuzz");
}

TEST(Tokenize, ParallelLinesHandCount) {
    // def parallel_lines ( line1 , line2 ) :            8
    // return                                            1
    // line1 [ 0 ] / line1 [ 1 ] == line2 [ 0 ] / line2 [ 1 ]   19
    const auto ts = tokenize(listing("parallel_lines_original"));
    EXPECT_EQ(ts.size(), 28u);
}

TEST(Tokenize, UnterminatedStringIsLexError) {
    EXPECT_THROW(tokenize("x = 'abc\n"), LexError);
    EXPECT_THROW(tokenize("x = \"\"\"abc"), LexError);
}

TEST(Tokenize, RoundTripModuloComments) {
    for (const auto &e : fixture_corpus())
        EXPECT_EQ(tokenize(e.text).render(), strip_comments(e.text)) << e.id;
}

TEST(Tokenize, ClassesAndPrefixes) {
    const auto ts = tokenize("x = rb'\\x00' + f\"{y}\" ** 2 // 0x1F");
    std::vector<TokenClass> classes;
    for (const auto &t : ts.tokens)
        classes.push_back(t.cls);
    const std::vector<TokenClass> want{TokenClass::Identifier, TokenClass::Operator, TokenClass::String,
                                       TokenClass::Operator,   TokenClass::String,   TokenClass::Operator,
                                       TokenClass::Number,     TokenClass::Operator, TokenClass::Number};
    EXPECT_EQ(classes, want);
}

TEST(ParseFunctions, NthEvenOriginal) {
    const auto fns = parse_functions(SourceUnit::original("t", listing("nth_even_original")));
    ASSERT_EQ(fns.size(), 1u);
    EXPECT_EQ(fns[0].name, "nth_even");
    EXPECT_FALSE(fns[0].is_synthetic_toplevel);
    EXPECT_EQ(fns[0].constructs.size(), 4u);
}

TEST(ParseFunctions, EmptySource) {
    EXPECT_TRUE(parse_functions(SourceUnit::original("t", "")).empty());
    EXPECT_TRUE(parse_functions(SourceUnit::original("t", "# only a comment\n\n")).empty());
}

TEST(ParseFunctions, TopLevelStatementsFormSyntheticUnit) {
    const std::string src = "def f(a):\n    return a\n\nx = int(input())\nprint(f(x))\n";
    const auto fns = parse_functions(SourceUnit::original("t", src));
    ASSERT_EQ(fns.size(), 2u);
    EXPECT_EQ(fns[0].name, "f");
    EXPECT_TRUE(fns[1].is_synthetic_toplevel);
    EXPECT_EQ(fns[1].name, kSyntheticFunctionName);
}

TEST(ParseFunctions, ScriptStyleProgram) {
    const std::string src = "n = int(input())\nfor i in range(n):\n    if i % 2:\n        print(i)\n";
    const auto fns = parse_functions(SourceUnit::original("t", src));
    ASSERT_EQ(fns.size(), 1u);
    EXPECT_TRUE(fns[0].is_synthetic_toplevel);
    EXPECT_EQ(fns[0].constructs.size(), 2u);
}

TEST(ParseFunctions, MethodsAreQualified) {
    const std::string src = "class Solution:\n    def solve(self, x):\n        return x\n";
    const auto fns = parse_functions(SourceUnit::original("t", src));
    ASSERT_EQ(fns.size(), 1u);
    EXPECT_EQ(fns[0].name, "Solution.solve");
}

TEST(ParseFunctions, NestedDefAttachesToEnclosingFunction) {
    const std::string src = "def outer(x):\n    if x:\n        def inner(y):\n            while y:\n                y -= 1\n"
                            "        return inner\n    return None\n";
    const auto fns = parse_functions(SourceUnit::original("t", src));
    ASSERT_EQ(fns.size(), 1u);
    const std::vector<std::pair<ConstructKind, int>> want{{ConstructKind::BranchIf, 0}, {ConstructKind::LoopWhile, 1}};
    EXPECT_EQ(shape(fns[0]), want);
}

TEST(ParseFunctions, InconsistentIndentationIsParseError) {
    const std::string src = "def f(x):\n    if x:\n        return 1\n      return 2\n";
    try {
        parse_functions(SourceUnit::original("t", src));
        FAIL() << "expected ParseError";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 4);
    }
}

TEST(ExtractConstructs, NestedIsPrime) {
    const auto p = parse(listing("is_prime_nested"));
    const std::vector<std::pair<ConstructKind, int>> want{{ConstructKind::BranchIf, 0},
                                                          {ConstructKind::BranchElse, 0},
                                                          {ConstructKind::LoopWhile, 1},
                                                          {ConstructKind::BranchIf, 2},
                                                          {ConstructKind::BranchElse, 2}};
    EXPECT_EQ(shape(p.functions.at(0)), want);
}

TEST(ExtractConstructs, FlatIsPrime) {
    const auto p = parse(listing("is_prime_flat"));
    const std::vector<std::pair<ConstructKind, int>> want{
        {ConstructKind::BranchIf, 0}, {ConstructKind::LoopWhile, 0}, {ConstructKind::BranchIf, 1}};
    EXPECT_EQ(shape(p.functions.at(0)), want);
}

TEST(ExtractConstructs, StraightLine) {
    const auto p = parse("def f(a, b):\n    c = a + b\n    return c\n");
    EXPECT_TRUE(extract_constructs(p.functions.at(0)).empty());
}

TEST(ExtractConstructs, HandlersCountAndComprehensionsDoNot) {
    const auto p = parse("def f(xs):\n    try:\n        return [x for x in xs if x]\n"
                         "    except ValueError:\n        return []\n    except Exception:\n        return None\n");
    const std::vector<std::pair<ConstructKind, int>> want{{ConstructKind::ExceptionHandler, 0},
                                                          {ConstructKind::ExceptionHandler, 0}};
    EXPECT_EQ(shape(p.functions.at(0)), want);
}

TEST(ExtractConstructs, SiblingSpansDoNotOverlapAndDepthFollowsContainment) {
    cogref::testing::ProgramGenerator gen(11);
    for (int i = 0; i < 60; ++i) {
        const auto p = parse(gen.function("f"));
        const auto &cs = p.functions.at(0).constructs;
        for (std::size_t a = 0; a < cs.size(); ++a) {
            int enclosing = 0;
            for (std::size_t b = 0; b < cs.size(); ++b) {
                if (a == b)
                    continue;
                if (cs[b].span.contains(cs[a].span) && cs[b].span != cs[a].span)
                    ++enclosing;
                else if (cs[a].depth == cs[b].depth && !cs[a].span.contains(cs[b].span)) {
                    EXPECT_FALSE(cs[a].span.overlaps(cs[b].span)) << "function " << i;
                }
            }
            EXPECT_EQ(cs[a].depth, enclosing) << "function " << i << " construct " << a;
        }
    }
}

TEST(Signature, AvgAndDefaults) {
    const auto avg = extract_signature(parse("def avg(a, b):\n    return a + b\n").functions.at(0));
    EXPECT_EQ(avg.name, "avg");
    ASSERT_EQ(avg.params.size(), 2u);
    EXPECT_EQ(avg.params[0], (Parameter{"a", false}));
    EXPECT_EQ(avg.params[1], (Parameter{"b", false}));

    const auto zero = extract_signature(parse("def f():\n    pass\n").functions.at(0));
    EXPECT_EQ(zero.name, "f");
    EXPECT_TRUE(zero.params.empty());

    const auto dflt = extract_signature(parse("def g(x, y=2, *args, **kw):\n    pass\n").functions.at(0));
    ASSERT_EQ(dflt.params.size(), 4u);
    EXPECT_FALSE(dflt.params[0].has_default);
    EXPECT_TRUE(dflt.params[1].has_default);
    EXPECT_EQ(dflt.params[2].name, "*args");
    EXPECT_EQ(dflt.params[3].name, "**kw");
}

TEST(Signature, EqualityIsExact) {
    const auto a = extract_signature(parse("def f(x, y):\n    pass\n").functions.at(0));
    const auto b = extract_signature(parse("def f(y, x):\n    pass\n").functions.at(0));
    const auto c = extract_signature(parse("def f(x, y=1):\n    pass\n").functions.at(0));
    EXPECT_NE(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a, extract_signature(parse("def f(x,y):\n    return 1\n").functions.at(0)));
}

TEST(DefUse, SingleAssignment) {
    const auto x = extract_def_use(parse("def f():\n    x = 1\n    return x\n").functions.at(0));
    const auto y = extract_def_use(parse("def f():\n    y = 1\n    return y\n").functions.at(0));
    ASSERT_EQ(x.size(), 1u);
    EXPECT_EQ(x, y);
    EXPECT_LT(x[0].def_site, x[0].use_site);
}

TEST(DefUse, NthEvenBaselineHandOracle) {
    // tokens: def nth_even ( n ) : <doc> if n < 1 : raise ValueError ( <str> ) return ( n ...
    //         0   1        2 3 4 5 6     7  8 ...                                17     18 19
    const auto pairs = extract_def_use(parse(listing("nth_even_baseline")).functions.at(0));
    const std::vector<DefUsePair> want{{"var_0", 3, 8}, {"var_0", 3, 19}};
    EXPECT_EQ(pairs, want);
}

TEST(DefUse, ReassignmentReachesLaterUses) {
    const auto pairs = extract_def_use(parse("def f(a):\n    a = a + 1\n    return a\n").functions.at(0));
    // param a -> use in rhs; assigned a -> use in return
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(pairs[0].def_site, 3u);
    EXPECT_EQ(pairs[1].def_site, 6u);
    EXPECT_EQ(pairs[0].variable, pairs[1].variable);
}

TEST(RenameInvariance, ConstructsMultisetAndDefUse) {
    const std::string a = "def total(xs, limit=3):\n    acc = 0\n    for item in xs:\n        if item > limit:\n"
                          "            acc += item\n        else:\n            acc -= 1\n    return [acc for acc in xs]\n";
    const std::string b = std::regex_replace(
        std::regex_replace(std::regex_replace(std::regex_replace(a, std::regex("\\bacc\\b"), "s"), std::regex("\\bitem\\b"), "v"),
                           std::regex("\\bxs\\b"), "values"),
        std::regex("\\blimit\\b"), "cap");
    const auto pa = parse(a);
    const auto pb = parse(b);
    const auto &fa = pa.functions.at(0);
    const auto &fb = pb.functions.at(0);
    EXPECT_EQ(shape(fa), shape(fb));
    EXPECT_EQ(subtree_multiset(fa), subtree_multiset(fb));
    EXPECT_EQ(subtree_multiset(pa), subtree_multiset(pb));
    EXPECT_EQ(extract_def_use(fa), extract_def_use(fb));
    EXPECT_FALSE(extract_def_use(fa).empty());
}

TEST(SubtreeMultiset, IdenticalSources) {
    for (const auto &e : fixture_corpus())
        EXPECT_EQ(subtree_multiset(parse(e.text)), subtree_multiset(parse(e.text))) << e.id;
}

TEST(SubtreeMultiset, IfAndWhileControlFingerprintsAreDisjoint) {
    const auto pi = parse("def f(x):\n    if x:\n        pass\n");
    const auto pw = parse("def f(x):\n    while x:\n        pass\n");
    const auto &if_node = pi.functions.at(0).body.children.at(0);
    const auto &while_node = pw.functions.at(0).body.children.at(0);
    EXPECT_NE(fingerprint(if_node), fingerprint(while_node));
    const auto mi = subtree_multiset(pi);
    const auto mw = subtree_multiset(pw);
    EXPECT_TRUE(mi.count(fingerprint(if_node)));
    EXPECT_FALSE(mw.count(fingerprint(if_node)));
    EXPECT_FALSE(mi.count(fingerprint(while_node)));
}

TEST(SubtreeMultiset, NthEvenOriginalVersusCddOverlap) {
    // Hand enumeration, CDD body `return (n - 1) * 2` with parameter n:
    //   Parameters(Param), Param, Return(...), BinOp:*(...), BinOp:-(...), Name, Number x2  -> 8
    // The original returns constants or `n*2-2`, so only the parameter
    // subtrees, the Name leaf and both Number leaves recur there       -> 5
    const auto orig = subtree_multiset(parse(listing("nth_even_original")).functions.at(0));
    const auto cdd = subtree_multiset(parse(listing("nth_even_cdd")).functions.at(0));
    EXPECT_EQ(multiset_size(cdd), 8u);
    EXPECT_EQ(multiset_intersection_size(orig, cdd), 5u);
    EXPECT_EQ(multiset_intersection_size(cdd, orig), 5u);
}

TEST(Parse, DeterministicAcrossThreads) {
    const auto corpus = fixture_corpus();
    auto digest = [&] {
        std::string out;
        for (const auto &e : corpus) {
            const auto p = parse(e.text);
            for (const auto &fn : p.functions) {
                out += fn.name + ":";
                for (const auto &c : fn.constructs)
                    out += std::to_string(static_cast<int>(c.kind)) + "@" + std::to_string(c.depth) + ",";
                for (const auto &[fp, n] : subtree_multiset(fn))
                    out += fp + "#" + std::to_string(n);
                for (const auto &d : extract_def_use(fn))
                    out += d.variable + std::to_string(d.def_site) + ">" + std::to_string(d.use_site);
            }
        }
        return out;
    };
    const std::string serial = digest();
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 4; ++i)
        futures.push_back(std::async(std::launch::async, digest));
    for (auto &f : futures)
        EXPECT_EQ(f.get(), serial);
}

TEST(Parse, WideSyntaxSurvivesStrictMode) {
    const std::string src =
        "import os, sys\nfrom math import (pi,\n    e)\n\n@decorator(1)\nclass A(Base, metaclass=Meta):\n"
        "    '''doc'''\n    x: int = 3\n    async def m(self, *, k=1, **kw) -> None:\n"
        "        async with lock as l:\n            await thing()\n        global g\n"
        "        data = {k: v for k, v in kw.items() if v}\n        s = lambda a, b=2: a[1:2, ::3]\n"
        "        if (n := len(data)) > 2:\n            yield from range(n)\n        del data[0]\n"
        "        assert n, 'msg'\n        raise ValueError('x') from None\n";
    ParseOptions strict;
    strict.strict = true;
    EXPECT_NO_THROW(parse_unit(SourceUnit::original("t", src), strict));
}
