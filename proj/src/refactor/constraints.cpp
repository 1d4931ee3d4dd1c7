#include "cogref/refactor/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace cogref::refactor {

using source_ir::ParsedUnit;
using source_ir::Token;
using source_ir::TokenClass;

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::SignatureChanged: return "SignatureChanged";
        case ViolationKind::EntryFunctionRenamed: return "EntryFunctionRenamed";
        case ViolationKind::NumericLiteralDrift: return "NumericLiteralDrift";
        case ViolationKind::StringCaseDrift: return "StringCaseDrift";
        case ViolationKind::StringLiteralDrift: return "StringLiteralDrift";
    }
    return "Unknown";
}

std::optional<ViolationKind> parse_violation_kind(std::string_view text) {
    for (auto k : {ViolationKind::SignatureChanged, ViolationKind::EntryFunctionRenamed,
                   ViolationKind::NumericLiteralDrift, ViolationKind::StringCaseDrift,
                   ViolationKind::StringLiteralDrift})
        if (to_string(k) == text)
            return k;
    return std::nullopt;
}

namespace {

struct Literals {
    std::multiset<std::string> numbers;
    std::set<std::string> strings;  // bodies, docstrings excluded
};

Literals literals_of(const std::vector<Token> &toks, const std::vector<std::size_t> &string_idx) {
    Literals out;
    for (const auto &t : toks)
        if (t.cls == TokenClass::Number)
            out.numbers.insert(t.lexeme);
    for (std::size_t i : string_idx)
        out.strings.insert(source_ir::string_literal_body(toks[i].lexeme));
    return out;
}

Literals literals_of(const ParsedUnit &p) { return literals_of(p.tokens.tokens, source_ir::non_docstring_string_tokens(p)); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string join(const std::multiset<std::string> &items) {
    if (items.empty())
        return "none";
    std::string out;
    for (const auto &s : items) {
        if (!out.empty())
            out += ", ";
        out += s;
    }
    return out;
}

void check_literals(const Literals &orig, const Literals &refac, std::vector<ConstraintViolation> &out) {
    std::map<std::string, std::size_t> need;
    for (const auto &n : orig.numbers)
        ++need[n];
    for (const auto &[lexeme, count] : need) {
        const std::size_t have = refac.numbers.count(lexeme);
        if (have < count)
            out.push_back({ViolationKind::NumericLiteralDrift,
                           "original `" + lexeme + "` appears " + std::to_string(count) + "x, refactored " +
                               std::to_string(have) + "x (refactored numbers: " + join(refac.numbers) + ")",
                           lexeme});
    }
    for (const auto &s : orig.strings) {
        if (refac.strings.count(s) != 0)
            continue;
        const auto match = std::find_if(refac.strings.begin(), refac.strings.end(),
                                         [&](const std::string &r) { return lower(r) == lower(s); });
        if (match != refac.strings.end())
            out.push_back({ViolationKind::StringCaseDrift, "original \"" + s + "\" became \"" + *match + "\"", s});
        else
            out.push_back({ViolationKind::StringLiteralDrift,
                           "original \"" + s + "\" missing from refactored (refactored strings: " +
                               join(std::multiset<std::string>(refac.strings.begin(), refac.strings.end())) + ")",
                           s});
    }
}

}  // namespace

std::vector<ConstraintViolation> check_constraints(const source_ir::SourceUnit &original,
                                                   const source_ir::SourceUnit &refactored,
                                                   const std::optional<std::string> &entry_point) {
    const ParsedUnit orig = source_ir::parse_unit(original);
    std::optional<ParsedUnit> refac;
    try {
        refac = source_ir::parse_unit(refactored);
    } catch (const source_ir::SourceError &) {
    }

    std::vector<ConstraintViolation> out;
    if (refac) {
        for (const auto &fn : orig.functions) {
            if (fn.is_synthetic_toplevel)
                continue;
            const auto want = source_ir::extract_signature(fn);
            std::vector<source_ir::Signature> same_name;
            for (const auto &g : refac->functions)
                if (g.name == fn.name)
                    same_name.push_back(source_ir::extract_signature(g));
            if (same_name.empty() || std::find(same_name.begin(), same_name.end(), want) != same_name.end())
                continue;
            out.push_back({ViolationKind::SignatureChanged,
                           "original " + want.to_string() + ", refactored " + same_name.front().to_string(),
                           want.to_string()});
        }

        std::optional<std::string> entry = entry_point;
        if (!entry || entry->empty()) {
            entry.reset();
            std::vector<std::string> names;
            for (const auto &fn : orig.functions)
                if (!fn.is_synthetic_toplevel)
                    names.push_back(fn.name);
            if (names.size() == 1)
                entry = names.front();
        }
        if (entry) {
            const bool present = std::any_of(refac->functions.begin(), refac->functions.end(),
                                             [&](const auto &g) { return g.name == *entry; });
            if (!present) {
                std::string defined;
                for (const auto &g : refac->functions) {
                    if (g.is_synthetic_toplevel)
                        continue;
                    defined += defined.empty() ? g.name : ", " + g.name;
                }
                out.push_back({ViolationKind::EntryFunctionRenamed,
                               "entry point `" + *entry + "` not defined (refactored defines: " +
                                   (defined.empty() ? "nothing" : defined) + ")",
                               *entry});
            }
        }
        check_literals(literals_of(orig), literals_of(*refac), out);
        return out;
    }

    // Token-level fallback for refactored text that does not parse.
    try {
        const auto toks = source_ir::tokenize(refactored.text);
        std::vector<std::size_t> strings;
        for (std::size_t i = 0; i < toks.tokens.size(); ++i)
            if (toks.tokens[i].cls == TokenClass::String)
                strings.push_back(i);
        check_literals(literals_of(orig), literals_of(toks.tokens, strings), out);
    } catch (const source_ir::SourceError &) {
    }
    return out;
}

}  // namespace cogref::refactor
