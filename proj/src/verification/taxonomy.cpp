#include "cogref/verification/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace cogref::verification {

using refactor::ViolationKind;
using source_ir::NodeKind;
using source_ir::SyntaxNode;

std::string_view to_string(ErrorLabel label) {
    switch (label) {
        case ErrorLabel::LogicAlteration: return "LogicAlteration";
        case ErrorLabel::SmallValueDiscrepancy: return "SmallValueDiscrepancy";
        case ErrorLabel::FunctionSignatureChange: return "FunctionSignatureChange";
        case ErrorLabel::ConditionalLogicIssue: return "ConditionalLogicIssue";
        case ErrorLabel::Miscellaneous: return "Miscellaneous";
    }
    return "Miscellaneous";
}

std::optional<ErrorLabel> parse_error_label(std::string_view text) {
    for (auto l : {ErrorLabel::LogicAlteration, ErrorLabel::SmallValueDiscrepancy, ErrorLabel::FunctionSignatureChange,
                   ErrorLabel::ConditionalLogicIssue, ErrorLabel::Miscellaneous})
        if (to_string(l) == text)
            return l;
    return std::nullopt;
}

std::string_view to_string(LabelSource source) { return source == LabelSource::Human ? "human" : "heuristic"; }

ErrorCategory resolve_label(const ErrorCategory &heuristic, const std::optional<ErrorLabel> &human) {
    if (human)
        return {*human, LabelSource::Human};
    return heuristic;
}

namespace {

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    if (s.empty())
        return std::nullopt;
    const std::string text(s);
    char *end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

bool is_float_lexeme(const std::string &lexeme) {
    if (lexeme.size() > 1 && lexeme[0] == '0' && std::string("xXoObB").find(lexeme[1]) != std::string::npos)
        return false;
    return lexeme.find_first_of(".eE") != std::string::npos;
}

// Exception class named at the front of "Type: message", after an optional "case N: ".
std::string exception_type(std::string_view text) {
    if (text.rfind("case ", 0) == 0) {
        const auto colon = text.find(": ");
        if (colon != std::string_view::npos)
            text.remove_prefix(colon + 2);
    }
    std::size_t end = 0;
    while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_' ||
                                 text[end] == '.'))
        ++end;
    std::string type(text.substr(0, end));
    const auto dot = type.rfind('.');
    return dot == std::string::npos ? type : type.substr(dot + 1);
}

// Guard exception types: raise targets plus AssertionError for assert statements.
void collect_guards(const SyntaxNode &n, std::map<std::string, int> &out) {
    if (n.kind == NodeKind::Raise && !n.children.empty()) {
        const SyntaxNode *target = &n.children.front();
        if (target->kind == NodeKind::Call && !target->children.empty())
            target = &target->children.front();
        if (target->kind == NodeKind::Name || target->kind == NodeKind::Attribute)
            ++out[target->label];
    } else if (n.kind == NodeKind::Assert) {
        ++out["AssertionError"];
    }
    for (const auto &c : n.children)
        collect_guards(c, out);
}

std::map<std::string, int> guards_of(const source_ir::SourceUnit &unit) {
    std::map<std::string, int> out;
    try {
        collect_guards(source_ir::parse_unit(unit).module, out);
    } catch (const source_ir::SourceError &) {
    }
    return out;
}

bool is_unbound_name_error(const std::string &type) {
    static const char *kTypes[] = {"NameError",   "UnboundLocalError", "SyntaxError",        "IndentationError",
                                   "TabError",    "ImportError",       "ModuleNotFoundError"};
    return std::find(std::begin(kTypes), std::end(kTypes), type) != std::end(kTypes);
}

}  // namespace

bool is_small_numeric_mismatch(std::string_view failure_text) {
    constexpr std::string_view kPrefix = "AssertionError: ";
    if (failure_text.rfind(kPrefix, 0) == 0)
        failure_text.remove_prefix(kPrefix.size());
    const auto sep = failure_text.find(" != ");
    if (sep == std::string_view::npos)
        return false;
    const auto a = parse_number(failure_text.substr(0, sep));
    const auto b = parse_number(failure_text.substr(sep + 4));
    if (!a || !b || *a == *b)
        return false;
    const double scale = std::max(std::abs(*a), std::abs(*b));
    return std::abs(*a - *b) / scale < 1e-2;
}

ErrorCategory classify_failure(const refactor::RefactorRecord &record, const TestOutcome &outcome,
                               const source_ir::SourceUnit &original) {
    const ErrorCategory misc{ErrorLabel::Miscellaneous, LabelSource::Heuristic};
    if (!record.completion_error.empty() || !record.extracted || outcome.verdict == Verdict::SetupError)
        return misc;
    const auto candidate = source_ir::SourceUnit::refactored(record.origin_id, *record.extracted);
    try {
        source_ir::parse_unit(candidate);
    } catch (const source_ir::SourceError &) {
        return misc;
    }

    auto has = [&](auto pred) { return std::any_of(record.violations.begin(), record.violations.end(), pred); };
    if (has([](const auto &v) {
            return v.kind == ViolationKind::SignatureChanged || v.kind == ViolationKind::EntryFunctionRenamed;
        }))
        return {ErrorLabel::FunctionSignatureChange, LabelSource::Heuristic};

    if (has([](const auto &v) { return v.kind == ViolationKind::NumericLiteralDrift && is_float_lexeme(v.lexeme); }) ||
        (outcome.verdict == Verdict::Fail && is_small_numeric_mismatch(outcome.exception)))
        return {ErrorLabel::SmallValueDiscrepancy, LabelSource::Heuristic};

    const std::string type = exception_type(outcome.exception);
    if (outcome.verdict == Verdict::RuntimeError && !type.empty()) {
        const auto before = guards_of(original);
        const auto after = guards_of(candidate);
        auto it = after.find(type);
        const int added = it == after.end() ? 0 : it->second - (before.count(type) ? before.at(type) : 0);
        if (added > 0)
            return {ErrorLabel::ConditionalLogicIssue, LabelSource::Heuristic};
        if (is_unbound_name_error(type))
            return misc;
    }
    return {ErrorLabel::LogicAlteration, LabelSource::Heuristic};
}

}  // namespace cogref::verification
