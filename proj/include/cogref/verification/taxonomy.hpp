#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cogref/refactor/record.hpp"
#include "cogref/source_ir/ir.hpp"
#include "cogref/verification/verify.hpp"

namespace cogref::verification {

enum class ErrorLabel {
    LogicAlteration,
    SmallValueDiscrepancy,
    FunctionSignatureChange,
    ConditionalLogicIssue,
    Miscellaneous,
};

enum class LabelSource { Heuristic, Human };

std::string_view to_string(ErrorLabel label);
std::optional<ErrorLabel> parse_error_label(std::string_view text);
std::string_view to_string(LabelSource source);

struct ErrorCategory {
    ErrorLabel label = ErrorLabel::Miscellaneous;
    LabelSource source = LabelSource::Heuristic;

    bool operator==(const ErrorCategory &) const = default;
};

/// Heuristic pre-label for a non-passing record. Rules are tried in order:
/// no usable candidate, signature, small value, added guard, unbound names,
/// and logic alteration as the fallback.
ErrorCategory classify_failure(const refactor::RefactorRecord &record, const TestOutcome &outcome,
                               const source_ir::SourceUnit &original);

/// A human label, when present, replaces the heuristic one.
ErrorCategory resolve_label(const ErrorCategory &heuristic, const std::optional<ErrorLabel> &human);

/// "X != Y" with two numbers whose relative difference is below 1e-2.
bool is_small_numeric_mismatch(std::string_view failure_text);

}  // namespace cogref::verification
