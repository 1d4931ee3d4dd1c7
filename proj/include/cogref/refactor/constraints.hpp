#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::refactor {

enum class ViolationKind {
    SignatureChanged,
    EntryFunctionRenamed,
    NumericLiteralDrift,
    StringCaseDrift,
    StringLiteralDrift,
};

std::string_view to_string(ViolationKind kind);
std::optional<ViolationKind> parse_violation_kind(std::string_view text);

struct ConstraintViolation {
    ViolationKind kind;
    std::string detail;
    std::string lexeme;  // original literal or signature the violation is about

    bool operator==(const ConstraintViolation &) const = default;
};

/// Throws on an unparseable original. When entry_point is empty and the
/// original has exactly one function, that function is the entry point.
/// An unparseable refactored unit is checked at token level only.
std::vector<ConstraintViolation> check_constraints(const source_ir::SourceUnit &original,
                                                   const source_ir::SourceUnit &refactored,
                                                   const std::optional<std::string> &entry_point = std::nullopt);

}  // namespace cogref::refactor
