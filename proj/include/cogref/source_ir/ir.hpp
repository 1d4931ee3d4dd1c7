#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/source_ir/syntax.hpp"
#include "cogref/source_ir/token.hpp"

namespace cogref::source_ir {

class ParseError : public SourceError {
public:
    using SourceError::SourceError;
};

enum class UnitKind { Original, Refactored };

struct SourceUnit {
    std::string origin_id;
    std::string text;
    UnitKind kind = UnitKind::Original;

    static SourceUnit original(std::string origin_id, std::string text);
    static SourceUnit refactored(std::string origin_id, std::string text);

    bool is_blank() const;
};

enum class ConstructKind {
    BranchIf,
    BranchElif,
    BranchElse,
    LoopFor,
    LoopWhile,
    ExceptionHandler,
};

std::string_view to_string(ConstructKind kind);

struct ControlConstruct {
    ConstructKind kind;
    int depth = 0;  // number of enclosing control constructs within the function
    Span span;

    bool operator==(const ControlConstruct &) const = default;
};

struct Parameter {
    std::string name;  // "*args" / "**kwargs" keep their stars; bare "*" and "/" are markers
    bool has_default = false;

    bool operator==(const Parameter &) const = default;
};

struct Signature {
    std::string name;
    std::vector<Parameter> params;

    bool operator==(const Signature &) const = default;
    std::string to_string() const;
};

struct FunctionUnit {
    std::string name;  // methods are qualified as Class.method
    std::vector<Parameter> params;
    Span body_span;
    std::vector<ControlConstruct> constructs;
    bool is_synthetic_toplevel = false;
    // Suite holding the function body (or the collected top-level statements).
    SyntaxNode body;
    // Parameter nodes, kept for def-use analysis.
    SyntaxNode parameters;
};

inline constexpr std::string_view kSyntheticFunctionName = "<module>";

/// A fully parsed source unit: tokens, module parse structure, functions.
struct ParsedUnit {
    SourceUnit unit;
    TokenStream tokens;
    SyntaxNode module;  // Suite of top-level statements
    std::vector<FunctionUnit> functions;
};

struct ParseOptions {
    // Reject statements the parser cannot structure instead of keeping them as
    // opaque straight-line nodes.
    bool strict = false;
};

/// Throws LexError / ParseError.
ParsedUnit parse_unit(const SourceUnit &unit, ParseOptions options = {});

/// One FunctionUnit per top-level function (and per method of a top-level
/// class); remaining top-level statements form one synthetic unit.
std::vector<FunctionUnit> parse_functions(const SourceUnit &unit);

std::vector<ControlConstruct> extract_constructs(const FunctionUnit &fn);

Signature extract_signature(const FunctionUnit &fn);

/// Every string-literal token of the unit except docstrings, as token indices.
std::vector<std::size_t> non_docstring_string_tokens(const ParsedUnit &parsed);

/// Token indices that belong to docstrings.
std::vector<std::size_t> docstring_tokens(const ParsedUnit &parsed);

}  // namespace cogref::source_ir
