#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cogref::source_ir {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive

    bool contains(const Span &other) const noexcept { return begin <= other.begin && other.end <= end; }
    bool overlaps(const Span &other) const noexcept { return begin < other.end && other.begin < end; }
    bool operator==(const Span &) const = default;
};

enum class NodeKind : std::uint8_t {
    // statements
    Suite,
    FunctionDef,
    Parameters,
    Param,
    Decorator,
    ClassDef,
    If,
    Elif,
    Else,
    For,
    While,
    Try,
    ExceptHandler,
    TryElse,
    Finally,
    With,
    WithItem,
    OpaqueBlock,
    Return,
    Assign,
    AugAssign,
    AnnAssign,
    ExprStmt,
    Pass,
    Break,
    Continue,
    Raise,
    Import,
    Global,
    Delete,
    Assert,
    Opaque,
    // expressions
    Name,
    Constant,  // True / False / None / ...
    Number,
    String,
    BinOp,
    UnaryOp,
    BoolOp,
    Compare,
    Call,
    Keyword,
    Attribute,
    Subscript,
    Slice,
    Tuple,
    List,
    Dict,
    Set,
    DictEntry,
    Comprehension,
    CompFor,
    CompIf,
    Lambda,
    IfExp,
    Starred,
    NamedExpr,
    Await,
    Yield,
};

std::string_view to_string(NodeKind kind);

/// One node of the parse structure. Statement and expression nodes share the
/// representation; token ranges index into the unit's TokenStream.
struct SyntaxNode {
    NodeKind kind = NodeKind::Opaque;
    // Operator text for operator nodes; identifier for Name/FunctionDef/ClassDef/Param/Keyword/Attribute;
    // lexeme for literals; "*"/"**" for starred params.
    std::string label;
    Span span;
    std::size_t token_begin = 0;
    std::size_t token_end = 0;  // exclusive
    bool has_default = false;   // Param only
    std::vector<SyntaxNode> children;

    const SyntaxNode *find_child(NodeKind k) const;
};

bool is_statement(NodeKind kind);

/// True for an expression statement holding only a string literal as the first
/// statement of a module, class or function body.
bool is_docstring(const SyntaxNode &stmt, bool first_in_suite);

}  // namespace cogref::source_ir
