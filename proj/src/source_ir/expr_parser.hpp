#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cogref/source_ir/syntax.hpp"
#include "cogref/source_ir/token.hpp"

namespace cogref::source_ir::detail {

// Raised when a token range does not form an expression of the supported
// subset; callers turn it into an opaque node or a ParseError.
struct ExprError : std::runtime_error {
    ExprError(const char *what, std::size_t token) : std::runtime_error(what), token(token) {}
    std::size_t token;
};

SyntaxNode make_node(const std::vector<Token> &toks, NodeKind kind, std::size_t begin, std::size_t end);

/// Recursive-descent parser over the half-open token range [begin, end).
class ExprParser {
public:
    ExprParser(const std::vector<Token> &toks, std::size_t begin, std::size_t end);

    // Entry points consume the whole range or throw.
    SyntaxNode parse_testlist();      // a, *b, c  (tuple when a comma is present)
    SyntaxNode parse_test();          // single expression incl. lambda / ternary / walrus
    SyntaxNode parse_target_list();   // assignment-style targets (for loops)
    SyntaxNode parse_parameters(bool allow_annotations);  // whole range is a parameter list
    void expect_end() const;

    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ >= end_; }

    // Individual productions used by the statement parser.
    SyntaxNode test();
    SyntaxNode star_or_test();
    SyntaxNode expr();

private:
    const Token *peek(std::size_t ahead = 0) const;
    bool check(std::string_view lexeme, std::size_t ahead = 0) const;
    bool check_cls(TokenClass cls, std::size_t ahead = 0) const;
    bool accept(std::string_view lexeme);
    void expect(std::string_view lexeme);
    [[noreturn]] void fail(const char *what) const;

    SyntaxNode node(NodeKind kind, std::size_t begin, std::vector<SyntaxNode> children = {},
                    std::string label = {}) const;

    SyntaxNode namedexpr_test();
    SyntaxNode lambda_def();
    SyntaxNode or_test();
    SyntaxNode and_test();
    SyntaxNode not_test();
    SyntaxNode comparison();
    SyntaxNode bit_or();
    SyntaxNode bit_xor();
    SyntaxNode bit_and();
    SyntaxNode shift_expr();
    SyntaxNode arith_expr();
    SyntaxNode term();
    SyntaxNode factor();
    SyntaxNode power();
    SyntaxNode await_primary();
    SyntaxNode atom_expr();
    SyntaxNode atom();
    SyntaxNode yield_expr();

    SyntaxNode enclosure(std::string_view close, NodeKind seq_kind, const char *comp_label);
    SyntaxNode brace_display();
    SyntaxNode comprehension_tail(std::size_t begin, SyntaxNode element, std::string_view close, const char *label);
    void call_arguments(std::vector<SyntaxNode> &args);
    SyntaxNode subscript_list();
    SyntaxNode subscript();
    SyntaxNode target_list_until_in();
    SyntaxNode param_list(std::string_view close, bool allow_annotations);

    const std::vector<Token> &toks_;
    std::size_t pos_;
    std::size_t end_;
};

}  // namespace cogref::source_ir::detail
