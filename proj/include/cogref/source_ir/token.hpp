#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogref::source_ir {

// Base for every diagnostic that carries a source position (1-based).
class SourceError : public std::runtime_error {
public:
    SourceError(const std::string &what, int line, int column);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class LexError : public SourceError {
public:
    using SourceError::SourceError;
};

enum class TokenClass {
    Keyword,
    Identifier,
    Number,
    String,
    Operator,
    Punctuation,
};

std::string_view to_string(TokenClass cls);

struct Token {
    TokenClass cls;
    std::string lexeme;
    std::size_t offset = 0;  // byte offset of the lexeme in the source
    int line = 1;
    int column = 1;
    // Source text between the previous token and this one, with comments removed.
    std::string leading;

    bool operator==(const Token &) const = default;
};

/// Ordered tokens of one source text. Comments are dropped; everything else
/// (whitespace, line continuations) is kept in `leading`/`trailing` so that
/// render() reproduces the comment-stripped source byte for byte.
struct TokenStream {
    std::vector<Token> tokens;
    std::string trailing;

    std::string render() const;
    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

bool is_keyword(std::string_view word);

/// Throws LexError on an unterminated string literal or an unrecognised character.
TokenStream tokenize(std::string_view source);

/// The body of a string literal without prefix and quotes (escapes are not decoded).
std::string string_literal_body(std::string_view lexeme);

}  // namespace cogref::source_ir
