#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cogref::source_ir {

SourceError::SourceError(const std::string &what, int line, int column)
    : std::runtime_error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

std::string_view to_string(TokenClass cls) {
    switch (cls) {
        case TokenClass::Keyword: return "keyword";
        case TokenClass::Identifier: return "identifier";
        case TokenClass::Number: return "literal_number";
        case TokenClass::String: return "literal_string";
        case TokenClass::Operator: return "operator";
        case TokenClass::Punctuation: return "punctuation";
    }
    return "unknown";
}

bool is_keyword(std::string_view word) {
    static constexpr std::array<std::string_view, 35> kKeywords = {
        "False", "None",   "True",    "and",      "as",       "assert", "async", "await",  "break",
        "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
        "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise",   "return",   "try",      "while",  "with",  "yield"};
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::string TokenStream::render() const {
    std::string out;
    for (const auto &tok : tokens) {
        out += tok.leading;
        out += tok.lexeme;
    }
    out += trailing;
    return out;
}

std::string string_literal_body(std::string_view lexeme) {
    std::size_t i = 0;
    while (i < lexeme.size() && lexeme[i] != '\'' && lexeme[i] != '"')
        ++i;
    if (i >= lexeme.size())
        return std::string(lexeme);
    const char q = lexeme[i];
    const bool triple = lexeme.size() >= i + 6 && lexeme[i + 1] == q && lexeme[i + 2] == q;
    const std::size_t quote_len = triple ? 3 : 1;
    if (lexeme.size() < i + 2 * quote_len)
        return {};
    return std::string(lexeme.substr(i + quote_len, lexeme.size() - i - 2 * quote_len));
}

namespace detail {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2)
        return false;
    std::string lower;
    for (char c : word)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" || lower == "rb" ||
           lower == "fr" || lower == "rf";
}

constexpr std::array<std::string_view, 24> kOperators = {
    "**=", "//=", ">>=", "<<=", "->", ":=", "**", "//", "==", "!=", "<=", ">=", "<<",
    ">>",  "+=",  "-=",  "*=",  "/=", "%=", "&=", "|=", "^=", "@=", "!"};
constexpr std::string_view kSingleOperators = "+-*/%@&|^~<>=";
constexpr std::string_view kPunctuation = "()[]{},:;.";

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexedSource run() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                pending_ += c;
                advance(1);
                if (depth_ == 0)
                    close_line();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                pending_ += c;
                advance(1);
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance(1);
            } else if (c == '\\' && pos_ + 1 < src_.size() &&
                       (src_[pos_ + 1] == '\n' || (src_[pos_ + 1] == '\r' && pos_ + 2 < src_.size() &&
                                                   src_[pos_ + 2] == '\n'))) {
                const std::size_t n = src_[pos_ + 1] == '\n' ? 2 : 3;
                pending_.append(src_.substr(pos_, n));
                advance(n);
            } else {
                lex_token();
            }
        }
        close_line();
        out_.stream.trailing = std::move(pending_);
        return std::move(out_);
    }

private:
    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
                line_start_ = pos_ + 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void emit(TokenClass cls, std::size_t start, int line, int col) {
        Token tok;
        tok.cls = cls;
        tok.lexeme = std::string(src_.substr(start, pos_ - start));
        tok.offset = start;
        tok.line = line;
        tok.column = col;
        tok.leading = std::move(pending_);
        pending_.clear();
        if (!line_open_) {
            line_open_ = true;
            current_.first = out_.stream.tokens.size();
            current_.line = line;
            current_.indent = std::string(src_.substr(tok_line_start_, start - tok_line_start_));
        }
        out_.stream.tokens.push_back(std::move(tok));
    }

    void close_line() {
        if (!line_open_)
            return;
        current_.last = out_.stream.tokens.size();
        out_.lines.push_back(current_);
        current_ = {};
        line_open_ = false;
        depth_ = 0;
    }

    void lex_token() {
        const std::size_t start = pos_;
        const int line = line_;
        const int col = col_;
        tok_line_start_ = line_start_;
        const auto c = static_cast<unsigned char>(src_[pos_]);

        if (is_ident_start(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && is_ident_char(static_cast<unsigned char>(src_[end])))
                ++end;
            const std::string_view word = src_.substr(pos_, end - pos_);
            if (end < src_.size() && (src_[end] == '\'' || src_[end] == '"') && is_string_prefix(word)) {
                advance(end - pos_);
                lex_string(start, line, col);
                return;
            }
            advance(end - pos_);
            emit(is_keyword(word) ? TokenClass::Keyword : TokenClass::Identifier, start, line, col);
            return;
        }
        if (std::isdigit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            lex_number();
            emit(TokenClass::Number, start, line, col);
            return;
        }
        if (c == '\'' || c == '"') {
            lex_string(start, line, col);
            return;
        }
        if (src_.substr(pos_, 3) == "...") {
            advance(3);
            emit(TokenClass::Punctuation, start, line, col);
            return;
        }
        for (std::string_view op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                advance(op.size());
                emit(TokenClass::Operator, start, line, col);
                return;
            }
        }
        if (kSingleOperators.find(static_cast<char>(c)) != std::string_view::npos) {
            advance(1);
            emit(TokenClass::Operator, start, line, col);
            return;
        }
        if (kPunctuation.find(static_cast<char>(c)) != std::string_view::npos) {
            if (c == '(' || c == '[' || c == '{')
                ++depth_;
            else if ((c == ')' || c == ']' || c == '}') && depth_ > 0)
                --depth_;
            advance(1);
            emit(TokenClass::Punctuation, start, line, col);
            return;
        }
        throw LexError(std::string("unexpected character '") + static_cast<char>(c) + "'", line, col);
    }

    void lex_number() {
        auto digit_run = [&](auto pred) {
            while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance(1);
        };
        const auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
        if (src_[pos_] == '0' && pos_ + 1 < src_.size()) {
            const char p = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_ + 1])));
            if (p == 'x' || p == 'o' || p == 'b') {
                advance(2);
                digit_run([](unsigned char ch) { return std::isxdigit(ch) != 0; });
                return;
            }
        }
        digit_run(is_dec);
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance(1);
            digit_run(is_dec);
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
                ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                advance(look - pos_);
                digit_run(is_dec);
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J'))
            advance(1);
    }

    void lex_string(std::size_t start, int line, int col) {
        const char q = src_[pos_];
        const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
        advance(triple ? 3 : 1);
        while (true) {
            if (pos_ >= src_.size())
                throw LexError("unterminated string literal", line, col);
            const char ch = src_[pos_];
            if (ch == '\\') {
                advance(pos_ + 1 < src_.size() ? 2 : 1);
                continue;
            }
            if (!triple && ch == '\n')
                throw LexError("unterminated string literal", line, col);
            if (ch == q) {
                if (!triple) {
                    advance(1);
                    break;
                }
                if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
                    advance(3);
                    break;
                }
            }
            advance(1);
        }
        emit(TokenClass::String, start, line, col);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::size_t line_start_ = 0;
    std::size_t tok_line_start_ = 0;
    int depth_ = 0;
    std::string pending_;
    bool line_open_ = false;
    LogicalLine current_;
    LexedSource out_;
};

}  // namespace

LexedSource lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace detail

TokenStream tokenize(std::string_view source) { return detail::lex(source).stream; }

}  // namespace cogref::source_ir
