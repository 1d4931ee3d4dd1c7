#include <algorithm>
#include <utility>

#include "cogref/source_ir/ir.hpp"
#include "expr_parser.hpp"
#include "lexer.hpp"
#include "parser.hpp"

namespace cogref::source_ir {

namespace {

using detail::ExprError;
using detail::ExprParser;
using detail::LogicalLine;
using detail::make_node;

struct Line {
    std::size_t first = 0;
    std::size_t last = 0;
    int level = 0;
    int lineno = 1;
};

bool ends_with_colon(const std::vector<Token> &toks, const LogicalLine &l) {
    const Token &t = toks[l.last - 1];
    return t.cls == TokenClass::Punctuation && t.lexeme == ":";
}

// Assigns block levels from indentation; rejects what the object language
// itself would reject (unexpected indent, dedent to an unknown column,
// inconsistent tab/space mixing, header without body).
std::vector<Line> assign_levels(const std::vector<Token> &toks, const std::vector<LogicalLine> &lines) {
    struct Width {
        int tab8;
        int tab1;
    };
    std::vector<Width> stack{{0, 0}};
    std::vector<Line> out;
    bool prev_header = false;
    for (const auto &l : lines) {
        Width w{0, 0};
        for (char c : l.indent) {
            if (c == '\t') {
                w.tab8 = (w.tab8 / 8 + 1) * 8;
                ++w.tab1;
            } else if (c == '\f') {
                w = {0, 0};
            } else {
                ++w.tab8;
                ++w.tab1;
            }
        }
        const Token &first = toks[l.first];
        if (w.tab8 > stack.back().tab8) {
            if (w.tab1 <= stack.back().tab1)
                throw ParseError("inconsistent use of tabs and spaces in indentation", first.line, first.column);
            if (!prev_header)
                throw ParseError("unexpected indent", first.line, first.column);
            stack.push_back(w);
        } else {
            if (prev_header)
                throw ParseError("expected an indented block", first.line, first.column);
            while (w.tab8 < stack.back().tab8)
                stack.pop_back();
            if (w.tab8 != stack.back().tab8)
                throw ParseError("unindent does not match any outer indentation level", first.line, first.column);
            if (w.tab1 != stack.back().tab1)
                throw ParseError("inconsistent use of tabs and spaces in indentation", first.line, first.column);
        }
        out.push_back({l.first, l.last, static_cast<int>(stack.size()) - 1, l.line});
        prev_header = ends_with_colon(toks, l);
    }
    if (prev_header) {
        const Token &last = toks[lines.back().last - 1];
        throw ParseError("expected an indented block", last.line, last.column);
    }
    return out;
}

class StatementParser {
public:
    StatementParser(const std::vector<Token> &toks, std::vector<Line> lines, bool strict)
        : toks_(toks), lines_(std::move(lines)), strict_(strict) {}

    SyntaxNode parse_module() {
        SyntaxNode module = make_node(toks_, NodeKind::Suite, 0, toks_.size());
        module.children = parse_suite(0);
        return module;
    }

private:
    const Token &tok(std::size_t i) const { return toks_[i]; }

    bool is(std::size_t i, std::string_view lexeme, std::size_t end) const {
        return i < end && toks_[i].cls != TokenClass::String && toks_[i].lexeme == lexeme;
    }

    [[noreturn]] void error_at(std::size_t token, const std::string &what) const {
        const Token &t = toks_[std::min(token, toks_.size() - 1)];
        throw ParseError(what, t.line, t.column);
    }

    std::vector<SyntaxNode> parse_suite(int level) {
        std::vector<SyntaxNode> stmts;
        std::vector<SyntaxNode> decorators;
        while (li_ < lines_.size() && lines_[li_].level == level) {
            const Line line = lines_[li_];
            if (is(line.first, "@", line.last)) {
                SyntaxNode deco = make_node(toks_, NodeKind::Decorator, line.first, line.last);
                try {
                    deco.children.push_back(expression(line.first + 1, line.last, &ExprParser::parse_test));
                } catch (const ExprError &err) {
                    if (strict_)
                        error_at(err.token, err.what());
                }
                decorators.push_back(std::move(deco));
                ++li_;
                continue;
            }
            SyntaxNode stmt = parse_statement(line);
            if (!decorators.empty()) {
                if (stmt.kind == NodeKind::FunctionDef || stmt.kind == NodeKind::ClassDef) {
                    stmt.children.insert(stmt.children.begin(), std::make_move_iterator(decorators.begin()),
                                         std::make_move_iterator(decorators.end()));
                } else {
                    for (auto &d : decorators)
                        stmts.push_back(std::move(d));
                }
                decorators.clear();
            }
            stmts.push_back(std::move(stmt));
        }
        for (auto &d : decorators)
            stmts.push_back(std::move(d));
        return stmts;
    }

    // Index of the colon closing a compound-statement header, skipping colons
    // that belong to brackets or lambdas.
    std::size_t header_colon(const Line &line) const {
        int depth = 0;
        int lambdas = 0;
        for (std::size_t i = line.first; i < line.last; ++i) {
            const Token &t = toks_[i];
            if (t.cls == TokenClass::Punctuation) {
                if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                    ++depth;
                else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                    --depth;
                else if (t.lexeme == ":" && depth == 0) {
                    if (lambdas > 0)
                        --lambdas;
                    else
                        return i;
                }
            } else if (t.cls == TokenClass::Keyword && t.lexeme == "lambda" && depth == 0) {
                ++lambdas;
            }
        }
        error_at(line.last - 1, "expected ':'");
    }

    // Body of a compound statement whose header colon is at `colon`. Consumes
    // the header line and, for block bodies, the indented lines below it.
    SyntaxNode parse_body(const Line &line, std::size_t colon) {
        ++li_;
        if (colon + 1 < line.last) {
            SyntaxNode suite = make_node(toks_, NodeKind::Suite, colon + 1, line.last);
            suite.children = simple_statements(colon + 1, line.last);
            return suite;
        }
        const int body_level = line.level + 1;
        const std::size_t first_tok = li_ < lines_.size() ? lines_[li_].first : toks_.size();
        std::vector<SyntaxNode> body = parse_suite(body_level);
        const std::size_t last_tok = li_ < lines_.size() ? lines_[li_].first : toks_.size();
        SyntaxNode suite = make_node(toks_, NodeKind::Suite, first_tok, last_tok);
        suite.children = std::move(body);
        return suite;
    }

    bool next_line_starts_with(int level, std::string_view keyword) const {
        if (li_ >= lines_.size() || lines_[li_].level != level)
            return false;
        return is(lines_[li_].first, keyword, lines_[li_].last);
    }

    // Token range of a compound statement: from its first token up to the
    // first token of the next unconsumed line.
    SyntaxNode finish(SyntaxNode n, std::size_t begin) const {
        const std::size_t end = li_ < lines_.size() ? lines_[li_].first : toks_.size();
        n.token_begin = begin;
        n.token_end = end;
        n.span = make_node(toks_, n.kind, begin, end).span;
        return n;
    }

    std::size_t depth_zero_keyword(std::size_t b, std::size_t e, std::string_view kw) const {
        int depth = 0;
        for (std::size_t i = b; i < e; ++i) {
            const Token &t = tok(i);
            if (t.cls == TokenClass::Punctuation) {
                if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                    ++depth;
                else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                    --depth;
            } else if (depth == 0 && t.cls == TokenClass::Keyword && t.lexeme == kw) {
                return i;
            }
        }
        return e;
    }

    SyntaxNode parse_statement(const Line &line) {
        const std::size_t b = line.first;
        const std::size_t e = line.last;
        const Token &head = tok(b);
        std::string_view kw = head.cls == TokenClass::Keyword ? std::string_view(head.lexeme) : std::string_view{};
        std::size_t skip = 0;
        if (head.lexeme == "async" && b + 1 < e &&
            (is(b + 1, "def", e) || is(b + 1, "for", e) || is(b + 1, "with", e))) {
            kw = tok(b + 1).lexeme;
            skip = 1;
        }
        const std::size_t saved = li_;
        try {
            if (kw == "def")
                return parse_def(line, b + skip);
            if (kw == "class")
                return parse_class(line);
            if (kw == "if")
                return parse_if(line);
            if (kw == "while" || kw == "for")
                return parse_loop(line, b + skip, kw == "for");
            if (kw == "try")
                return parse_try(line);
            if (kw == "with")
                return parse_with(line, b + skip);
            if (kw == "elif" || kw == "else" || kw == "except" || kw == "finally") {
                if (strict_)
                    error_at(b, "unexpected '" + std::string(kw) + "'");
                return opaque_block(line);
            }
        } catch (const ExprError &err) {
            if (strict_)
                error_at(err.token, err.what());
            // Header expression outside the supported subset: keep the block
            // structure, drop the header detail.
            li_ = saved;
            return opaque_block(line);
        }
        if (ends_with_colon(toks_, to_logical(line)))
            return opaque_block(line);
        ++li_;
        std::vector<SyntaxNode> stmts = simple_statements(b, e);
        if (stmts.size() == 1)
            return std::move(stmts.front());
        // Several `;`-separated statements on one line: keep them together.
        SyntaxNode suite = make_node(toks_, NodeKind::Suite, b, e);
        suite.children = std::move(stmts);
        return suite;
    }

    static LogicalLine to_logical(const Line &l) {
        LogicalLine ll;
        ll.first = l.first;
        ll.last = l.last;
        return ll;
    }

    SyntaxNode opaque_block(const Line &line) {
        const std::size_t begin = line.first;
        if (!ends_with_colon(toks_, to_logical(line))) {
            // Inline body after an unparseable header, or a stray clause.
            std::size_t colon = line.last;
            try {
                colon = header_colon(line);
            } catch (const ParseError &) {
            }
            if (colon >= line.last) {
                ++li_;
                return make_node(toks_, NodeKind::Opaque, line.first, line.last);
            }
            SyntaxNode n;
            n.kind = NodeKind::OpaqueBlock;
            n.label = tok(begin).lexeme;
            n.children.push_back(parse_body(line, colon));
            return finish(std::move(n), begin);
        }
        SyntaxNode n;
        n.kind = NodeKind::OpaqueBlock;
        n.label = tok(begin).lexeme;
        n.children.push_back(parse_body(line, line.last - 1));
        return finish(std::move(n), begin);
    }

    template <typename Fn>
    SyntaxNode expression(std::size_t b, std::size_t e, Fn fn) const {
        if (b >= e)
            throw ExprError("missing expression", b);
        ExprParser p(toks_, b, e);
        return (p.*fn)();
    }

    SyntaxNode parse_def(const Line &line, std::size_t def_tok) {
        const std::size_t e = line.last;
        const std::size_t colon = header_colon(line);
        std::size_t i = def_tok + 1;
        if (i >= e || tok(i).cls != TokenClass::Identifier)
            throw ExprError("expected function name", i);
        SyntaxNode n;
        n.kind = NodeKind::FunctionDef;
        n.label = tok(i).lexeme;
        ++i;
        if (!is(i, "(", e))
            throw ExprError("expected '('", i);
        const std::size_t close = matching(i, colon);
        ExprParser pp(toks_, i + 1, close);
        SyntaxNode params = pp.parse_parameters(true);
        if (close == i + 1)
            params = make_node(toks_, NodeKind::Parameters, i + 1, i + 1);
        n.children.push_back(std::move(params));
        i = close + 1;
        if (is(i, "->", e)) {
            n.children.push_back(expression(i + 1, colon, &ExprParser::parse_test));
        } else if (i != colon) {
            throw ExprError("unexpected token in function header", i);
        }
        n.children.push_back(parse_body(line, colon));
        return finish(std::move(n), line.first);
    }

    std::size_t matching(std::size_t open, std::size_t limit) const {
        int depth = 0;
        for (std::size_t i = open; i < limit; ++i) {
            const Token &t = toks_[i];
            if (t.cls != TokenClass::Punctuation)
                continue;
            if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                ++depth;
            else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}") {
                if (--depth == 0)
                    return i;
            }
        }
        throw ExprError("unbalanced brackets", open);
    }

    SyntaxNode parse_class(const Line &line) {
        const std::size_t colon = header_colon(line);
        std::size_t i = line.first + 1;
        if (i >= colon || tok(i).cls != TokenClass::Identifier)
            throw ExprError("expected class name", i);
        SyntaxNode n;
        n.kind = NodeKind::ClassDef;
        n.label = tok(i).lexeme;
        ++i;
        if (is(i, "(", colon)) {
            const std::size_t close = matching(i, colon);
            // parse `Name(...)` as a call so keyword bases are accepted, then drop the callee
            SyntaxNode bases = expression(i - 1, close + 1, &ExprParser::parse_test);
            if (bases.kind != NodeKind::Call)
                throw ExprError("bad class bases", i);
            bases.children.erase(bases.children.begin());
            n.children.push_back(std::move(bases));
            i = close + 1;
        }
        if (i != colon)
            throw ExprError("unexpected token in class header", i);
        n.children.push_back(parse_body(line, colon));
        return finish(std::move(n), line.first);
    }

    // An if/elif arm: [test, Suite]
    SyntaxNode parse_arm(const Line &line, NodeKind kind) {
        const std::size_t colon = header_colon(line);
        SyntaxNode arm;
        arm.kind = kind;
        arm.children.push_back(expression(line.first + 1, colon, &ExprParser::parse_test));
        arm.children.push_back(parse_body(line, colon));
        return finish(std::move(arm), line.first);
    }

    SyntaxNode parse_else(const Line &line, NodeKind kind) {
        const std::size_t colon = header_colon(line);
        if (colon != line.first + 1)
            throw ExprError("unexpected token before ':'", line.first + 1);
        SyntaxNode arm;
        arm.kind = kind;
        arm.children.push_back(parse_body(line, colon));
        return finish(std::move(arm), line.first);
    }

    SyntaxNode parse_if(const Line &line) {
        SyntaxNode n = parse_arm(line, NodeKind::If);
        const std::size_t begin = line.first;
        while (next_line_starts_with(line.level, "elif"))
            n.children.push_back(parse_arm(lines_[li_], NodeKind::Elif));
        if (next_line_starts_with(line.level, "else"))
            n.children.push_back(parse_else(lines_[li_], NodeKind::Else));
        return finish(std::move(n), begin);
    }

    SyntaxNode parse_loop(const Line &line, std::size_t kw_tok, bool is_for) {
        const std::size_t colon = header_colon(line);
        SyntaxNode n;
        n.kind = is_for ? NodeKind::For : NodeKind::While;
        if (is_for) {
            const std::size_t in_pos = depth_zero_keyword(kw_tok + 1, colon, "in");
            if (in_pos >= colon)
                throw ExprError("expected 'in'", colon);
            n.children.push_back(expression(kw_tok + 1, in_pos, &ExprParser::parse_target_list));
            n.children.push_back(expression(in_pos + 1, colon, &ExprParser::parse_testlist));
        } else {
            n.children.push_back(expression(kw_tok + 1, colon, &ExprParser::parse_test));
        }
        n.children.push_back(parse_body(line, colon));
        if (next_line_starts_with(line.level, "else"))
            n.children.push_back(parse_else(lines_[li_], NodeKind::Else));
        return finish(std::move(n), line.first);
    }

    SyntaxNode parse_try(const Line &line) {
        const std::size_t colon = header_colon(line);
        if (colon != line.first + 1)
            throw ExprError("unexpected token before ':'", line.first + 1);
        SyntaxNode n;
        n.kind = NodeKind::Try;
        n.children.push_back(parse_body(line, colon));
        while (next_line_starts_with(line.level, "except")) {
            const Line h = lines_[li_];
            const std::size_t hcolon = header_colon(h);
            SyntaxNode handler;
            handler.kind = NodeKind::ExceptHandler;
            std::size_t tb = h.first + 1;
            if (is(tb, "*", hcolon))
                ++tb;
            if (tb < hcolon) {
                std::size_t as_pos = hcolon;
                for (std::size_t i = tb; i < hcolon; ++i)
                    if (is(i, "as", hcolon))
                        as_pos = i;
                handler.children.push_back(expression(tb, as_pos, &ExprParser::parse_testlist));
                if (as_pos < hcolon) {
                    if (as_pos + 2 != hcolon || tok(as_pos + 1).cls != TokenClass::Identifier)
                        throw ExprError("bad except target", as_pos + 1);
                    SyntaxNode name = make_node(toks_, NodeKind::Name, as_pos + 1, as_pos + 2);
                    name.label = tok(as_pos + 1).lexeme;
                    handler.children.push_back(std::move(name));
                }
            }
            handler.children.push_back(parse_body(h, hcolon));
            n.children.push_back(finish(std::move(handler), h.first));
        }
        if (next_line_starts_with(line.level, "else"))
            n.children.push_back(parse_else(lines_[li_], NodeKind::TryElse));
        if (next_line_starts_with(line.level, "finally"))
            n.children.push_back(parse_else(lines_[li_], NodeKind::Finally));
        return finish(std::move(n), line.first);
    }

    SyntaxNode parse_with(const Line &line, std::size_t kw_tok) {
        const std::size_t colon = header_colon(line);
        SyntaxNode n;
        n.kind = NodeKind::With;
        std::size_t b = kw_tok + 1;
        std::size_t e = colon;
        if (is(b, "(", e) && matching(b, e + 1) == e - 1) {
            // Parenthesised item list.
            ++b;
            --e;
        }
        int depth = 0;
        std::size_t item_begin = b;
        auto add_item = [&](std::size_t ib, std::size_t ie) {
            SyntaxNode item = make_node(toks_, NodeKind::WithItem, ib, ie);
            std::size_t as_pos = ie;
            int d = 0;
            for (std::size_t i = ib; i < ie; ++i) {
                const Token &t = tok(i);
                if (t.cls == TokenClass::Punctuation && (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{"))
                    ++d;
                else if (t.cls == TokenClass::Punctuation && (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}"))
                    --d;
                else if (d == 0 && is(i, "as", ie))
                    as_pos = i;
            }
            item.children.push_back(expression(ib, as_pos, &ExprParser::parse_test));
            if (as_pos < ie)
                item.children.push_back(expression(as_pos + 1, ie, &ExprParser::parse_target_list));
            n.children.push_back(std::move(item));
        };
        for (std::size_t i = b; i < e; ++i) {
            const Token &t = tok(i);
            if (t.cls == TokenClass::Punctuation) {
                if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                    ++depth;
                else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                    --depth;
                else if (t.lexeme == "," && depth == 0) {
                    add_item(item_begin, i);
                    item_begin = i + 1;
                }
            }
        }
        if (item_begin < e)
            add_item(item_begin, e);
        n.children.push_back(parse_body(line, colon));
        return finish(std::move(n), line.first);
    }

    std::vector<SyntaxNode> simple_statements(std::size_t b, std::size_t e) {
        std::vector<SyntaxNode> out;
        int depth = 0;
        std::size_t start = b;
        for (std::size_t i = b; i <= e; ++i) {
            const bool at_end = i == e;
            if (!at_end) {
                const Token &t = tok(i);
                if (t.cls == TokenClass::Punctuation) {
                    if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                        ++depth;
                    else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                        --depth;
                }
            }
            if (at_end || (depth == 0 && is(i, ";", e))) {
                if (start < i)
                    out.push_back(simple_statement(start, i));
                start = i + 1;
            }
        }
        return out;
    }

    SyntaxNode simple_statement(std::size_t b, std::size_t e) {
        try {
            return simple_statement_impl(b, e);
        } catch (const ExprError &err) {
            if (strict_)
                error_at(err.token, err.what());
            SyntaxNode n = make_node(toks_, NodeKind::Opaque, b, e);
            n.label = tok(b).lexeme;
            return n;
        }
    }

    SyntaxNode keyword_statement(NodeKind kind, std::size_t b, std::size_t e) const {
        return make_node(toks_, kind, b, e);
    }

    SyntaxNode simple_statement_impl(std::size_t b, std::size_t e) {
        const Token &head = tok(b);
        if (head.cls == TokenClass::Keyword) {
            const std::string &kw = head.lexeme;
            if (kw == "pass" || kw == "break" || kw == "continue") {
                if (e != b + 1)
                    throw ExprError("unexpected token", b + 1);
                return keyword_statement(kw == "pass" ? NodeKind::Pass
                                                      : kw == "break" ? NodeKind::Break : NodeKind::Continue,
                                         b, e);
            }
            if (kw == "return") {
                SyntaxNode n = keyword_statement(NodeKind::Return, b, e);
                if (e > b + 1)
                    n.children.push_back(expression(b + 1, e, &ExprParser::parse_testlist));
                return n;
            }
            if (kw == "raise") {
                SyntaxNode n = keyword_statement(NodeKind::Raise, b, e);
                std::size_t from = e;
                for (std::size_t i = b + 1; i < e; ++i)
                    if (is(i, "from", e))
                        from = i;
                if (b + 1 < from)
                    n.children.push_back(expression(b + 1, from, &ExprParser::parse_test));
                if (from < e)
                    n.children.push_back(expression(from + 1, e, &ExprParser::parse_test));
                return n;
            }
            if (kw == "import" || kw == "from") {
                SyntaxNode n = keyword_statement(NodeKind::Import, b, e);
                n.label = kw;
                return n;
            }
            if (kw == "global" || kw == "nonlocal") {
                SyntaxNode n = keyword_statement(NodeKind::Global, b, e);
                n.label = kw;
                return n;
            }
            if (kw == "del") {
                SyntaxNode n = keyword_statement(NodeKind::Delete, b, e);
                n.children.push_back(expression(b + 1, e, &ExprParser::parse_testlist));
                return n;
            }
            if (kw == "assert") {
                SyntaxNode n = keyword_statement(NodeKind::Assert, b, e);
                int depth = 0;
                std::size_t comma = e;
                for (std::size_t i = b + 1; i < e && comma == e; ++i) {
                    const Token &t = tok(i);
                    if (t.cls != TokenClass::Punctuation)
                        continue;
                    if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                        ++depth;
                    else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                        --depth;
                    else if (t.lexeme == "," && depth == 0)
                        comma = i;
                }
                n.children.push_back(expression(b + 1, comma, &ExprParser::parse_test));
                if (comma < e)
                    n.children.push_back(expression(comma + 1, e, &ExprParser::parse_test));
                return n;
            }
        }

        // Assignment forms: scan for depth-0 '=', augmented operators, or an annotation ':'.
        std::vector<std::size_t> eq;
        std::size_t aug = e;
        std::size_t ann = e;
        int depth = 0;
        for (std::size_t i = b; i < e; ++i) {
            const Token &t = tok(i);
            if (t.cls == TokenClass::Punctuation) {
                if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{")
                    ++depth;
                else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}")
                    --depth;
                else if (t.lexeme == ":" && depth == 0 && eq.empty() && ann == e)
                    ann = i;
            } else if (depth == 0 && t.cls == TokenClass::Keyword && t.lexeme == "lambda") {
                break;
            } else if (depth == 0 && t.cls == TokenClass::Operator) {
                if (t.lexeme == "=") {
                    eq.push_back(i);
                } else if (t.lexeme.size() >= 2 && t.lexeme.back() == '=' && t.lexeme != "==" && t.lexeme != "!=" &&
                           t.lexeme != "<=" && t.lexeme != ">=" && aug == e) {
                    aug = i;
                    break;
                }
            }
        }
        if (aug < e) {
            SyntaxNode n = make_node(toks_, NodeKind::AugAssign, b, e);
            n.label = tok(aug).lexeme;
            n.children.push_back(expression(b, aug, &ExprParser::parse_target_list));
            n.children.push_back(expression(aug + 1, e, &ExprParser::parse_testlist));
            return n;
        }
        if (ann < e && (eq.empty() || ann < eq.front())) {
            SyntaxNode n = make_node(toks_, NodeKind::AnnAssign, b, e);
            const std::size_t value_eq = eq.empty() ? e : eq.front();
            n.children.push_back(expression(b, ann, &ExprParser::parse_test));
            n.children.push_back(expression(ann + 1, value_eq, &ExprParser::parse_test));
            if (value_eq < e)
                n.children.push_back(expression(value_eq + 1, e, &ExprParser::parse_testlist));
            return n;
        }
        if (!eq.empty()) {
            SyntaxNode n = make_node(toks_, NodeKind::Assign, b, e);
            std::size_t start = b;
            for (std::size_t pos : eq) {
                n.children.push_back(expression(start, pos, &ExprParser::parse_target_list));
                start = pos + 1;
            }
            n.children.push_back(expression(start, e, &ExprParser::parse_testlist));
            return n;
        }
        SyntaxNode n = make_node(toks_, NodeKind::ExprStmt, b, e);
        n.children.push_back(expression(b, e, &ExprParser::parse_testlist));
        return n;
    }

    const std::vector<Token> &toks_;
    std::vector<Line> lines_;
    bool strict_;
    std::size_t li_ = 0;
};

}  // namespace

SyntaxNode parse_module(const detail::LexedSource &lexed, bool strict) {
    if (lexed.lines.empty()) {
        SyntaxNode module;
        module.kind = NodeKind::Suite;
        return module;
    }
    StatementParser parser(lexed.stream.tokens, assign_levels(lexed.stream.tokens, lexed.lines), strict);
    return parser.parse_module();
}

}  // namespace cogref::source_ir
