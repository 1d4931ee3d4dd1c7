#include "expr_parser.hpp"

#include <utility>

namespace cogref::source_ir::detail {

SyntaxNode make_node(const std::vector<Token> &toks, NodeKind kind, std::size_t begin, std::size_t end) {
    SyntaxNode n;
    n.kind = kind;
    n.token_begin = begin;
    n.token_end = end;
    if (begin < end && end <= toks.size()) {
        n.span.begin = toks[begin].offset;
        n.span.end = toks[end - 1].offset + toks[end - 1].lexeme.size();
    } else if (begin < toks.size()) {
        n.span.begin = n.span.end = toks[begin].offset;
    }
    return n;
}

ExprParser::ExprParser(const std::vector<Token> &toks, std::size_t begin, std::size_t end)
    : toks_(toks), pos_(begin), end_(end) {}

const Token *ExprParser::peek(std::size_t ahead) const {
    return pos_ + ahead < end_ ? &toks_[pos_ + ahead] : nullptr;
}

bool ExprParser::check(std::string_view lexeme, std::size_t ahead) const {
    const Token *t = peek(ahead);
    return t != nullptr && t->cls != TokenClass::String && t->lexeme == lexeme;
}

bool ExprParser::check_cls(TokenClass cls, std::size_t ahead) const {
    const Token *t = peek(ahead);
    return t != nullptr && t->cls == cls;
}

bool ExprParser::accept(std::string_view lexeme) {
    if (!check(lexeme))
        return false;
    ++pos_;
    return true;
}

void ExprParser::expect(std::string_view lexeme) {
    if (!accept(lexeme))
        fail("unexpected token");
}

void ExprParser::fail(const char *what) const { throw ExprError(what, pos_); }

void ExprParser::expect_end() const {
    if (!at_end())
        fail("trailing tokens after expression");
}

SyntaxNode ExprParser::node(NodeKind kind, std::size_t begin, std::vector<SyntaxNode> children,
                            std::string label) const {
    SyntaxNode n = make_node(toks_, kind, begin, pos_);
    n.children = std::move(children);
    n.label = std::move(label);
    return n;
}

SyntaxNode ExprParser::parse_testlist() {
    const std::size_t begin = pos_;
    std::vector<SyntaxNode> items;
    items.push_back(star_or_test());
    bool comma = false;
    while (accept(",")) {
        comma = true;
        if (at_end())
            break;
        items.push_back(star_or_test());
    }
    expect_end();
    if (!comma)
        return std::move(items.front());
    return node(NodeKind::Tuple, begin, std::move(items));
}

SyntaxNode ExprParser::parse_test() {
    SyntaxNode n = namedexpr_test();
    expect_end();
    return n;
}

SyntaxNode ExprParser::parse_target_list() {
    SyntaxNode n = target_list_until_in();
    expect_end();
    return n;
}

SyntaxNode ExprParser::parse_parameters(bool allow_annotations) {
    SyntaxNode n = param_list({}, allow_annotations);
    expect_end();
    return n;
}

SyntaxNode ExprParser::star_or_test() {
    const std::size_t begin = pos_;
    if (accept("*")) {
        SyntaxNode inner = expr();
        return node(NodeKind::Starred, begin, {std::move(inner)}, "*");
    }
    return namedexpr_test();
}

SyntaxNode ExprParser::namedexpr_test() {
    const std::size_t begin = pos_;
    SyntaxNode lhs = test();
    if (check(":=")) {
        if (lhs.kind != NodeKind::Name)
            fail("invalid assignment expression target");
        ++pos_;
        SyntaxNode rhs = test();
        return node(NodeKind::NamedExpr, begin, {std::move(lhs), std::move(rhs)}, ":=");
    }
    return lhs;
}

SyntaxNode ExprParser::test() {
    if (check("lambda"))
        return lambda_def();
    const std::size_t begin = pos_;
    SyntaxNode body = or_test();
    if (check("if")) {
        ++pos_;
        SyntaxNode cond = or_test();
        expect("else");
        SyntaxNode orelse = test();
        return node(NodeKind::IfExp, begin, {std::move(body), std::move(cond), std::move(orelse)});
    }
    return body;
}

SyntaxNode ExprParser::lambda_def() {
    const std::size_t begin = pos_;
    expect("lambda");
    SyntaxNode params = param_list(":", false);
    expect(":");
    SyntaxNode body = test();
    return node(NodeKind::Lambda, begin, {std::move(params), std::move(body)});
}

SyntaxNode ExprParser::param_list(std::string_view close, bool allow_annotations) {
    const std::size_t begin = pos_;
    std::vector<SyntaxNode> params;
    auto at_close = [&] { return close.empty() ? at_end() : (at_end() || check(close)); };
    while (!at_close()) {
        const std::size_t pbegin = pos_;
        std::string name;
        std::vector<SyntaxNode> children;
        bool has_default = false;
        if (accept("/")) {
            name = "/";
        } else if (accept("*")) {
            name = "*";
            if (check_cls(TokenClass::Identifier)) {
                name += peek()->lexeme;
                ++pos_;
            }
        } else if (accept("**")) {
            if (!check_cls(TokenClass::Identifier))
                fail("expected parameter name");
            name = "**" + peek()->lexeme;
            ++pos_;
        } else if (check_cls(TokenClass::Identifier)) {
            name = peek()->lexeme;
            ++pos_;
        } else {
            fail("expected parameter");
        }
        if (allow_annotations && name != "/" && name != "*" && accept(":"))
            children.push_back(test());
        if (accept("=")) {
            has_default = true;
            children.push_back(test());
        }
        SyntaxNode p = node(NodeKind::Param, pbegin, std::move(children), std::move(name));
        p.has_default = has_default;
        params.push_back(std::move(p));
        if (!accept(","))
            break;
    }
    return node(NodeKind::Parameters, begin, std::move(params));
}

SyntaxNode ExprParser::or_test() {
    const std::size_t begin = pos_;
    SyntaxNode lhs = and_test();
    if (!check("or"))
        return lhs;
    std::vector<SyntaxNode> operands;
    operands.push_back(std::move(lhs));
    while (accept("or"))
        operands.push_back(and_test());
    return node(NodeKind::BoolOp, begin, std::move(operands), "or");
}

SyntaxNode ExprParser::and_test() {
    const std::size_t begin = pos_;
    SyntaxNode lhs = not_test();
    if (!check("and"))
        return lhs;
    std::vector<SyntaxNode> operands;
    operands.push_back(std::move(lhs));
    while (accept("and"))
        operands.push_back(not_test());
    return node(NodeKind::BoolOp, begin, std::move(operands), "and");
}

SyntaxNode ExprParser::not_test() {
    const std::size_t begin = pos_;
    if (accept("not")) {
        SyntaxNode operand = not_test();
        return node(NodeKind::UnaryOp, begin, {std::move(operand)}, "not");
    }
    return comparison();
}

SyntaxNode ExprParser::comparison() {
    const std::size_t begin = pos_;
    SyntaxNode lhs = bit_or();
    std::vector<SyntaxNode> operands;
    std::string ops;
    operands.push_back(std::move(lhs));
    while (true) {
        std::string op;
        if (check("<") || check(">") || check("==") || check(">=") || check("<=") || check("!=") || check("in")) {
            op = peek()->lexeme;
            ++pos_;
        } else if (check("not") && check("in", 1)) {
            op = "not in";
            pos_ += 2;
        } else if (check("is")) {
            ++pos_;
            op = accept("not") ? "is not" : "is";
        } else {
            break;
        }
        if (!ops.empty())
            ops += ' ';
        ops += op;
        operands.push_back(bit_or());
    }
    if (operands.size() == 1)
        return std::move(operands.front());
    return node(NodeKind::Compare, begin, std::move(operands), std::move(ops));
}

#define COGREF_BINARY_LEVEL(fn, next, ...)                                              \
    SyntaxNode ExprParser::fn() {                                                       \
        const std::size_t begin = pos_;                                                 \
        SyntaxNode lhs = next();                                                        \
        for (;;) {                                                                      \
            std::string op;                                                             \
            for (std::string_view cand : {__VA_ARGS__}) {                               \
                if (check(cand)) {                                                      \
                    op = std::string(cand);                                             \
                    break;                                                              \
                }                                                                       \
            }                                                                           \
            if (op.empty())                                                             \
                return lhs;                                                             \
            ++pos_;                                                                     \
            SyntaxNode rhs = next();                                                    \
            lhs = node(NodeKind::BinOp, begin, {std::move(lhs), std::move(rhs)}, op);   \
        }                                                                               \
    }

COGREF_BINARY_LEVEL(bit_or, bit_xor, "|")
COGREF_BINARY_LEVEL(bit_xor, bit_and, "^")
COGREF_BINARY_LEVEL(bit_and, shift_expr, "&")
COGREF_BINARY_LEVEL(shift_expr, arith_expr, "<<", ">>")
COGREF_BINARY_LEVEL(arith_expr, term, "+", "-")
COGREF_BINARY_LEVEL(term, factor, "*", "/", "//", "%", "@")

#undef COGREF_BINARY_LEVEL

SyntaxNode ExprParser::expr() { return bit_or(); }

SyntaxNode ExprParser::factor() {
    const std::size_t begin = pos_;
    if (check("+") || check("-") || check("~")) {
        std::string op = peek()->lexeme;
        ++pos_;
        SyntaxNode operand = factor();
        return node(NodeKind::UnaryOp, begin, {std::move(operand)}, std::move(op));
    }
    return power();
}

SyntaxNode ExprParser::power() {
    const std::size_t begin = pos_;
    SyntaxNode base = await_primary();
    if (accept("**")) {
        SyntaxNode exponent = factor();
        return node(NodeKind::BinOp, begin, {std::move(base), std::move(exponent)}, "**");
    }
    return base;
}

SyntaxNode ExprParser::await_primary() {
    const std::size_t begin = pos_;
    if (check_cls(TokenClass::Keyword) && peek()->lexeme == "await") {
        ++pos_;
        SyntaxNode inner = atom_expr();
        return node(NodeKind::Await, begin, {std::move(inner)});
    }
    return atom_expr();
}

SyntaxNode ExprParser::atom_expr() {
    const std::size_t begin = pos_;
    SyntaxNode value = atom();
    for (;;) {
        if (accept("(")) {
            std::vector<SyntaxNode> children;
            children.push_back(std::move(value));
            call_arguments(children);
            expect(")");
            value = node(NodeKind::Call, begin, std::move(children));
        } else if (accept("[")) {
            SyntaxNode index = subscript_list();
            expect("]");
            value = node(NodeKind::Subscript, begin, {std::move(value), std::move(index)});
        } else if (check(".")) {
            ++pos_;
            if (!check_cls(TokenClass::Identifier) && !check_cls(TokenClass::Keyword))
                fail("expected attribute name");
            std::string attr = peek()->lexeme;
            ++pos_;
            value = node(NodeKind::Attribute, begin, {std::move(value)}, std::move(attr));
        } else {
            return value;
        }
    }
}

void ExprParser::call_arguments(std::vector<SyntaxNode> &args) {
    while (!check(")")) {
        const std::size_t begin = pos_;
        if (accept("**")) {
            SyntaxNode v = test();
            args.push_back(node(NodeKind::Starred, begin, {std::move(v)}, "**"));
        } else if (accept("*")) {
            SyntaxNode v = test();
            args.push_back(node(NodeKind::Starred, begin, {std::move(v)}, "*"));
        } else if (check_cls(TokenClass::Identifier) && check("=", 1)) {
            std::string name = peek()->lexeme;
            pos_ += 2;
            SyntaxNode v = test();
            args.push_back(node(NodeKind::Keyword, begin, {std::move(v)}, std::move(name)));
        } else {
            SyntaxNode v = namedexpr_test();
            if (check("for") || (check("async") && check("for", 1)))
                v = comprehension_tail(begin, std::move(v), ")", "()");
            args.push_back(std::move(v));
        }
        if (!accept(","))
            break;
    }
    if (at_end())
        fail("unterminated call");
}

SyntaxNode ExprParser::subscript_list() {
    const std::size_t begin = pos_;
    std::vector<SyntaxNode> items;
    items.push_back(subscript());
    bool comma = false;
    while (accept(",")) {
        comma = true;
        if (check("]"))
            break;
        items.push_back(subscript());
    }
    if (!comma)
        return std::move(items.front());
    return node(NodeKind::Tuple, begin, std::move(items));
}

SyntaxNode ExprParser::subscript() {
    const std::size_t begin = pos_;
    std::vector<SyntaxNode> parts;
    if (!check(":")) {
        SyntaxNode first = star_or_test();
        if (!check(":"))
            return first;
        parts.push_back(std::move(first));
    }
    expect(":");
    std::string shape = parts.empty() ? ":" : "l:";
    if (!check(":") && !check("]") && !check(",")) {
        parts.push_back(test());
        shape += "u";
    }
    if (accept(":")) {
        shape += ":";
        if (!check("]") && !check(",")) {
            parts.push_back(test());
            shape += "s";
        }
    }
    return node(NodeKind::Slice, begin, std::move(parts), std::move(shape));
}

SyntaxNode ExprParser::target_list_until_in() {
    const std::size_t begin = pos_;
    std::vector<SyntaxNode> items;
    auto one = [&] {
        const std::size_t b = pos_;
        if (accept("*")) {
            SyntaxNode inner = expr();
            return node(NodeKind::Starred, b, {std::move(inner)}, "*");
        }
        return expr();
    };
    items.push_back(one());
    bool comma = false;
    while (accept(",")) {
        comma = true;
        if (at_end() || check("in") || check("="))
            break;
        items.push_back(one());
    }
    if (!comma)
        return std::move(items.front());
    return node(NodeKind::Tuple, begin, std::move(items));
}

SyntaxNode ExprParser::comprehension_tail(std::size_t begin, SyntaxNode element, std::string_view close,
                                          const char *label) {
    std::vector<SyntaxNode> children;
    children.push_back(std::move(element));
    while (check("for") || (check("async") && check("for", 1))) {
        const std::size_t fbegin = pos_;
        accept("async");
        expect("for");
        SyntaxNode target = target_list_until_in();
        expect("in");
        SyntaxNode iter = or_test();
        children.push_back(node(NodeKind::CompFor, fbegin, {std::move(target), std::move(iter)}));
        while (check("if")) {
            const std::size_t ibegin = pos_;
            ++pos_;
            SyntaxNode cond = check("lambda") ? lambda_def() : or_test();
            children.push_back(node(NodeKind::CompIf, ibegin, {std::move(cond)}));
        }
    }
    if (!close.empty() && !check(close))
        fail("unterminated comprehension");
    return node(NodeKind::Comprehension, begin, std::move(children), label);
}

SyntaxNode ExprParser::enclosure(std::string_view close, NodeKind seq_kind, const char *comp_label) {
    const std::size_t begin = pos_;
    ++pos_;  // opening bracket
    if (accept(close))
        return node(seq_kind, begin);
    if (seq_kind == NodeKind::Tuple && check("yield")) {
        SyntaxNode y = yield_expr();
        expect(close);
        return y;
    }
    SyntaxNode first = star_or_test();
    if (check("for") || (check("async") && check("for", 1))) {
        SyntaxNode comp = comprehension_tail(begin, std::move(first), close, comp_label);
        expect(close);
        comp.token_end = pos_;
        comp.span = make_node(toks_, comp.kind, begin, pos_).span;
        return comp;
    }
    if (seq_kind == NodeKind::Tuple && accept(close))
        return first;  // parenthesised expression
    std::vector<SyntaxNode> items;
    items.push_back(std::move(first));
    while (accept(",")) {
        if (check(close))
            break;
        items.push_back(star_or_test());
    }
    expect(close);
    return node(seq_kind, begin, std::move(items));
}

SyntaxNode ExprParser::brace_display() {
    const std::size_t begin = pos_;
    ++pos_;  // {
    if (accept("}"))
        return node(NodeKind::Dict, begin);
    auto entry = [&]() -> SyntaxNode {
        const std::size_t b = pos_;
        if (accept("**")) {
            SyntaxNode v = bit_or();
            return node(NodeKind::Starred, b, {std::move(v)}, "**");
        }
        SyntaxNode k = test();
        expect(":");
        SyntaxNode v = test();
        return node(NodeKind::DictEntry, b, {std::move(k), std::move(v)});
    };
    // Decide dict vs set from the first item.
    const std::size_t save = pos_;
    bool is_dict = check("**");
    if (!is_dict) {
        star_or_test();
        is_dict = check(":");
    }
    pos_ = save;
    if (is_dict) {
        SyntaxNode first = entry();
        if (check("for") || (check("async") && check("for", 1))) {
            SyntaxNode comp = comprehension_tail(begin, std::move(first), "}", "{:}");
            expect("}");
            comp.token_end = pos_;
            comp.span = make_node(toks_, comp.kind, begin, pos_).span;
            return comp;
        }
        std::vector<SyntaxNode> items;
        items.push_back(std::move(first));
        while (accept(",")) {
            if (check("}"))
                break;
            items.push_back(entry());
        }
        expect("}");
        return node(NodeKind::Dict, begin, std::move(items));
    }
    pos_ = begin;
    return enclosure("}", NodeKind::Set, "{}");
}

SyntaxNode ExprParser::yield_expr() {
    const std::size_t begin = pos_;
    expect("yield");
    std::vector<SyntaxNode> children;
    std::string label = "yield";
    if (accept("from")) {
        label = "yield from";
        children.push_back(test());
    } else if (!at_end() && !check(")") && !check("=")) {
        const std::size_t lbegin = pos_;
        std::vector<SyntaxNode> items;
        items.push_back(star_or_test());
        bool comma = false;
        while (accept(",")) {
            comma = true;
            if (at_end() || check(")"))
                break;
            items.push_back(star_or_test());
        }
        if (comma)
            children.push_back(node(NodeKind::Tuple, lbegin, std::move(items)));
        else
            children.push_back(std::move(items.front()));
    }
    return node(NodeKind::Yield, begin, std::move(children), std::move(label));
}

SyntaxNode ExprParser::atom() {
    const Token *t = peek();
    if (t == nullptr)
        fail("unexpected end of expression");
    const std::size_t begin = pos_;
    switch (t->cls) {
        case TokenClass::Identifier:
            ++pos_;
            return node(NodeKind::Name, begin, {}, t->lexeme);
        case TokenClass::Number:
            ++pos_;
            return node(NodeKind::Number, begin, {}, t->lexeme);
        case TokenClass::String: {
            while (check_cls(TokenClass::String))
                ++pos_;
            return node(NodeKind::String, begin, {}, t->lexeme);
        }
        case TokenClass::Keyword:
            if (t->lexeme == "True" || t->lexeme == "False" || t->lexeme == "None") {
                ++pos_;
                return node(NodeKind::Constant, begin, {}, t->lexeme);
            }
            if (t->lexeme == "yield")
                return yield_expr();
            fail("unexpected keyword in expression");
        case TokenClass::Punctuation:
            if (t->lexeme == "(")
                return enclosure(")", NodeKind::Tuple, "()");
            if (t->lexeme == "[")
                return enclosure("]", NodeKind::List, "[]");
            if (t->lexeme == "{")
                return brace_display();
            if (t->lexeme == "...") {
                ++pos_;
                return node(NodeKind::Constant, begin, {}, "...");
            }
            fail("unexpected punctuation in expression");
        case TokenClass::Operator:
            fail("unexpected operator in expression");
    }
    fail("unexpected token");
}

}  // namespace cogref::source_ir::detail
