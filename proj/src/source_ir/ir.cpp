#include "cogref/source_ir/ir.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "parser.hpp"

namespace cogref::source_ir {


std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Suite: return "Suite";
        case NodeKind::FunctionDef: return "FunctionDef";
        case NodeKind::Parameters: return "Parameters";
        case NodeKind::Param: return "Param";
        case NodeKind::Decorator: return "Decorator";
        case NodeKind::ClassDef: return "ClassDef";
        case NodeKind::If: return "If";
        case NodeKind::Elif: return "Elif";
        case NodeKind::Else: return "Else";
        case NodeKind::For: return "For";
        case NodeKind::While: return "While";
        case NodeKind::Try: return "Try";
        case NodeKind::ExceptHandler: return "ExceptHandler";
        case NodeKind::TryElse: return "TryElse";
        case NodeKind::Finally: return "Finally";
        case NodeKind::With: return "With";
        case NodeKind::WithItem: return "WithItem";
        case NodeKind::OpaqueBlock: return "OpaqueBlock";
        case NodeKind::Return: return "Return";
        case NodeKind::Assign: return "Assign";
        case NodeKind::AugAssign: return "AugAssign";
        case NodeKind::AnnAssign: return "AnnAssign";
        case NodeKind::ExprStmt: return "ExprStmt";
        case NodeKind::Pass: return "Pass";
        case NodeKind::Break: return "Break";
        case NodeKind::Continue: return "Continue";
        case NodeKind::Raise: return "Raise";
        case NodeKind::Import: return "Import";
        case NodeKind::Global: return "Global";
        case NodeKind::Delete: return "Delete";
        case NodeKind::Assert: return "Assert";
        case NodeKind::Opaque: return "Opaque";
        case NodeKind::Name: return "Name";
        case NodeKind::Constant: return "Constant";
        case NodeKind::Number: return "Number";
        case NodeKind::String: return "String";
        case NodeKind::BinOp: return "BinOp";
        case NodeKind::UnaryOp: return "UnaryOp";
        case NodeKind::BoolOp: return "BoolOp";
        case NodeKind::Compare: return "Compare";
        case NodeKind::Call: return "Call";
        case NodeKind::Keyword: return "Keyword";
        case NodeKind::Attribute: return "Attribute";
        case NodeKind::Subscript: return "Subscript";
        case NodeKind::Slice: return "Slice";
        case NodeKind::Tuple: return "Tuple";
        case NodeKind::List: return "List";
        case NodeKind::Dict: return "Dict";
        case NodeKind::Set: return "Set";
        case NodeKind::DictEntry: return "DictEntry";
        case NodeKind::Comprehension: return "Comprehension";
        case NodeKind::CompFor: return "CompFor";
        case NodeKind::CompIf: return "CompIf";
        case NodeKind::Lambda: return "Lambda";
        case NodeKind::IfExp: return "IfExp";
        case NodeKind::Starred: return "Starred";
        case NodeKind::NamedExpr: return "NamedExpr";
        case NodeKind::Await: return "Await";
        case NodeKind::Yield: return "Yield";
    }
    return "Unknown";
}

bool is_statement(NodeKind kind) { return kind <= NodeKind::Opaque; }

const SyntaxNode *SyntaxNode::find_child(NodeKind k) const {
    for (const auto &c : children)
        if (c.kind == k)
            return &c;
    return nullptr;
}

bool is_docstring(const SyntaxNode &stmt, bool first_in_suite) {
    return first_in_suite && stmt.kind == NodeKind::ExprStmt && stmt.children.size() == 1 &&
           stmt.children.front().kind == NodeKind::String;
}

std::string_view to_string(ConstructKind kind) {
    switch (kind) {
        case ConstructKind::BranchIf: return "branch_if";
        case ConstructKind::BranchElif: return "branch_elif";
        case ConstructKind::BranchElse: return "branch_else";
        case ConstructKind::LoopFor: return "loop_for";
        case ConstructKind::LoopWhile: return "loop_while";
        case ConstructKind::ExceptionHandler: return "exception_handler";
    }
    return "unknown";
}

SourceUnit SourceUnit::original(std::string origin_id, std::string text) {
    return {std::move(origin_id), std::move(text), UnitKind::Original};
}

SourceUnit SourceUnit::refactored(std::string origin_id, std::string text) {
    return {std::move(origin_id), std::move(text), UnitKind::Refactored};
}

bool SourceUnit::is_blank() const {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string Signature::to_string() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += params[i].name;
        if (params[i].has_default)
            out += "=...";
    }
    return out + ")";
}

namespace {

const SyntaxNode &suite_of(const SyntaxNode &n) {
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
        if (it->kind == NodeKind::Suite)
            return *it;
    return n;
}

std::vector<Parameter> params_of(const SyntaxNode &parameters) {
    std::vector<Parameter> out;
    for (const auto &p : parameters.children)
        out.push_back({p.label, p.has_default});
    return out;
}

FunctionUnit make_function(const SyntaxNode &def, const std::string &qualifier) {
    FunctionUnit fn;
    fn.name = qualifier.empty() ? def.label : qualifier + "." + def.label;
    if (const SyntaxNode *params = def.find_child(NodeKind::Parameters)) {
        fn.params = params_of(*params);
        fn.parameters = *params;
    } else {
        fn.parameters.kind = NodeKind::Parameters;
    }
    fn.body = suite_of(def);
    fn.body_span = fn.body.span;
    fn.constructs = extract_constructs(fn);
    return fn;
}

Span cover(const std::vector<SyntaxNode> &nodes) {
    Span s{nodes.front().span.begin, nodes.front().span.end};
    for (const auto &n : nodes) {
        s.begin = std::min(s.begin, n.span.begin);
        s.end = std::max(s.end, n.span.end);
    }
    return s;
}

std::vector<FunctionUnit> collect_functions(const SyntaxNode &module) {
    std::vector<FunctionUnit> functions;
    std::vector<SyntaxNode> loose;
    bool has_real_statement = false;
    auto keep_loose = [&](const SyntaxNode &stmt) {
        loose.push_back(stmt);
        if (stmt.kind != NodeKind::Import)
            has_real_statement = true;
    };
    for (std::size_t i = 0; i < module.children.size(); ++i) {
        const SyntaxNode &stmt = module.children[i];
        if (stmt.kind == NodeKind::FunctionDef) {
            functions.push_back(make_function(stmt, {}));
        } else if (stmt.kind == NodeKind::ClassDef) {
            const SyntaxNode &body = suite_of(stmt);
            for (std::size_t j = 0; j < body.children.size(); ++j) {
                const SyntaxNode &member = body.children[j];
                if (member.kind == NodeKind::FunctionDef)
                    functions.push_back(make_function(member, stmt.label));
                else if (!is_docstring(member, j == 0) && member.kind != NodeKind::Pass)
                    keep_loose(member);
            }
        } else if (!is_docstring(stmt, i == 0)) {
            keep_loose(stmt);
        }
    }
    if (has_real_statement) {
        FunctionUnit top;
        top.name = std::string(kSyntheticFunctionName);
        top.is_synthetic_toplevel = true;
        top.parameters.kind = NodeKind::Parameters;
        top.body.kind = NodeKind::Suite;
        top.body.span = cover(loose);
        top.body.token_begin = loose.front().token_begin;
        top.body.token_end = loose.back().token_end;
        top.body.children = std::move(loose);
        top.body_span = top.body.span;
        top.constructs = extract_constructs(top);
        functions.push_back(std::move(top));
    }
    return functions;
}

Span arm_span(const SyntaxNode &n) {
    const SyntaxNode *suite = n.find_child(NodeKind::Suite);
    return {n.span.begin, suite != nullptr ? suite->span.end : n.span.end};
}

void walk_constructs(const std::vector<SyntaxNode> &stmts, int depth, std::vector<ControlConstruct> &out);

void walk_statement(const SyntaxNode &s, int depth, std::vector<ControlConstruct> &out) {
    switch (s.kind) {
        case NodeKind::If:
            out.push_back({ConstructKind::BranchIf, depth, arm_span(s)});
            for (const auto &c : s.children) {
                if (c.kind == NodeKind::Suite) {
                    walk_constructs(c.children, depth + 1, out);
                } else if (c.kind == NodeKind::Elif) {
                    out.push_back({ConstructKind::BranchElif, depth, arm_span(c)});
                    walk_constructs(suite_of(c).children, depth + 1, out);
                } else if (c.kind == NodeKind::Else) {
                    out.push_back({ConstructKind::BranchElse, depth, c.span});
                    walk_constructs(suite_of(c).children, depth + 1, out);
                }
            }
            break;
        case NodeKind::For:
        case NodeKind::While:
            out.push_back({s.kind == NodeKind::For ? ConstructKind::LoopFor : ConstructKind::LoopWhile, depth,
                           arm_span(s)});
            for (const auto &c : s.children) {
                if (c.kind == NodeKind::Suite) {
                    walk_constructs(c.children, depth + 1, out);
                } else if (c.kind == NodeKind::Else) {
                    out.push_back({ConstructKind::BranchElse, depth, c.span});
                    walk_constructs(suite_of(c).children, depth + 1, out);
                }
            }
            break;
        case NodeKind::Try:
            for (const auto &c : s.children) {
                if (c.kind == NodeKind::Suite) {
                    walk_constructs(c.children, depth, out);
                } else if (c.kind == NodeKind::ExceptHandler) {
                    out.push_back({ConstructKind::ExceptionHandler, depth, c.span});
                    walk_constructs(suite_of(c).children, depth + 1, out);
                } else {
                    walk_constructs(suite_of(c).children, depth, out);
                }
            }
            break;
        case NodeKind::FunctionDef:
        case NodeKind::ClassDef:
        case NodeKind::With:
        case NodeKind::OpaqueBlock:
        case NodeKind::Suite:
            if (s.kind == NodeKind::Suite)
                walk_constructs(s.children, depth, out);
            else
                walk_constructs(suite_of(s).children, depth, out);
            break;
        default:
            break;
    }
}

void walk_constructs(const std::vector<SyntaxNode> &stmts, int depth, std::vector<ControlConstruct> &out) {
    for (const auto &s : stmts)
        walk_statement(s, depth, out);
}

void collect_docstrings(const SyntaxNode &n, std::set<std::size_t> &out) {
    const bool owns_docstring =
        n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef;
    if (owns_docstring) {
        const SyntaxNode &suite = suite_of(n);
        if (!suite.children.empty() && is_docstring(suite.children.front(), true)) {
            const SyntaxNode &str = suite.children.front().children.front();
            for (std::size_t t = str.token_begin; t < str.token_end; ++t)
                out.insert(t);
        }
    }
    for (const auto &c : n.children)
        collect_docstrings(c, out);
}

}  // namespace

ParsedUnit parse_unit(const SourceUnit &unit, ParseOptions options) {
    detail::LexedSource lexed = detail::lex(unit.text);
    ParsedUnit out;
    out.unit = unit;
    out.module = parse_module(lexed, options.strict);
    out.tokens = std::move(lexed.stream);
    out.functions = collect_functions(out.module);
    return out;
}

std::vector<FunctionUnit> parse_functions(const SourceUnit &unit) { return parse_unit(unit).functions; }

std::vector<ControlConstruct> extract_constructs(const FunctionUnit &fn) {
    std::vector<ControlConstruct> out;
    walk_constructs(fn.body.children, 0, out);
    return out;
}

Signature extract_signature(const FunctionUnit &fn) { return {fn.name, fn.params}; }

std::vector<std::size_t> docstring_tokens(const ParsedUnit &parsed) {
    std::set<std::size_t> found;
    const auto &top = parsed.module.children;
    if (!top.empty() && is_docstring(top.front(), true)) {
        const SyntaxNode &str = top.front().children.front();
        for (std::size_t t = str.token_begin; t < str.token_end; ++t)
            found.insert(t);
    }
    collect_docstrings(parsed.module, found);
    return {found.begin(), found.end()};
}

std::vector<std::size_t> non_docstring_string_tokens(const ParsedUnit &parsed) {
    const std::vector<std::size_t> doc = docstring_tokens(parsed);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parsed.tokens.tokens.size(); ++i) {
        if (parsed.tokens.tokens[i].cls == TokenClass::String && !std::binary_search(doc.begin(), doc.end(), i))
            out.push_back(i);
    }
    return out;
}

}  // namespace cogref::source_ir
