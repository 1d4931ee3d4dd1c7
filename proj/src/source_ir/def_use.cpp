#include <map>
#include <optional>

#include "cogref/source_ir/analysis.hpp"

namespace cogref::source_ir {

namespace {

std::string bare_name(const std::string &label) {
    std::size_t i = 0;
    while (i < label.size() && label[i] == '*')
        ++i;
    return label.substr(i);
}

struct Scope {
    const Scope *parent = nullptr;
    std::map<std::string, std::vector<std::size_t>> defs;  // walk order

    std::optional<std::size_t> reaching(const std::string &name, std::size_t use_site) const {
        for (const Scope *s = this; s != nullptr; s = s->parent) {
            auto it = s->defs.find(name);
            if (it == s->defs.end())
                continue;
            for (auto d = it->second.rbegin(); d != it->second.rend(); ++d)
                if (*d < use_site)
                    return *d;
            return std::nullopt;
        }
        return std::nullopt;
    }
};

class DefUseWalker {
public:
    std::vector<DefUsePair> run(const FunctionUnit &fn) {
        Scope scope;
        params(fn.parameters, scope, scope);
        suite(fn.body, scope);
        std::vector<DefUsePair> out;
        for (auto &[name, def, use] : raw_)
            out.push_back({"var_" + std::to_string(ordinal_.at(name)), def, use});
        return out;
    }

private:
    void define(Scope &scope, const std::string &name, std::size_t site) {
        ordinal_.try_emplace(name, ordinal_.size());
        scope.defs[name].push_back(site);
    }

    void use(const Scope &scope, const std::string &name, std::size_t site) {
        if (auto def = scope.reaching(name, site))
            raw_.push_back({name, *def, site});
    }

    // Defaults and annotations are evaluated in the enclosing scope; the
    // names themselves bind in the new one.
    void params(const SyntaxNode &parameters, Scope &outer, Scope &inner) {
        for (const auto &p : parameters.children)
            for (const auto &c : p.children)
                expr(c, outer);
        for (const auto &p : parameters.children) {
            const std::string name = bare_name(p.label);
            if (name.empty() || name == "/")
                continue;
            define(inner, name, p.token_begin + (p.label.front() == '*' ? 1 : 0));
        }
    }

    void suite(const SyntaxNode &s, Scope &scope) {
        for (const auto &stmt : s.children)
            statement(stmt, scope);
    }

    void target(const SyntaxNode &t, Scope &scope) {
        switch (t.kind) {
            case NodeKind::Name:
                define(scope, t.label, t.token_begin);
                break;
            case NodeKind::Tuple:
            case NodeKind::List:
            case NodeKind::Starred:
                for (const auto &c : t.children)
                    target(c, scope);
                break;
            default:
                // subscript / attribute targets read their operands
                for (const auto &c : t.children)
                    expr(c, scope);
                break;
        }
    }

    void statement(const SyntaxNode &s, Scope &scope) {
        switch (s.kind) {
            case NodeKind::Assign:
                expr(s.children.back(), scope);
                for (std::size_t i = 0; i + 1 < s.children.size(); ++i)
                    target(s.children[i], scope);
                break;
            case NodeKind::AugAssign:
                expr(s.children[1], scope);
                expr(s.children[0], scope);
                target(s.children[0], scope);
                break;
            case NodeKind::AnnAssign:
                if (s.children.size() > 2) {
                    expr(s.children[2], scope);
                    target(s.children[0], scope);
                }
                break;
            case NodeKind::For:
                expr(s.children[1], scope);
                target(s.children[0], scope);
                for (std::size_t i = 2; i < s.children.size(); ++i)
                    statement(s.children[i], scope);
                break;
            case NodeKind::ExceptHandler:
                for (const auto &c : s.children) {
                    if (c.kind == NodeKind::Suite)
                        suite(c, scope);
                    else if (&c != &s.children.front() && c.kind == NodeKind::Name)
                        define(scope, c.label, c.token_begin);
                    else
                        expr(c, scope);
                }
                break;
            case NodeKind::WithItem:
                expr(s.children.front(), scope);
                if (s.children.size() > 1)
                    target(s.children[1], scope);
                break;
            case NodeKind::FunctionDef: {
                const SyntaxNode *parameters = s.find_child(NodeKind::Parameters);
                Scope child;
                child.parent = &scope;
                for (const auto &c : s.children)
                    if (c.kind == NodeKind::Decorator)
                        statement(c, scope);
                if (parameters != nullptr) {
                    params(*parameters, scope, child);
                    define(scope, s.label, parameters->token_begin - 2);
                }
                for (const auto &c : s.children)
                    if (c.kind == NodeKind::Suite)
                        suite(c, child);
                break;
            }
            case NodeKind::ClassDef: {
                Scope child;
                child.parent = &scope;
                for (const auto &c : s.children) {
                    if (c.kind == NodeKind::Suite)
                        suite(c, child);
                    else
                        statement(c, scope);
                }
                break;
            }
            case NodeKind::Suite:
                suite(s, scope);
                break;
            default:
                for (const auto &c : s.children) {
                    if (is_statement(c.kind))
                        statement(c, scope);
                    else
                        expr(c, scope);
                }
                break;
        }
    }

    void expr(const SyntaxNode &e, Scope &scope) {
        switch (e.kind) {
            case NodeKind::Name:
                use(scope, e.label, e.token_begin);
                break;
            case NodeKind::NamedExpr:
                expr(e.children[1], scope);
                target(e.children[0], scope);
                break;
            case NodeKind::Lambda: {
                Scope child;
                child.parent = &scope;
                params(e.children[0], scope, child);
                expr(e.children[1], child);
                break;
            }
            case NodeKind::Comprehension: {
                Scope child;
                child.parent = &scope;
                for (std::size_t i = 1; i < e.children.size(); ++i) {
                    const SyntaxNode &c = e.children[i];
                    if (c.kind == NodeKind::CompFor) {
                        // the first iterable is evaluated outside the comprehension scope
                        expr(c.children[1], i == 1 ? scope : child);
                        target(c.children[0], child);
                    } else {
                        expr(c.children[0], child);
                    }
                }
                expr(e.children.front(), child);
                break;
            }
            case NodeKind::IfExp:
                expr(e.children[1], scope);
                expr(e.children[0], scope);
                expr(e.children[2], scope);
                break;
            default:
                for (const auto &c : e.children)
                    expr(c, scope);
                break;
        }
    }

    struct Raw {
        std::string name;
        std::size_t def;
        std::size_t use;
    };
    std::vector<Raw> raw_;
    std::map<std::string, std::size_t> ordinal_;
};

}  // namespace

std::vector<DefUsePair> extract_def_use(const FunctionUnit &fn) { return DefUseWalker().run(fn); }

}  // namespace cogref::source_ir
