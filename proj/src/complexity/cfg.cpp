#include "cogref/complexity/cfg.hpp"

#include <numeric>

namespace cogref::complexity {

using source_ir::NodeKind;
using source_ir::SyntaxNode;

namespace {

constexpr std::size_t kEntry = 0;
constexpr std::size_t kExit = 1;

class CfgBuilder {
public:
    ControlFlowGraph build(const SyntaxNode &body) {
        g_.nodes = 2;
        std::vector<std::size_t> pending{kEntry};
        pending = suite(body, std::move(pending));
        connect(pending, kExit);
        g_.components = count_components(g_.nodes, g_.edge_list);
        return std::move(g_);
    }

private:
    struct Loop {
        std::size_t header;
        std::vector<std::size_t> breaks;
    };

    std::size_t add_node() { return g_.nodes++; }

    void edge(std::size_t from, std::size_t to) { g_.edge_list.emplace_back(from, to); }

    // Code after return/break has no predecessor; give it a stub so every
    // node still has exactly one way in.
    void connect(const std::vector<std::size_t> &pending, std::size_t to) {
        if (pending.empty() && to != kExit) {
            edge(add_node(), to);
            return;
        }
        for (std::size_t p : pending)
            edge(p, to);
    }

    static const SyntaxNode *suite_child(const SyntaxNode &n) {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
            if (it->kind == NodeKind::Suite)
                return &*it;
        return nullptr;
    }

    std::vector<std::size_t> suite(const SyntaxNode &s, std::vector<std::size_t> pending) {
        for (const auto &stmt : s.children)
            pending = statement(stmt, std::move(pending));
        return pending;
    }

    std::vector<std::size_t> branch_body(std::size_t decision, const SyntaxNode &arm) {
        const std::size_t b = add_node();
        edge(decision, b);
        return suite(*suite_child(arm), {b});
    }

    std::vector<std::size_t> statement(const SyntaxNode &s, std::vector<std::size_t> pending) {
        switch (s.kind) {
            case NodeKind::If: {
                std::size_t d = add_node();
                connect(pending, d);
                std::vector<std::size_t> out = branch_body(d, s);
                bool has_else = false;
                for (const auto &c : s.children) {
                    if (c.kind == NodeKind::Elif) {
                        const std::size_t next = add_node();
                        edge(d, next);
                        d = next;
                        auto arm = branch_body(d, c);
                        out.insert(out.end(), arm.begin(), arm.end());
                    } else if (c.kind == NodeKind::Else) {
                        has_else = true;
                        auto arm = branch_body(d, c);
                        out.insert(out.end(), arm.begin(), arm.end());
                    }
                }
                if (!has_else)
                    out.push_back(d);
                return out;
            }
            case NodeKind::For:
            case NodeKind::While: {
                const std::size_t h = add_node();
                connect(pending, h);
                loops_.push_back({h, {}});
                const SyntaxNode *body = nullptr;
                const SyntaxNode *orelse = nullptr;
                for (const auto &c : s.children) {
                    if (c.kind == NodeKind::Suite)
                        body = &c;
                    else if (c.kind == NodeKind::Else)
                        orelse = &c;
                }
                const std::size_t b = add_node();
                edge(h, b);
                connect(suite(*body, {b}), h);
                std::vector<std::size_t> breaks = std::move(loops_.back().breaks);
                loops_.pop_back();
                std::vector<std::size_t> out;
                if (orelse != nullptr)
                    out = branch_body(h, *orelse);
                else
                    out.push_back(h);
                out.insert(out.end(), breaks.begin(), breaks.end());
                return out;
            }
            case NodeKind::Try: {
                const std::size_t t = add_node();
                connect(pending, t);
                std::vector<std::size_t> out;
                std::vector<std::size_t> normal;
                for (const auto &c : s.children) {
                    if (c.kind == NodeKind::Suite) {
                        normal = suite(c, {t});
                    } else if (c.kind == NodeKind::ExceptHandler) {
                        auto arm = branch_body(t, c);
                        out.insert(out.end(), arm.begin(), arm.end());
                    } else if (c.kind == NodeKind::TryElse) {
                        normal = suite(*suite_child(c), std::move(normal));
                    }
                }
                out.insert(out.end(), normal.begin(), normal.end());
                if (const SyntaxNode *fin = s.find_child(NodeKind::Finally))
                    out = suite(*suite_child(*fin), std::move(out));
                return out;
            }
            case NodeKind::Return:
            case NodeKind::Raise:
                connect(pending, kExit);
                return {};
            case NodeKind::Break:
                if (loops_.empty())
                    return pending;
                loops_.back().breaks.insert(loops_.back().breaks.end(), pending.begin(), pending.end());
                return {};
            case NodeKind::Continue:
                if (loops_.empty())
                    return pending;
                connect(pending, loops_.back().header);
                return {};
            case NodeKind::FunctionDef:
            case NodeKind::ClassDef: {
                // the nested body is its own subgraph hanging off a fresh start node
                std::vector<Loop> saved = std::move(loops_);
                loops_.clear();
                const std::size_t start = add_node();
                connect(suite(*suite_child(s), {start}), kExit);
                loops_ = std::move(saved);
                return pending;
            }
            case NodeKind::With:
            case NodeKind::OpaqueBlock:
                return suite(*suite_child(s), std::move(pending));
            case NodeKind::Suite:
                return suite(s, std::move(pending));
            default:
                return pending;
        }
    }

    ControlFlowGraph g_;
    std::vector<Loop> loops_;
};

}  // namespace

std::size_t count_components(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    std::vector<std::size_t> parent(nodes);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t components = nodes;
    for (const auto &[a, b] : edges) {
        const std::size_t ra = find(a);
        const std::size_t rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components;
}

ControlFlowGraph build_cfg(const source_ir::FunctionUnit &fn) { return CfgBuilder().build(fn.body); }

long cyclomatic_via_cfg(const ControlFlowGraph &g) {
    const long n = static_cast<long>(g.nodes);
    const long e = static_cast<long>(g.edges());
    const long p = static_cast<long>(g.components);
    if (p < 1 || e < n - p)
        throw InvalidGraph("graph has fewer edges than its component count allows");
    return e - n + 2 * p;
}

}  // namespace cogref::complexity
