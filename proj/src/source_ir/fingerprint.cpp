#include <algorithm>

#include "cogref/source_ir/analysis.hpp"

namespace cogref::source_ir {

namespace {

std::string node_label(const SyntaxNode &n) {
    std::string out(to_string(n.kind));
    switch (n.kind) {
        case NodeKind::BinOp:
        case NodeKind::UnaryOp:
        case NodeKind::BoolOp:
        case NodeKind::Compare:
        case NodeKind::AugAssign:
        case NodeKind::Constant:
            out += ':';
            out += n.label;
            break;
        default:
            break;
    }
    return out;
}

bool is_suite_owner(NodeKind k) { return k == NodeKind::FunctionDef || k == NodeKind::ClassDef; }

// Docstrings of def/class bodies are invisible to every enclosing fingerprint.
std::string shape(const SyntaxNode &node, int levels, bool owned_suite) {
    std::string out = node_label(node);
    const bool drop_first = owned_suite && node.kind == NodeKind::Suite && !node.children.empty() &&
                            is_docstring(node.children.front(), true);
    const std::size_t first = drop_first ? 1 : 0;
    if (levels <= 1 || node.children.size() <= first)
        return out;
    out += '(';
    for (std::size_t i = first; i < node.children.size(); ++i) {
        if (i > first)
            out += ' ';
        out += shape(node.children[i], levels - 1, is_suite_owner(node.kind));
    }
    out += ')';
    return out;
}

void collect(const SyntaxNode &n, bool skip_docstring, SubtreeMultiset &out) {
    const bool drop_first = skip_docstring && n.kind == NodeKind::Suite && !n.children.empty() &&
                            is_docstring(n.children.front(), true);
    ++out[shape(n, kFingerprintLevels, skip_docstring)];
    for (std::size_t i = drop_first ? 1 : 0; i < n.children.size(); ++i)
        collect(n.children[i], is_suite_owner(n.kind), out);
}

void collect_children(const SyntaxNode &root, SubtreeMultiset &out) {
    const bool drop_first = !root.children.empty() && is_docstring(root.children.front(), true);
    for (std::size_t i = drop_first ? 1 : 0; i < root.children.size(); ++i)
        collect(root.children[i], false, out);
}

}  // namespace

std::string fingerprint(const SyntaxNode &node, int levels) { return shape(node, levels, false); }

SubtreeMultiset subtree_multiset(const FunctionUnit &fn) {
    SubtreeMultiset out;
    if (!fn.parameters.children.empty())
        collect(fn.parameters, false, out);
    if (fn.is_synthetic_toplevel) {
        for (const auto &stmt : fn.body.children)
            collect(stmt, false, out);
    } else {
        collect_children(fn.body, out);
    }
    return out;
}

SubtreeMultiset subtree_multiset(const ParsedUnit &unit) {
    SubtreeMultiset out;
    collect_children(unit.module, out);
    return out;
}

std::size_t multiset_size(const SubtreeMultiset &set) {
    std::size_t n = 0;
    for (const auto &[key, count] : set)
        n += count;
    return n;
}

std::size_t multiset_intersection_size(const SubtreeMultiset &a, const SubtreeMultiset &b) {
    std::size_t n = 0;
    for (const auto &[key, count] : a) {
        auto it = b.find(key);
        if (it != b.end())
            n += std::min(count, it->second);
    }
    return n;
}

}  // namespace cogref::source_ir
