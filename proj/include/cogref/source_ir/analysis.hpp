#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::source_ir {

/// A definition reaching a later read of the same variable inside one
/// function scope. `variable` is position-normalised ("var_0", "var_1", ...
/// in order of first appearance) so renaming leaves the pair set unchanged.
struct DefUsePair {
    std::string variable;
    std::size_t def_site = 0;  // token index
    std::size_t use_site = 0;  // token index

    bool operator==(const DefUsePair &) const = default;
    auto operator<=>(const DefUsePair &) const = default;
};

std::vector<DefUsePair> extract_def_use(const FunctionUnit &fn);

/// Multiset of structural fingerprints: one entry per syntax node, describing
/// the node and its descendants up to kFingerprintLevels levels deep, with
/// identifiers and literal values replaced by their node kind. Docstrings of
/// module, def and class bodies are left out everywhere.
using SubtreeMultiset = std::map<std::string, std::size_t>;

inline constexpr int kFingerprintLevels = 3;

std::string fingerprint(const SyntaxNode &node, int levels = kFingerprintLevels);

SubtreeMultiset subtree_multiset(const FunctionUnit &fn);
SubtreeMultiset subtree_multiset(const ParsedUnit &unit);

std::size_t multiset_size(const SubtreeMultiset &set);
std::size_t multiset_intersection_size(const SubtreeMultiset &a, const SubtreeMultiset &b);

}  // namespace cogref::source_ir
