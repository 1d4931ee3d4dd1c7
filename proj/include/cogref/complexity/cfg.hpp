#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::complexity {

class InvalidGraph : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Directed multigraph; node 0 is entry, node 1 is exit.
struct ControlFlowGraph {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edge_list;
    std::size_t components = 0;  // weakly connected

    std::size_t edges() const noexcept { return edge_list.size(); }
};

/// Structured translation of the function body, independent of the
/// construct list.
ControlFlowGraph build_cfg(const source_ir::FunctionUnit &fn);

/// Weakly connected component count of an arbitrary edge list.
std::size_t count_components(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>> &edges);

/// E - N + 2P; throws InvalidGraph when E < N - P.
long cyclomatic_via_cfg(const ControlFlowGraph &g);

}  // namespace cogref::complexity
