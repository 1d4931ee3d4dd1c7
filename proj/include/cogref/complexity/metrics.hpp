#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::complexity {

using source_ir::ConstructKind;
using source_ir::FunctionUnit;

/// Cost per construct kind plus a per-depth surcharge.
struct IcpCostTable {
    std::array<int, 6> cost{1, 1, 1, 1, 1, 1};  // indexed by ConstructKind
    int nesting_surcharge = 0;

    int cost_of(ConstructKind kind) const { return cost[static_cast<std::size_t>(kind)]; }
    void set_cost(ConstructKind kind, int value);  // throws std::invalid_argument on negative
};

int icp(const FunctionUnit &fn, const IcpCostTable &table = {});
int cyclomatic(const FunctionUnit &fn);
int cognitive(const FunctionUnit &fn);

struct FunctionMetrics {
    std::string name;
    int icp = 0;
    int cc = 0;
    int cogc = 0;

    bool operator==(const FunctionMetrics &) const = default;
};

struct MetricTotals {
    int icp = 0;
    int cc = 0;
    int cogc = 0;

    bool operator==(const MetricTotals &) const = default;
};

struct ComplexityReport {
    std::vector<FunctionMetrics> per_function;
    MetricTotals unit_totals;
    // Set when the unit has no functions at all; cc total is then 0 rather than 1.
    bool empty_unit = false;
};

ComplexityReport unit_report(const source_ir::ParsedUnit &parsed, const IcpCostTable &table = {});
/// Parses first; propagates LexError / ParseError.
ComplexityReport unit_report(const source_ir::SourceUnit &unit, const IcpCostTable &table = {});

enum class DeltaClass { Decrease, Increase, NoChange };

DeltaClass delta_class(int before, int after);
std::string_view to_string(DeltaClass d);

}  // namespace cogref::complexity
