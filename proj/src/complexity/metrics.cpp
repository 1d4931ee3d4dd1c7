#include "cogref/complexity/metrics.hpp"

#include <stdexcept>

namespace cogref::complexity {

void IcpCostTable::set_cost(ConstructKind kind, int value) {
    if (value < 0)
        throw std::invalid_argument("ICP cost must be non-negative");
    cost[static_cast<std::size_t>(kind)] = value;
}

int icp(const FunctionUnit &fn, const IcpCostTable &table) {
    int total = 0;
    for (const auto &c : fn.constructs)
        total += table.cost_of(c.kind) + table.nesting_surcharge * c.depth;
    return total;
}

int cyclomatic(const FunctionUnit &fn) {
    int decisions = 0;
    for (const auto &c : fn.constructs)
        if (c.kind != ConstructKind::BranchElse)
            ++decisions;
    return 1 + decisions;
}

int cognitive(const FunctionUnit &fn) {
    int total = 0;
    for (const auto &c : fn.constructs)
        total += 1 + c.depth;
    return total;
}

ComplexityReport unit_report(const source_ir::ParsedUnit &parsed, const IcpCostTable &table) {
    ComplexityReport report;
    for (const auto &fn : parsed.functions) {
        FunctionMetrics m{fn.name, icp(fn, table), cyclomatic(fn), cognitive(fn)};
        report.unit_totals.icp += m.icp;
        report.unit_totals.cc += m.cc;
        report.unit_totals.cogc += m.cogc;
        report.per_function.push_back(std::move(m));
    }
    report.empty_unit = parsed.functions.empty();
    return report;
}

ComplexityReport unit_report(const source_ir::SourceUnit &unit, const IcpCostTable &table) {
    return unit_report(source_ir::parse_unit(unit), table);
}

DeltaClass delta_class(int before, int after) {
    if (after < before)
        return DeltaClass::Decrease;
    if (after > before)
        return DeltaClass::Increase;
    return DeltaClass::NoChange;
}

std::string_view to_string(DeltaClass d) {
    switch (d) {
        case DeltaClass::Decrease: return "Decrease";
        case DeltaClass::Increase: return "Increase";
        case DeltaClass::NoChange: return "NoChange";
    }
    return "NoChange";
}

}  // namespace cogref::complexity
