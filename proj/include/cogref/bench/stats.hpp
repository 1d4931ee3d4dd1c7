#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogref::bench {

/// (before, after) values paired by origin id for one metric and arm.
struct PairedSample {
    std::vector<std::string> origin_ids;
    std::vector<double> before;
    std::vector<double> after;

    void add(std::string origin_id, double b, double a);
    std::size_t size() const noexcept { return before.size(); }
};

enum class PMethod { Exact, NormalApprox, Degenerate };

std::string_view to_string(PMethod m);

struct WilcoxonResult {
    double p = 1.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n_effective = 0;  // pairs left after dropping zero differences
    PMethod method = PMethod::Degenerate;
    std::string note;
};

inline constexpr std::size_t kExactWilcoxonMaxN = 25;

/// Two-sided signed-rank test on after - before. Zero differences are
/// dropped and ties get midranks. Throws std::invalid_argument on an empty
/// sample; an all-zero sample yields p = 1 with the Degenerate method.
WilcoxonResult wilcoxon_signed_rank(const PairedSample &sample);

/// Exact two-sided p for the given (possibly mid-)ranks and observed W+.
double wilcoxon_exact_p(const std::vector<double> &ranks, double w_plus);

enum class Magnitude { Negligible, Small, Medium, Large };

std::string_view to_string(Magnitude m);
Magnitude magnitude_of(double delta);

struct CliffsDelta {
    double delta = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
};

/// (#{a > b} - #{a < b}) / (|a| |b|). Throws std::invalid_argument on empty input.
CliffsDelta cliffs_delta(const std::vector<double> &a, const std::vector<double> &b);

class UndefinedRate : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Percentage drop from baseline to treated failures. Throws UndefinedRate when baseline is 0.
double reduction_rate(long baseline_failures, long treated_failures);

struct NetEffect {
    long decreases = 0;
    long increases = 0;
    long net = 0;
    double net_pct = 0.0;
};

/// Throws std::invalid_argument on negative counts, an empty corpus or
/// decreases + increases > corpus_size.
NetEffect net_effect(long decreases, long increases, long corpus_size);

/// Two decimals, no negative zero.
std::string format_fixed2(double value);

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Linear interpolation between order statistics (inclusive). Throws on empty input.
double quantile(std::vector<double> values, double p);
Quartiles quartile_summary(const std::vector<double> &values);

}  // namespace cogref::bench
