#include "cogref/bench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <fmt/format.h>

namespace cogref::bench {

void PairedSample::add(std::string origin_id, double b, double a) {
    origin_ids.push_back(std::move(origin_id));
    before.push_back(b);
    after.push_back(a);
}

std::string_view to_string(PMethod m) {
    switch (m) {
        case PMethod::Exact: return "exact";
        case PMethod::NormalApprox: return "normal-approx";
        case PMethod::Degenerate: return "degenerate";
    }
    return "unknown";
}

namespace {

// Midranks of |d| in the original order.
std::vector<double> midranks(const std::vector<double> &abs_d) {
    std::vector<std::size_t> order(abs_d.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return abs_d[l] < abs_d[r]; });
    std::vector<double> ranks(abs_d.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && abs_d[order[j + 1]] == abs_d[order[i]])
            ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double wilcoxon_exact_p(const std::vector<double> &ranks, double w_plus) {
    // midranks are multiples of 1/2, so work in doubled integer ranks
    std::vector<std::size_t> twice;
    std::size_t total = 0;
    for (double r : ranks) {
        twice.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
        total += twice.back();
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : twice) {
        for (std::size_t s = reach + 1; s-- > 0;)
            if (count[s] != 0.0)
                count[s + r] += count[s];
        reach += r;
    }
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    const auto obs = static_cast<std::size_t>(std::llround(2.0 * w_plus));
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
        if (s <= obs)
            lower += count[s];
        if (s >= obs)
            upper += count[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

WilcoxonResult wilcoxon_signed_rank(const PairedSample &sample) {
    if (sample.before.size() != sample.after.size())
        throw std::invalid_argument("paired sample sizes differ");
    if (sample.size() == 0)
        throw std::invalid_argument("empty paired sample");

    std::vector<double> d;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double diff = sample.after[i] - sample.before[i];
        if (diff != 0.0)
            d.push_back(diff);
    }
    WilcoxonResult res;
    res.n_effective = d.size();
    if (d.empty()) {
        res.p = 1.0;
        res.method = PMethod::Degenerate;
        res.note = "DegenerateSample: all differences are zero";
        return res;
    }

    std::vector<double> abs_d(d.size());
    std::transform(d.begin(), d.end(), abs_d.begin(), [](double x) { return std::fabs(x); });
    const std::vector<double> ranks = midranks(abs_d);
    for (std::size_t i = 0; i < d.size(); ++i)
        (d[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];

    const auto n = static_cast<double>(d.size());
    if (d.size() <= kExactWilcoxonMaxN) {
        res.method = PMethod::Exact;
        res.p = wilcoxon_exact_p(ranks, res.w_plus);
        return res;
    }

    double tie_term = 0.0;
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
    const double dev = std::max(0.0, std::fabs(res.w_plus - mean) - 0.5);
    const double z = var > 0 ? dev / std::sqrt(var) : 0.0;
    res.method = PMethod::NormalApprox;
    res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    res.note = fmt::format("z={:.4f}", z);
    return res;
}

std::string_view to_string(Magnitude m) {
    switch (m) {
        case Magnitude::Negligible: return "negligible";
        case Magnitude::Small: return "small";
        case Magnitude::Medium: return "medium";
        case Magnitude::Large: return "large";
    }
    return "unknown";
}

Magnitude magnitude_of(double delta) {
    const double a = std::fabs(delta);
    if (a < 0.147)
        return Magnitude::Negligible;
    if (a < 0.33)
        return Magnitude::Small;
    if (a < 0.474)
        return Magnitude::Medium;
    return Magnitude::Large;
}

CliffsDelta cliffs_delta(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("cliffs_delta needs two non-empty samples");
    std::vector<double> sb = b;
    std::sort(sb.begin(), sb.end());
    long long more = 0;
    long long less = 0;
    for (double x : a) {
        more += std::lower_bound(sb.begin(), sb.end(), x) - sb.begin();
        less += sb.end() - std::upper_bound(sb.begin(), sb.end(), x);
    }
    CliffsDelta out;
    out.delta = static_cast<double>(more - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    out.magnitude = magnitude_of(out.delta);
    return out;
}

double reduction_rate(long baseline_failures, long treated_failures) {
    if (baseline_failures < 0 || treated_failures < 0)
        throw std::invalid_argument("negative failure count");
    if (baseline_failures == 0)
        throw UndefinedRate("reduction rate undefined for a zero baseline");
    return 100.0 * static_cast<double>(baseline_failures - treated_failures) / static_cast<double>(baseline_failures);
}

NetEffect net_effect(long decreases, long increases, long corpus_size) {
    if (decreases < 0 || increases < 0 || corpus_size <= 0 || decreases + increases > corpus_size)
        throw std::invalid_argument("net_effect: inconsistent counts");
    NetEffect e;
    e.decreases = decreases;
    e.increases = increases;
    e.net = decreases - increases;
    e.net_pct = 100.0 * static_cast<double>(e.net) / static_cast<double>(corpus_size);
    return e;
}

std::string format_fixed2(double value) {
    std::string s = fmt::format("{:.2f}", value);
    if (s == "-0.00")
        s = "0.00";
    return s;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty())
        throw std::invalid_argument("quantile of empty sample");
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Quartiles quartile_summary(const std::vector<double> &values) {
    return {quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75)};
}

}  // namespace cogref::bench
