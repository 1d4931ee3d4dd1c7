#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "cogref/bench/dataset.hpp"
#include "cogref/bench/stats.hpp"
#include "test_util.hpp"

using namespace cogref::bench;

namespace {

PairedSample paired_from_diffs(const std::vector<double> &diffs) {
    PairedSample s;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        s.add("t" + std::to_string(i), 0.0, diffs[i]);
    return s;
}

// Two-sided exact p by enumerating every sign assignment over midranks.
double brute_force_p(const std::vector<double> &diffs) {
    std::vector<double> abs_d;
    for (double d : diffs)
        if (d != 0)
            abs_d.push_back(std::abs(d));
    const std::size_t n = abs_d.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            less += abs_d[j] < abs_d[i];
            equal += abs_d[j] == abs_d[i];
        }
        rank[i] = less + (equal + 1) / 2.0;
    }
    double observed = 0;
    for (std::size_t i = 0, k = 0; i < diffs.size(); ++i)
        if (diffs[i] != 0) {
            if (diffs[i] > 0)
                observed += rank[k];
            ++k;
        }
    double le = 0, ge = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i))
                w += rank[i];
        le += w <= observed + 1e-9;
        ge += w >= observed - 1e-9;
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / static_cast<double>(total));
}

double pairwise_delta(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0;
    for (double x : a)
        for (double y : b)
            s += (x > y) - (x < y);
    return s / static_cast<double>(a.size() * b.size());
}

std::filesystem::path write_temp(const std::string &name, const std::string &content) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

// ---- Wilcoxon

TEST(Wilcoxon, FiveAllPositive) {
    const auto r = wilcoxon_signed_rank(paired_from_diffs({1, 2, 3, 4, 5}));
    EXPECT_NEAR(r.p, 0.0625, 1e-12);
    EXPECT_EQ(r.method, PMethod::Exact);
    EXPECT_EQ(r.w_plus, 15);
    EXPECT_EQ(r.w_minus, 0);
    EXPECT_NEAR(brute_force_p({1, 2, 3, 4, 5}), 0.0625, 1e-12);
}

TEST(Wilcoxon, MixedSignsSix) {
    // W- = 2 + 4 = 6; 14 of the 64 subsets of {1..6} sum to at most 6.
    const auto r = wilcoxon_signed_rank(paired_from_diffs({1, -2, 3, -4, 5, 6}));
    EXPECT_NEAR(r.p, 28.0 / 64.0, 1e-12);
    EXPECT_EQ(r.w_plus, 15);
    EXPECT_EQ(r.w_minus, 6);
}

TEST(Wilcoxon, ExactMatchesEnumerationWithTiesAndZeros) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> value(-4, 4);
    std::uniform_int_distribution<int> size(1, 14);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> d(static_cast<std::size_t>(size(rng)));
        for (auto &x : d)
            x = value(rng);
        const auto r = wilcoxon_signed_rank(paired_from_diffs(d));
        if (r.method == PMethod::Degenerate) {
            EXPECT_TRUE(std::all_of(d.begin(), d.end(), [](double x) { return x == 0; }));
            continue;
        }
        EXPECT_EQ(r.method, PMethod::Exact);
        EXPECT_NEAR(r.p, brute_force_p(d), 1e-12) << "trial " << trial;
        EXPECT_EQ(r.w_plus + r.w_minus, r.n_effective * (r.n_effective + 1) / 2.0);
    }
}

TEST(Wilcoxon, ZerosAreDropped) {
    const auto r = wilcoxon_signed_rank(paired_from_diffs({0, 1, 2, 0, 3, 4, 5}));
    EXPECT_EQ(r.n_effective, 5u);
    EXPECT_NEAR(r.p, 0.0625, 1e-12);
}

TEST(Wilcoxon, AllZeroIsDegenerate) {
    const auto r = wilcoxon_signed_rank(paired_from_diffs({0, 0, 0}));
    EXPECT_EQ(r.method, PMethod::Degenerate);
    EXPECT_EQ(r.p, 1.0);
    EXPECT_EQ(r.n_effective, 0u);
    EXPECT_FALSE(r.note.empty());
    EXPECT_THROW(wilcoxon_signed_rank(PairedSample{}), std::invalid_argument);
}

TEST(Wilcoxon, NormalApproximationAgreesNearCutoff) {
    std::vector<double> d;
    for (int i = 1; i <= 20; ++i)
        d.push_back(i % 3 == 0 ? -i : i);
    const auto exact = wilcoxon_signed_rank(paired_from_diffs(d));
    ASSERT_EQ(exact.method, PMethod::Exact);
    // continuity-corrected normal on the same statistic, computed here
    const double n = 20, mean = n * (n + 1) / 4, sd = std::sqrt(n * (n + 1) * (2 * n + 1) / 24);
    const double z = (std::abs(exact.w_plus - mean) - 0.5) / sd;
    EXPECT_LT(std::abs(exact.p - std::erfc(z / std::sqrt(2.0))), 0.02);
}

TEST(Wilcoxon, LargeSampleUsesTieCorrectedNormal) {
    std::vector<double> d;
    for (int i = 0; i < 40; ++i)
        d.push_back(i % 4 == 0 ? -1.0 : static_cast<double>(1 + i % 3));
    const auto r = wilcoxon_signed_rank(paired_from_diffs(d));
    ASSERT_EQ(r.method, PMethod::NormalApprox);
    // independent midranks and tie term
    std::map<double, int> counts;
    for (double x : d)
        ++counts[std::abs(x)];
    double below = 0, w_plus = 0, ties = 0;
    std::map<double, double> midrank;
    for (auto [v, c] : counts) {
        midrank[v] = below + (c + 1) / 2.0;
        below += c;
        ties += std::pow(c, 3) - c;
    }
    for (double x : d)
        if (x > 0)
            w_plus += midrank[std::abs(x)];
    EXPECT_DOUBLE_EQ(r.w_plus, w_plus);
    const double n = 40, mean = n * (n + 1) / 4;
    const double var = n * (n + 1) * (2 * n + 1) / 24 - ties / 48;
    const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
    EXPECT_NEAR(r.p, std::erfc(z / std::sqrt(2.0)), 1e-12);
}

TEST(Wilcoxon, SignSymmetry) {
    const std::vector<double> d = {3, -1, 4, 1, -5, 9, 2, 6};
    std::vector<double> neg;
    for (double x : d)
        neg.push_back(-x);
    EXPECT_NEAR(wilcoxon_signed_rank(paired_from_diffs(d)).p, wilcoxon_signed_rank(paired_from_diffs(neg)).p, 1e-15);
}

// ---- Cliff's delta

TEST(CliffsDelta, HandComputedPairs) {
    const auto r = cliffs_delta({1, 2, 3}, {2, 3, 4});
    EXPECT_NEAR(r.delta, -5.0 / 9.0, 1e-9);
    EXPECT_EQ(r.magnitude, Magnitude::Large);
    EXPECT_EQ(to_string(r.magnitude), "large");
}

TEST(CliffsDelta, MatchesPairwiseDefinition) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> v(0, 6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(1 + trial % 9), b(1 + trial % 7);
        for (auto &x : a)
            x = v(rng);
        for (auto &x : b)
            x = v(rng);
        const double want = pairwise_delta(a, b);
        EXPECT_NEAR(cliffs_delta(a, b).delta, want, 1e-12);
        EXPECT_NEAR(cliffs_delta(b, a).delta, -want, 1e-12);
    }
}

TEST(CliffsDelta, ShiftAndIdentity) {
    EXPECT_EQ(cliffs_delta({5, 6, 7}, {1, 2, 3}).delta, 1.0);
    EXPECT_EQ(cliffs_delta({1, 2, 3}, {1, 2, 3}).delta, 0.0);
    EXPECT_EQ(cliffs_delta({1, 2, 3}, {1, 2, 3}).magnitude, Magnitude::Negligible);
    EXPECT_THROW(cliffs_delta({}, {1}), std::invalid_argument);
}

TEST(CliffsDelta, MagnitudeBands) {
    EXPECT_EQ(magnitude_of(0.0), Magnitude::Negligible);
    EXPECT_EQ(magnitude_of(0.1469), Magnitude::Negligible);
    EXPECT_EQ(magnitude_of(0.147), Magnitude::Small);
    EXPECT_EQ(magnitude_of(0.3299), Magnitude::Small);
    EXPECT_EQ(magnitude_of(0.33), Magnitude::Medium);
    EXPECT_EQ(magnitude_of(0.4739), Magnitude::Medium);
    EXPECT_EQ(magnitude_of(0.474), Magnitude::Large);
    EXPECT_EQ(magnitude_of(-0.474), Magnitude::Large);
    EXPECT_EQ(magnitude_of(-0.2), Magnitude::Small);
    EXPECT_EQ(magnitude_of(1.0), Magnitude::Large);
}

// ---- table arithmetic

TEST(Tables, ReductionRate) {
    EXPECT_EQ(format_fixed2(reduction_rate(39, 11)), "71.79");
    EXPECT_EQ(format_fixed2(reduction_rate(36, 9)), "75.00");
    EXPECT_NEAR(reduction_rate(39, 11), 2800.0 / 39.0, 1e-12);
    EXPECT_EQ(reduction_rate(4, 6), -50.0);
    EXPECT_THROW(reduction_rate(0, 0), UndefinedRate);
    EXPECT_THROW(reduction_rate(-1, 0), std::invalid_argument);
}

TEST(Tables, NetEffect) {
    auto e = net_effect(229, 231, 974);
    EXPECT_EQ(e.net, -2);
    EXPECT_EQ(format_fixed2(e.net_pct), "-0.21");
    e = net_effect(1323, 616, 5000);
    EXPECT_EQ(e.net, 707);
    EXPECT_EQ(format_fixed2(e.net_pct), "14.14");
    EXPECT_EQ(e.decreases, 1323);
    EXPECT_EQ(e.increases, 616);
    EXPECT_THROW(net_effect(5, 6, 10), std::invalid_argument);
    EXPECT_THROW(net_effect(1, 1, 0), std::invalid_argument);
}

TEST(Tables, Formatting) {
    EXPECT_EQ(format_fixed2(-0.001), "0.00");
    EXPECT_EQ(format_fixed2(2.005), "2.00");
    EXPECT_EQ(format_fixed2(1.0 / 3.0), "0.33");
    EXPECT_EQ(format_fixed2(-12.345), "-12.35");
}

TEST(Tables, QuartilesLinearInterpolation) {
    const auto q = quartile_summary({4, 1, 3, 2});
    EXPECT_DOUBLE_EQ(q.q1, 1.75);
    EXPECT_DOUBLE_EQ(q.median, 2.5);
    EXPECT_DOUBLE_EQ(q.q3, 3.25);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.25), 7);
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.5), 3);
    EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.9), 9);
    EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

// ---- datasets

TEST(Mbpp, LoadsShippedTasks) {
    const auto records = load_mbpp(cogref::testing::fixture_dir() / "e2e/tasks.jsonl");
    ASSERT_EQ(records.size(), 10u);
    EXPECT_EQ(records[0].origin_id, "mbpp-1");
    EXPECT_EQ(records[0].tests.entry_point, std::optional<std::string>("avg"));
    EXPECT_EQ(records[0].tests.assertions.size(), 3u);
    EXPECT_EQ(records[0].tag, DatasetTag::Mbpp);
    EXPECT_FALSE(records[0].reference_passes);
}

TEST(Mbpp, EmptyFileHasNoRecords) {
    const auto p = write_temp("cogref_empty.jsonl", "");
    EXPECT_TRUE(load_mbpp(p).empty());
    std::filesystem::remove(p);
}

TEST(Mbpp, MalformedLineReportsItsNumber) {
    const auto p = write_temp("cogref_bad.jsonl",
                              "{\"task_id\": 1, \"text\": \"t\", \"code\": \"def f():\\n    return 1\\n\", "
                              "\"test_list\": [\"assert f() == 1\"], \"test_setup_code\": \"\"}\n\n{oops\n");
    try {
        load_mbpp(p);
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    std::filesystem::remove(p);
}

TEST(Mbpp, DuplicateAndMissingFields) {
    const std::string rec = "{\"task_id\": 1, \"text\": \"t\", \"code\": \"x = 1\\n\", \"test_list\": [\"assert x == 1\"], "
                            "\"test_setup_code\": \"\"}\n";
    auto p = write_temp("cogref_dup.jsonl", rec + rec);
    EXPECT_THROW(load_mbpp(p), FormatError);
    p = write_temp("cogref_missing.jsonl", "{\"task_id\": 1, \"text\": \"t\"}\n");
    EXPECT_THROW(load_mbpp(p), FormatError);
    std::filesystem::remove(p);
    EXPECT_THROW(load_mbpp("/nonexistent/tasks.jsonl"), std::runtime_error);
}

TEST(Mbpp, EntryPointIsTheCalledDefinition) {
    const std::string code = "def helper(x):\n    return x\n\ndef main_fn(a):\n    return helper(a)\n";
    EXPECT_EQ(find_entry_point(code, {"assert main_fn(len([1])) == 1"}), std::optional<std::string>("main_fn"));
    EXPECT_FALSE(find_entry_point("x = 1\n", {"assert x == 1"}));
}

TEST(Mbpp, AdapterFileMatchesBuiltins) {
    const auto adapters = load_adapters(std::filesystem::path(COGREF_DATA_DIR) / "datasets/adapters.json");
    ASSERT_TRUE(adapters.count("mbpp"));
    ASSERT_TRUE(adapters.count("apps_introductory"));
    EXPECT_EQ(adapters.at("mbpp").tests, builtin_adapter(DatasetTag::Mbpp).tests);
    EXPECT_EQ(adapters.at("apps_introductory").keep_difficulty, "introductory");
}

namespace {

std::string apps_line(int id, const std::string &difficulty, int solutions, bool call_based) {
    nlohmann::json sols = nlohmann::json::array();
    for (int k = 0; k < solutions; ++k)
        sols.push_back(call_based ? "class Solution:\n    def add(self, a, b):\n        return a + b + " + std::to_string(k * 0) + "\n"
                                  : "print(int(input()) * 2)\n");
    nlohmann::json io = call_based ? nlohmann::json{{"fn_name", "add"}, {"inputs", {{1, 2}, {true, false}}}, {"outputs", {{3}, 1}}}
                                   : nlohmann::json{{"inputs", {"2\n", "5\n"}}, {"outputs", {"4\n", "10\n"}}};
    nlohmann::json j = {{"problem_id", id}, {"question", "q"}, {"solutions", sols.dump()}, {"input_output", io.dump()},
                        {"difficulty", difficulty}};
    return j.dump() + "\n";
}

}  // namespace

TEST(Apps, FiltersFlattensAndSamplesDeterministically) {
    std::string text;
    for (int id = 0; id < 12; ++id)
        text += apps_line(id, id % 3 == 0 ? "interview" : "introductory", 2, false);
    const auto p = write_temp("cogref_apps.jsonl", text);
    const auto a = load_apps_introductory(p, 10, 42);
    const auto b = load_apps_introductory(p, 10, 42);
    ASSERT_EQ(a.size(), 10u);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].origin_id, b[i].origin_id);
        ids.insert(a[i].origin_id);
        const int pid = std::stoi(a[i].origin_id.substr(5));
        EXPECT_NE(pid % 3, 0) << a[i].origin_id;
        EXPECT_EQ(a[i].tests.style, cogref::verification::TestStyle::StdinStdout);
        EXPECT_EQ(a[i].tag, DatasetTag::AppsIntroductory);
    }
    EXPECT_EQ(ids.size(), 10u);
    const auto c = load_apps_introductory(p, 10, 43);
    bool differs = false;
    for (std::size_t i = 0; i < c.size(); ++i)
        differs |= c[i].origin_id != a[i].origin_id;
    EXPECT_TRUE(differs);
    // 8 introductory problems x 2 solutions
    EXPECT_EQ(load_apps_introductory(p, 16, 1).size(), 16u);
    EXPECT_THROW(load_apps_introductory(p, 17, 1), InsufficientRecords);
    std::filesystem::remove(p);
}

TEST(Apps, CallBasedProblemsBecomeAssertions) {
    const auto p = write_temp("cogref_apps_call.jsonl", apps_line(7, "introductory", 1, true));
    const auto r = load_apps_introductory(p, 1, 0);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].origin_id, "apps-7-s0");
    EXPECT_EQ(r[0].tests.style, cogref::verification::TestStyle::AssertList);
    EXPECT_EQ(r[0].tests.assertions,
              (std::vector<std::string>{"assert Solution().add(1, 2) == 3", "assert Solution().add(True, False) == 1"}));
    std::filesystem::remove(p);
}

TEST(Sampling, IndicesAreDistinctAndInRange) {
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto idx = sample_indices(50, 20, seed);
        ASSERT_EQ(idx.size(), 20u);
        std::set<std::size_t> s(idx.begin(), idx.end());
        EXPECT_EQ(s.size(), 20u);
        EXPECT_LT(*s.rbegin(), 50u);
        EXPECT_EQ(idx, sample_indices(50, 20, seed));
    }
    EXPECT_THROW(sample_indices(3, 4, 0), InsufficientRecords);
}

TEST(References, ValidationMarksFailingReferences) {
    const cogref::verification::Verifier v(COGREF_PYTHON, COGREF_SHIM);
    auto records = load_mbpp(cogref::testing::fixture_dir() / "e2e/tasks.jsonl");
    records.resize(2);
    records[1].reference = "def parallel_lines(a, b):\n    return False\n";
    validate_references(records, v, {});
    EXPECT_EQ(records[0].reference_passes, std::optional<bool>(true));
    EXPECT_EQ(records[1].reference_passes, std::optional<bool>(false));
}
