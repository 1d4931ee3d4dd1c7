#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>

#include "cogref/pipeline/config.hpp"
#include "cogref/pipeline/report.hpp"
#include "cogref/pipeline/run_record.hpp"
#include "cogref/pipeline/runner.hpp"
#include "test_util.hpp"

using namespace cogref::pipeline;
using cogref::testing::fixture_dir;
using cogref::testing::read_file;
namespace fs = std::filesystem;

namespace {

fs::path e2e() { return fixture_dir() / "e2e"; }

fs::path fresh_dir(const std::string &name) {
    const auto p = fs::temp_directory_path() / ("cogref_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig e2e_config(const fs::path &out) {
    RunConfig c = load_config(e2e() / "e2e.conf");
    c.output = out;
    return c;
}

std::vector<std::string> sorted_lines(const fs::path &records) {
    std::vector<std::string> out;
    for (const auto &r : load_records(records))
        out.push_back(to_line(r));
    std::sort(out.begin(), out.end());
    return out;
}

const char *kGoldenFiles[] = {"report.txt", "correctness.csv", "complexity.csv", "similarity.csv", "taxonomy.csv",
                              "failures.csv"};

class CountingTransport : public cogref::refactor::Transport {
public:
    cogref::refactor::HttpResponse post(const cogref::refactor::HttpRequest &) override {
        ++calls;
        return {500, "", {}};
    }
    std::atomic<int> calls{0};
};

struct CliResult {
    int status;
    std::string out;
};

CliResult cli(const std::string &args) {
    const std::string cmd = std::string(COGREF_BIN) + " " + args + " 2>/dev/null";
    FILE *p = ::popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = std::fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, k);
    const int st = ::pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string task_code(int task_id) {
    std::ifstream in(e2e() / "tasks.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j.at("task_id") == task_id)
            return j.at("code").get<std::string>();
    }
    return {};
}

fs::path write_temp(const std::string &name, const std::string &content) {
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

// ---- config

TEST(Config, ParsesShippedConfig) {
    const auto c = load_config(e2e() / "e2e.conf");
    EXPECT_TRUE(c.replay);
    EXPECT_EQ(c.seed, std::optional<std::uint64_t>(7));
    EXPECT_EQ(c.workers, 2u);
    EXPECT_EQ(c.model.model, "gpt-5-nano");
    EXPECT_EQ(c.dataset_path, e2e() / "tasks.jsonl");
    EXPECT_EQ(c.arms.size(), 2u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, Errors) {
    try {
        parse_config("dataset = mbpp\n# comment\nbogus = 1\n");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("seed = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("no equals sign\n"), ConfigError);
    EXPECT_THROW(parse_config("dataset = humaneval\n"), ConfigError);
    EXPECT_THROW(parse_arm_list("baseline,magic"), std::exception);
    EXPECT_EQ(parse_arm_list("cdd").size(), 1u);
}

TEST(Config, Validation) {
    RunConfig c = parse_config("dataset_path = t.jsonl\nsandbox.shim = s.py\n", "/base");
    EXPECT_EQ(c.dataset_path, fs::path("/base/t.jsonl"));
    EXPECT_NO_THROW(c.validate());
    c.replay = true;
    EXPECT_THROW(c.validate(), ConfigError);  // no fixtures
    c = parse_config("dataset = apps_introductory\ndataset_path = a.jsonl\nsandbox.shim = s.py\nsample_size = 5\n", "/b");
    EXPECT_THROW(c.validate(), ConfigError);  // no seed
    c.seed = 3;
    EXPECT_NO_THROW(c.validate());
    c.workers = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(parse_config("sandbox.network = true\ndataset_path = a\nsandbox.shim = s\n").validate(), std::exception);
}

// ---- records


TEST(Records, RoundTripOfEveryRecordKind) {
    const auto dir = fresh_dir("roundtrip");
    run_bench(e2e_config(dir));
    const auto records = load_records(dir / "records.jsonl");
    ASSERT_EQ(records.size(), 20u);
    for (const auto &r : records) {
        const auto back = record_from_json(nlohmann::json::parse(to_line(r)));
        EXPECT_EQ(to_line(back), to_line(r));
    }
    auto doc = to_json(records.front());
    doc["schema"] = kRecordSchemaVersion + 1;
    EXPECT_THROW(record_from_json(doc), std::invalid_argument);
    doc = to_json(records.front());
    doc.erase("origin_id");
    EXPECT_THROW(record_from_json(doc), std::invalid_argument);
    fs::remove_all(dir);
}

TEST(Records, TornTailIsRepairedOtherDamageIsNot) {
    const auto dir = fresh_dir("torn");
    fs::create_directories(dir);
    RunRecord r;
    r.origin_id = "mbpp-1";
    r.dataset = "mbpp";
    r.model = "m";
    const std::string line = to_line(r) + "\n";
    const auto path = dir / "records.jsonl";
    std::ofstream(path) << line << "{\"origin_id\": \"mb";
    EXPECT_EQ(load_records(path).size(), 1u);
    EXPECT_EQ(read_file(path), line + "{\"origin_id\": \"mb");
    EXPECT_EQ(load_records(path, true).size(), 1u);
    EXPECT_EQ(read_file(path), line);

    std::ofstream(path) << "{broken}\n" << line;
    EXPECT_THROW(load_records(path), RecordError);
    std::ofstream(path) << line << line;
    EXPECT_THROW(load_records(path), RecordError);
    EXPECT_TRUE(load_records(dir / "absent.jsonl").empty());
    fs::remove_all(dir);
}

// ---- report

TEST(Report, SignificanceLegend) {
    EXPECT_EQ(significance_stars(0.05), "NS");
    EXPECT_EQ(significance_stars(0.0499), "*");
    EXPECT_EQ(significance_stars(0.01), "*");
    EXPECT_EQ(significance_stars(0.0099), "**");
    EXPECT_EQ(significance_stars(0.00099), "***");
    EXPECT_EQ(significance_stars(0.000099), "****");
    EXPECT_EQ(significance_stars(1.0), "NS");
}

TEST(Report, EmptyInputIsEmptyRun) { EXPECT_THROW(build_report({}), EmptyRun); }

TEST(Report, DegenerateAndUndefinedCells) {
    std::vector<RunRecord> records;
    for (int i = 0; i < 3; ++i)
        for (auto arm : {cogref::refactor::Arm::Baseline, cogref::refactor::Arm::Cdd}) {
            RunRecord r;
            r.origin_id = "t" + std::to_string(i);
            r.dataset = "mbpp";
            r.model = "m";
            r.arm = arm;
            r.extracted = true;
            r.verdict = cogref::verification::Verdict::Pass;
            cogref::complexity::ComplexityReport rep;
            rep.per_function = {{"f", 2, 3, 4}};
            rep.unit_totals = {2, 3, 4};
            r.before = rep;
            r.after = rep;
            r.similarity = cogref::similarity::SimilarityScore{1, 1, 1, 1, 1};
            records.push_back(r);
        }
    const auto rep = build_report(records);
    const auto &cx = rep.files.at("complexity.csv");
    EXPECT_NE(cx.find(",degenerate,"), std::string::npos) << cx;
    EXPECT_NE(cx.find("1.0000e+00,NS"), std::string::npos) << cx;
    EXPECT_NE(cx.find("0.000,negligible"), std::string::npos) << cx;
    EXPECT_NE(rep.files.at("correctness.csv").find(",undefined"), std::string::npos) << rep.files.at("correctness.csv");
    EXPECT_EQ(rep.files.at("failures.csv"), "origin_id,arm,verdict,failed_case,label,source\n");
}

TEST(Report, HumanLabelsOverrideHeuristics) {
    const auto dir = fresh_dir("human");
    run_bench(e2e_config(dir));
    auto records = load_records(dir / "records.jsonl");
    for (auto &r : records)
        if (r.origin_id == "mbpp-1" && r.arm == cogref::refactor::Arm::Baseline)
            r.human_label = cogref::verification::ErrorLabel::ConditionalLogicIssue;
    const auto rep = build_report(records);
    EXPECT_NE(rep.files.at("failures.csv").find("mbpp-1,baseline,Fail,0,ConditionalLogicIssue,human"), std::string::npos);
    EXPECT_NE(rep.files.at("taxonomy.csv").find("mbpp,gpt-5-nano,baseline,1,1,0,1,1,4,1"), std::string::npos)
        << rep.files.at("taxonomy.csv");
    fs::remove_all(dir);
}

// ---- end to end

TEST(EndToEnd, ReplayMatchesGoldenFiles) {
    const auto dir = fresh_dir("golden");
    const auto s = run_bench(e2e_config(dir));
    EXPECT_EQ(s.total_jobs, 20u);
    EXPECT_EQ(s.written, 20u);
    EXPECT_FALSE(s.interrupted);
    write_report(dir);
    for (const char *name : kGoldenFiles)
        EXPECT_EQ(read_file(dir / name), read_file(e2e() / "golden" / name)) << name;

    std::size_t failures = 0;
    for (const auto &r : load_records(dir / "records.jsonl"))
        failures += r.failed();
    EXPECT_GE(failures, 2u);
    EXPECT_TRUE(fs::exists(dir / "prompts" / "mbpp-1.cdd.txt"));
    EXPECT_TRUE(fs::exists(dir / "responses" / "mbpp-1.cdd.txt"));
    fs::remove_all(dir);
}

TEST(EndToEnd, ReportIgnoresRecordOrder) {
    const auto dir = fresh_dir("order");
    run_bench(e2e_config(dir));
    auto records = load_records(dir / "records.jsonl");
    const auto a = build_report(records, "p");
    std::mt19937 rng(3);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(records.begin(), records.end(), rng);
        EXPECT_EQ(build_report(records, "p").files, a.files);
    }
    fs::remove_all(dir);
}

TEST(EndToEnd, InterruptAndResumeGiveTheSameRecords) {
    const auto full = fresh_dir("full");
    run_bench(e2e_config(full));

    const auto dir = fresh_dir("resume");
    BenchOptions stop;
    stop.stop_after = 7;
    const auto first = run_bench(e2e_config(dir), stop);
    EXPECT_TRUE(first.interrupted);
    EXPECT_EQ(first.written, 7u);
    // a crash mid-append leaves a torn line behind
    std::ofstream(dir / "records.jsonl", std::ios::app) << "{\"schema\":1,\"origin_id\":\"mbpp-";
    const auto second = run_bench(e2e_config(dir));
    EXPECT_EQ(second.skipped, 7u);
    EXPECT_EQ(second.written, 13u);
    EXPECT_EQ(sorted_lines(dir / "records.jsonl"), sorted_lines(full / "records.jsonl"));

    write_report(dir);
    write_report(full);
    for (const char *name : kGoldenFiles)
        EXPECT_EQ(read_file(dir / name), read_file(full / name)) << name;

    const auto third = run_bench(e2e_config(dir));
    EXPECT_EQ(third.written, 0u);
    EXPECT_EQ(third.skipped, 20u);
    fs::remove_all(dir);
    fs::remove_all(full);
}

TEST(EndToEnd, ReplayNeverTouchesTheTransport) {
    const auto dir = fresh_dir("offline");
    auto transport = std::make_shared<CountingTransport>();
    BenchOptions o;
    o.transport = transport;
    run_bench(e2e_config(dir), o);
    EXPECT_EQ(transport->calls.load(), 0);
    fs::remove_all(dir);
}

TEST(EndToEnd, ChangedProvenanceIsRejected) {
    const auto dir = fresh_dir("provenance");
    BenchOptions stop;
    stop.stop_after = 1;
    run_bench(e2e_config(dir), stop);
    auto c = e2e_config(dir);
    c.seed = 8;
    EXPECT_THROW(run_bench(c), ConfigError);
    c = e2e_config(dir);
    c.model.model = "other";
    EXPECT_THROW(run_bench(c), ConfigError);
    fs::remove_all(dir);
}

TEST(EndToEnd, FixtureMissIsRecordedNotFatal) {
    const auto dir = fresh_dir("miss");
    auto c = e2e_config(dir);
    const auto fixtures = write_temp("cogref_one_fixture.jsonl", "");
    c.fixtures = fixtures;
    c.arms = {cogref::refactor::Arm::Cdd};
    run_bench(c);
    const auto records = load_records(dir / "records.jsonl");
    ASSERT_EQ(records.size(), 10u);
    for (const auto &r : records) {
        EXPECT_FALSE(r.completion_error.empty());
        EXPECT_FALSE(r.verdict);
        EXPECT_EQ(r.resolved_category()->label, cogref::verification::ErrorLabel::Miscellaneous);
    }
    fs::remove_all(dir);
    fs::remove(fixtures);
}

TEST(EndToEnd, BrokenShimAbortsBeforeAnyRecord) {
    const auto dir = fresh_dir("noshim");
    auto c = e2e_config(dir);
    c.shim = write_temp("cogref_dead_shim.py", "import sys\nsys.exit(70)\n");
    EXPECT_THROW(run_bench(c), cogref::verification::SetupError);
    EXPECT_TRUE(load_records(dir / "records.jsonl").empty());
    fs::remove_all(dir);
    fs::remove(c.shim);
}

TEST(Paths, FileStem) {
    EXPECT_EQ(file_stem("mbpp-1", cogref::refactor::Arm::Cdd), "mbpp-1.cdd");
    EXPECT_EQ(file_stem("a/b c", cogref::refactor::Arm::Baseline).find('/'), std::string::npos);
}

// ---- command line

TEST(Cli, Analyze) {
    const auto r = cli("analyze " + (fixture_dir() / "listings/is_prime_nested.py").string());
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("is_prime"), std::string::npos);
    EXPECT_NE(r.out.find("TOTAL"), std::string::npos);
    const auto bad = write_temp("cogref_bad.py", "def f(:\n");
    EXPECT_EQ(cli("analyze " + bad.string()).status, 2);
    fs::remove(bad);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("").status, 1);
    EXPECT_EQ(cli("frobnicate").status, 1);
    EXPECT_EQ(cli("analyze /nonexistent.py").status, 1);
    EXPECT_EQ(cli("bench").status, 1);
    EXPECT_EQ(cli("--help").status, 0);
}

TEST(Cli, RefactorReplay) {
    const std::string conf = (e2e() / "e2e.conf").string();
    const auto src = write_temp("cogref_task6.py", task_code(6));
    auto r = cli("refactor " + src.string() + " --arm cdd --config " + conf);
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("def "), std::string::npos);
    const auto prose = write_temp("cogref_task9.py", task_code(9));
    EXPECT_EQ(cli("refactor " + prose.string() + " --arm baseline --config " + conf).status, 3);
    const auto unknown = write_temp("cogref_unknown.py", "def g():\n    return 2\n");
    EXPECT_EQ(cli("refactor " + unknown.string() + " --arm cdd --config " + conf).status, 5);
    EXPECT_EQ(cli("refactor " + unknown.string() + " --arm magic --config " + conf).status, 1);
    for (const auto &p : {src, prose, unknown})
        fs::remove(p);
}

TEST(Cli, LiveRunWithoutTokenIsAuthError) {
    const auto dir = fresh_dir("cli_auth");
    const auto conf = write_temp("cogref_live.conf",
                                 "dataset = mbpp\ndataset_path = " + (e2e() / "tasks.jsonl").string() +
                                     "\nmodel.token_env = COGREF_UNSET_TOKEN_VAR\nmodel.endpoint = http://127.0.0.1:9/v1\n"
                                     "sandbox.shim = " + std::string(COGREF_SHIM) + "\nvalidate_references = false\n");
    EXPECT_EQ(cli("bench --config " + conf.string() + " --output " + dir.string()).status, 6);
    fs::remove(conf);
    fs::remove_all(dir);
}

TEST(Cli, BenchReportAndEmptyRun) {
    const auto dir = fresh_dir("cli_bench");
    const std::string conf = (e2e() / "e2e.conf").string();
    EXPECT_EQ(cli("bench --config " + conf + " --output " + dir.string()).status, 0);
    EXPECT_EQ(cli("report " + dir.string()).status, 0);
    EXPECT_EQ(read_file(dir / "report.txt"), read_file(e2e() / "golden/report.txt"));
    const auto empty = fresh_dir("cli_empty");
    fs::create_directories(empty);
    std::ofstream(empty / "records.jsonl") << "";
    std::ofstream(empty / "run.json") << "{}";
    EXPECT_EQ(cli("report " + empty.string()).status, 9);
    std::ofstream(empty / "records.jsonl") << "{bad}\n";
    EXPECT_EQ(cli("report " + empty.string()).status, 2);
    const auto badconf = write_temp("cogref_bad.conf", "unknown_key = 1\n");
    EXPECT_EQ(cli("bench --config " + badconf.string()).status, 2);
    fs::remove(badconf);
    fs::remove_all(dir);
    fs::remove_all(empty);
}
