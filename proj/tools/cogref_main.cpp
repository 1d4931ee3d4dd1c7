#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cogref/bench/dataset.hpp"
#include "cogref/complexity/metrics.hpp"
#include "cogref/pipeline/config.hpp"
#include "cogref/pipeline/report.hpp"
#include "cogref/pipeline/runner.hpp"
#include "cogref/refactor/client.hpp"
#include "cogref/refactor/constraints.hpp"
#include "cogref/refactor/extract.hpp"
#include "cogref/refactor/prompt.hpp"

namespace {

using namespace cogref;

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kExtraction = 3,
    kTransport = 4,
    kFixtureMiss = 5,
    kAuth = 6,
    kRateLimited = 7,
    kSetup = 8,
    kEmptyRun = 9,
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_analyze(const std::string &file) {
    const auto unit = source_ir::SourceUnit::original(file, read_file(file));
    const auto report = complexity::unit_report(unit);
    fmt::print("{:<32} {:>5} {:>5} {:>5}\n", "function", "icp", "cc", "cogc");
    for (const auto &f : report.per_function)
        fmt::print("{:<32} {:>5} {:>5} {:>5}\n", f.name, f.icp, f.cc, f.cogc);
    if (!report.per_function.empty())
        fmt::print("{:<32} {:>5} {:>5} {:>5}\n", "TOTAL", report.unit_totals.icp, report.unit_totals.cc,
                   report.unit_totals.cogc);
    return kOk;
}

struct Overrides {
    std::string config;
    bool replay = false;
    std::string fixtures;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string arms;
    std::string output;
};

pipeline::RunConfig effective_config(const Overrides &o) {
    pipeline::RunConfig cfg = o.config.empty() ? pipeline::RunConfig{} : pipeline::load_config(o.config);
    if (o.replay)
        cfg.replay = true;
    if (!o.fixtures.empty())
        cfg.fixtures = o.fixtures;
    if (o.seed)
        cfg.seed = o.seed;
    if (o.workers)
        cfg.workers = *o.workers;
    if (!o.arms.empty())
        cfg.arms = pipeline::parse_arm_list(o.arms);
    if (!o.output.empty())
        cfg.output = o.output;
    return cfg;
}

int cmd_refactor(const std::string &file, const std::string &arm_text, const Overrides &o) {
    const auto arm = refactor::parse_arm(arm_text);
    if (!arm)
        throw CLI::ValidationError("--arm", "expected baseline or cdd");
    const pipeline::RunConfig cfg = effective_config(o);
    cfg.model.validate();
    const std::string source = read_file(file);
    const auto original = source_ir::SourceUnit::original(file, source);
    source_ir::parse_unit(original);

    const std::string prompt = refactor::build_prompt(*arm, source);
    refactor::Completion c;
    if (cfg.replay) {
        if (cfg.fixtures.empty())
            throw pipeline::ConfigError("replay mode needs a fixtures path");
        c = refactor::complete_replay(prompt, cfg.model, refactor::FixtureStore::load(cfg.fixtures));
    } else {
        auto transport = refactor::make_http_transport();
        refactor::RateLimiter limiter(cfg.model.requests_per_second);
        c = refactor::complete(prompt, cfg.model, *transport, limiter);
    }
    const auto code = refactor::extract_code(c.text);
    if (!code) {
        fmt::print(stderr, "no code could be extracted from the response\n");
        return kExtraction;
    }
    std::fwrite(code->data(), 1, code->size(), stdout);
    if (!code->empty() && code->back() != '\n')
        std::fputc('\n', stdout);
    for (const auto &v : refactor::check_constraints(original, source_ir::SourceUnit::refactored(file, *code)))
        fmt::print(stderr, "violation: {}: {}\n", refactor::to_string(v.kind), v.detail);
    return kOk;
}

int cmd_bench(const Overrides &o, std::optional<std::size_t> stop_after) {
    if (o.config.empty())
        throw CLI::RequiredError("--config");
    const pipeline::RunConfig cfg = effective_config(o);
    pipeline::BenchOptions opts;
    opts.stop_after = stop_after;
    const auto s = pipeline::run_bench(cfg, opts);
    fmt::print("jobs: {}  skipped: {}  written: {}{}\n", s.total_jobs, s.skipped, s.written,
               s.interrupted ? "  (interrupted)" : "");
    return kOk;
}

int cmd_report(const std::string &dir) {
    const auto rep = pipeline::write_report(dir);
    fmt::print("{}", rep.files.at("report.txt"));
    return kOk;
}

int cmd_fixture_add(const Overrides &o, const std::string &arm_text, const std::string &source_file,
                    const std::string &response_file) {
    const auto arm = refactor::parse_arm(arm_text);
    if (!arm)
        throw CLI::ValidationError("--arm", "expected baseline or cdd");
    const pipeline::RunConfig cfg = effective_config(o);
    if (cfg.fixtures.empty())
        throw pipeline::ConfigError("no fixtures path configured");
    refactor::FixtureStore store;
    if (std::filesystem::exists(cfg.fixtures))
        store = refactor::FixtureStore::load(cfg.fixtures);
    store.add(refactor::build_prompt(*arm, read_file(source_file)), cfg.model.model, read_file(response_file));
    store.save(cfg.fixtures);
    fmt::print("{} entries in {}\n", store.size(), cfg.fixtures.string());
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Complexity-guided refactoring benchmark toolkit"};
    app.require_subcommand(1);

    Overrides o;
    std::string file;
    std::string arm = "cdd";
    std::string run_dir;
    std::optional<std::size_t> stop_after;
    std::string source_file;
    std::string response_file;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
        sub->add_flag("--replay", o.replay, "Use recorded responses only");
        sub->add_option("--fixtures", o.fixtures, "Recorded response file");
    };

    auto *analyze = app.add_subcommand("analyze", "Print ICP, CC and CogC per function");
    analyze->add_option("file", file)->required()->check(CLI::ExistingFile);

    auto *refactor_cmd = app.add_subcommand("refactor", "Refactor one file and print the result");
    refactor_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
    refactor_cmd->add_option("--arm", arm, "baseline or cdd");
    add_common(refactor_cmd);

    auto *bench_cmd = app.add_subcommand("bench", "Run the benchmark into the output directory");
    add_common(bench_cmd);
    bench_cmd->add_option("--seed", o.seed, "Sampling seed");
    bench_cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--arm", o.arms, "Comma separated arms");
    bench_cmd->add_option("--output", o.output, "Output directory");
    bench_cmd->add_option("--stop-after", stop_after)->group("");

    auto *report_cmd = app.add_subcommand("report", "Regenerate report files from a run directory");
    report_cmd->add_option("run_dir", run_dir)->required()->check(CLI::ExistingDirectory);

    auto *fixtures_cmd = app.add_subcommand("fixtures", "Manage recorded responses");
    fixtures_cmd->require_subcommand(1);
    auto *fixture_add = fixtures_cmd->add_subcommand("add", "Record a response for a source file and arm");
    add_common(fixture_add);
    fixture_add->add_option("--arm", arm, "baseline or cdd");
    fixture_add->add_option("--source", source_file)->required()->check(CLI::ExistingFile);
    fixture_add->add_option("--response", response_file)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*analyze)
            return cmd_analyze(file);
        if (*refactor_cmd)
            return cmd_refactor(file, arm, o);
        if (*bench_cmd)
            return cmd_bench(o, stop_after);
        if (*report_cmd)
            return cmd_report(run_dir);
        if (*fixture_add)
            return cmd_fixture_add(o, arm, source_file, response_file);
    } catch (const CLI::Error &e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const refactor::AuthError &e) {
        fmt::print(stderr, "authentication error: {}\n", e.what());
        return kAuth;
    } catch (const refactor::FixtureMiss &e) {
        fmt::print(stderr, "fixture miss: {}\n", e.what());
        return kFixtureMiss;
    } catch (const refactor::RateLimited &e) {
        fmt::print(stderr, "rate limited: {}\n", e.what());
        return kRateLimited;
    } catch (const refactor::CompletionError &e) {
        fmt::print(stderr, "transport error: {}\n", e.what());
        return kTransport;
    } catch (const verification::SetupError &e) {
        fmt::print(stderr, "setup error: {}\n", e.what());
        return kSetup;
    } catch (const pipeline::EmptyRun &e) {
        fmt::print(stderr, "{}\n", e.what());
        return kEmptyRun;
    } catch (const source_ir::SourceError &e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return kParse;
    } catch (const pipeline::ConfigError &e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kParse;
    } catch (const pipeline::RecordError &e) {
        fmt::print(stderr, "record error: {}\n", e.what());
        return kParse;
    } catch (const bench::FormatError &e) {
        fmt::print(stderr, "dataset error: {}\n", e.what());
        return kParse;
    } catch (const std::invalid_argument &e) {
        fmt::print(stderr, "invalid argument: {}\n", e.what());
        return kUsage;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kSetup;
    }
    return kUsage;
}
