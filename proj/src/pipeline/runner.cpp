#include "cogref/pipeline/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cogref/complexity/metrics.hpp"
#include "cogref/refactor/constraints.hpp"
#include "cogref/refactor/extract.hpp"
#include "cogref/refactor/prompt.hpp"
#include "cogref/similarity/codebleu.hpp"
#include "cogref/verification/taxonomy.hpp"

namespace cogref::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

RunPaths run_paths(const fs::path &root) {
    return {root, root / "records.jsonl", root / "journal.jsonl", root / "run.json", root / "prompts",
            root / "responses"};
}

std::string file_stem(const std::string &origin_id, refactor::Arm arm) {
    std::string s;
    for (char c : origin_id)
        s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_');
    return s + "." + std::string(refactor::to_string(arm));
}

std::vector<RunRecord> load_records(const fs::path &path, bool repair) {
    std::vector<RunRecord> out;
    std::error_code ec;
    if (!fs::exists(path, ec))
        return out;
    std::string content;
    {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        content = ss.str();
    }
    const auto complete = content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1;
    if (complete < content.size() && repair)
        fs::resize_file(path, complete);

    std::set<std::pair<std::string, refactor::Arm>> seen;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos < complete) {
        const auto nl = content.find('\n', pos);
        const std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (line.empty())
            continue;
        RunRecord r;
        try {
            r = record_from_json(json::parse(line));
        } catch (const std::exception &e) {
            throw RecordError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
        }
        if (!seen.emplace(r.origin_id, r.arm).second)
            throw RecordError(fmt::format("{}:{}: duplicate record for {} / {}", path.string(), lineno, r.origin_id,
                                          refactor::to_string(r.arm)));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<bench::DatasetRecord> load_dataset(const RunConfig &config) {
    if (config.dataset == bench::DatasetTag::Mbpp)
        return bench::load_mbpp(config.dataset_path);
    return bench::load_apps_introductory(config.dataset_path, config.sample_size, config.seed.value_or(0));
}

namespace {

json manifest_of(const RunConfig &c) {
    json arms = json::array();
    for (auto a : c.arms)
        arms.push_back(refactor::to_string(a));
    return {{"schema", kRecordSchemaVersion},
            {"dataset", bench::to_string(c.dataset)},
            {"dataset_file", c.dataset_path.filename().string()},
            {"sample_size", c.sample_size},
            {"seed", c.seed ? json(*c.seed) : json()},
            {"model", c.model.model},
            {"arms", arms},
            {"replay", c.replay},
            {"prompt_version", refactor::builtin_template(refactor::Arm::Baseline).version},
            {"sandbox_timeout_s", c.sandbox.timeout_s}};
}

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

json attempts_json(const std::vector<refactor::Attempt> &attempts) {
    json a = json::array();
    for (const auto &t : attempts)
        a.push_back({{"started_ms", t.started_ms}, {"finished_ms", t.finished_ms}, {"status", t.status},
                     {"error", t.error}});
    return a;
}

struct Shared {
    const RunConfig &config;
    const RunPaths &paths;
    verification::Verifier verifier;
    std::optional<refactor::FixtureStore> fixtures;
    std::shared_ptr<refactor::Transport> transport;
    refactor::RateLimiter limiter;
    refactor::SleepFn sleep;

    std::mutex sink_mutex;
    std::ofstream records;
    std::ofstream journal;
};

struct JobResult {
    RunRecord record;
    json journal;
};

JobResult run_job(Shared &sh, const bench::DatasetRecord &task, refactor::Arm arm) {
    const RunConfig &cfg = sh.config;
    JobResult res;
    RunRecord &r = res.record;
    r.origin_id = task.origin_id;
    r.dataset = std::string(bench::to_string(task.tag));
    r.arm = arm;
    r.model = cfg.model.model;
    json journal = {{"origin_id", r.origin_id}, {"arm", refactor::to_string(arm)}, {"started_ms", refactor::now_ms()}};

    const auto original = source_ir::SourceUnit::original(task.origin_id, task.reference);
    bool original_parses = true;
    try {
        r.before = complexity::unit_report(original);
    } catch (const source_ir::SourceError &e) {
        original_parses = false;
        r.original_error = e.what();
    }

    if (cfg.validate_references) {
        const auto ref = sh.verifier.verify(original, task.tests, cfg.sandbox);
        r.reference_passes = ref.verdict == verification::Verdict::Pass;
        journal["reference_ms"] = ref.duration_ms;
    }

    const std::string prompt = refactor::build_prompt(arm, task.reference);
    r.prompt_digest = refactor::FixtureStore::digest(prompt, cfg.model.model);
    const std::string stem = file_stem(task.origin_id, arm);
    write_file(sh.paths.prompts / (stem + ".txt"), prompt);

    refactor::RefactorRecord rr;
    rr.origin_id = task.origin_id;
    rr.arm = arm;
    rr.model = cfg.model.model;
    rr.prompt = prompt;
    try {
        refactor::Completion c = cfg.replay ? refactor::complete_replay(prompt, cfg.model, *sh.fixtures)
                                            : refactor::complete(prompt, cfg.model, *sh.transport, sh.limiter, sh.sleep);
        rr.raw_response = std::move(c.text);
        rr.attempts = std::move(c.attempts);
        write_file(sh.paths.responses / (stem + ".txt"), rr.raw_response);
    } catch (const refactor::AuthError &) {
        throw;
    } catch (const refactor::CompletionError &e) {
        rr.completion_error = e.what();
        rr.attempts = e.attempts();
    }
    r.completion_error = rr.completion_error;
    r.attempt_count = rr.attempt_count();
    journal["attempts"] = attempts_json(rr.attempts);

    if (rr.completion_error.empty())
        rr.extracted = refactor::extract_code(rr.raw_response);
    r.extracted = rr.extracted.has_value();

    verification::TestOutcome outcome;
    if (rr.extracted) {
        const auto candidate = source_ir::SourceUnit::refactored(task.origin_id, *rr.extracted);
        if (original_parses) {
            rr.violations = refactor::check_constraints(original, candidate, task.tests.entry_point);
            r.similarity = similarity::codebleu(original, candidate);
            try {
                r.after = complexity::unit_report(candidate);
            } catch (const source_ir::SourceError &) {
            }
        }
        r.violations = rr.violations;
        outcome = sh.verifier.verify(candidate, task.tests, cfg.sandbox);
        r.verdict = outcome.verdict;
        r.failed_case_index = outcome.failed_case_index;
        r.exception = outcome.exception;
        journal["verify_ms"] = outcome.duration_ms;
        journal["stderr_excerpt"] = outcome.stderr_excerpt;
    }
    if (r.failed())
        r.category = verification::classify_failure(rr, outcome, original);
    journal["finished_ms"] = refactor::now_ms();
    res.journal = std::move(journal);
    return res;
}

void preflight(const verification::Verifier &verifier, const verification::SandboxPolicy &policy) {
    verification::TestSpec spec;
    spec.assertions = {"assert probe() == 1"};
    const auto outcome =
        verifier.verify(source_ir::SourceUnit::original("preflight", "def probe():\n    return 1\n"), spec, policy);
    if (outcome.verdict != verification::Verdict::Pass)
        throw verification::SetupError("sandbox preflight failed: " + std::string(verification::to_string(outcome.verdict)) +
                                       (outcome.exception.empty() ? "" : " (" + outcome.exception + ")"));
}

}  // namespace

BenchSummary run_bench(const RunConfig &config, const BenchOptions &options) {
    config.validate();
    const RunPaths paths = run_paths(config.output);
    fs::create_directories(paths.prompts);
    fs::create_directories(paths.responses);

    const json manifest = manifest_of(config);
    if (fs::exists(paths.manifest)) {
        std::ifstream in(paths.manifest);
        const json old = json::parse(in);
        for (const char *key : {"dataset", "dataset_file", "model", "seed", "sample_size", "replay"})
            if (old.value(key, json()) != manifest.at(key))
                throw ConfigError(fmt::format("output directory belongs to a different run ({} differs)", key));
    } else {
        write_file(paths.manifest, manifest.dump(2) + "\n");
    }

    const std::vector<bench::DatasetRecord> tasks = load_dataset(config);
    std::set<std::pair<std::string, refactor::Arm>> done;
    for (const auto &r : load_records(paths.records, true))
        done.emplace(r.origin_id, r.arm);

    std::vector<std::pair<const bench::DatasetRecord *, refactor::Arm>> jobs;
    BenchSummary summary;
    for (const auto &t : tasks)
        for (auto arm : config.arms) {
            ++summary.total_jobs;
            if (done.count({t.origin_id, arm}))
                ++summary.skipped;
            else
                jobs.emplace_back(&t, arm);
        }

    Shared sh{config,
              paths,
              verification::Verifier(resolve_program(config.interpreter), config.shim, config.max_children),
              std::nullopt,
              nullptr,
              refactor::RateLimiter(config.model.requests_per_second),
              options.sleep,
              {},
              {},
              {}};
    if (config.replay) {
        sh.fixtures = refactor::FixtureStore::load(config.fixtures);
    } else {
        sh.transport = options.transport ? options.transport : refactor::make_http_transport();
    }
    if (jobs.empty())
        return summary;
    preflight(sh.verifier, config.sandbox);

    sh.records.open(paths.records, std::ios::binary | std::ios::app);
    sh.journal.open(paths.journal, std::ios::binary | std::ios::app);
    if (!sh.records || !sh.journal)
        throw std::runtime_error("cannot open output files in " + paths.root.string());

    const std::size_t limit = options.stop_after.value_or(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> written{0};
    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (!abort.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size() || i >= limit)
                return;
            try {
                JobResult res = run_job(sh, *jobs[i].first, jobs[i].second);
                std::lock_guard lock(sh.sink_mutex);
                sh.records << to_line(res.record) << '\n' << std::flush;
                sh.journal << res.journal.dump() << '\n' << std::flush;
                ++written;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                abort = true;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(config.workers, jobs.size()); ++w)
            pool.emplace_back(worker);
    }
    if (error)
        std::rethrow_exception(error);
    summary.written = written.load();
    summary.interrupted = summary.written < jobs.size();
    return summary;
}

}  // namespace cogref::pipeline
