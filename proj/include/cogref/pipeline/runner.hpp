#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogref/bench/dataset.hpp"
#include "cogref/pipeline/config.hpp"
#include "cogref/pipeline/run_record.hpp"
#include "cogref/refactor/client.hpp"

namespace cogref::pipeline {

struct RunPaths {
    std::filesystem::path root;
    std::filesystem::path records;   // records.jsonl, deterministic content
    std::filesystem::path journal;   // journal.jsonl, timings and stderr
    std::filesystem::path manifest;  // run.json
    std::filesystem::path prompts;
    std::filesystem::path responses;
};

RunPaths run_paths(const std::filesystem::path &root);

/// Malformed persisted record (other than a torn final line).
class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyRun : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads records.jsonl. A final line without its newline is a torn append:
/// it is dropped, and cut from the file when repair is set.
std::vector<RunRecord> load_records(const std::filesystem::path &path, bool repair = false);

struct BenchOptions {
    // Live mode only; defaults to the HTTP transport. Replay never builds one.
    std::shared_ptr<refactor::Transport> transport;
    refactor::SleepFn sleep;
    // Stop once this many new records are written (simulated interruption).
    std::optional<std::size_t> stop_after;
};

struct BenchSummary {
    std::size_t total_jobs = 0;
    std::size_t skipped = 0;  // already present from an earlier run
    std::size_t written = 0;
    bool interrupted = false;
};

/// Loads the configured dataset.
std::vector<bench::DatasetRecord> load_dataset(const RunConfig &config);

/// Runs every (record, arm) job not already in the output directory.
/// AuthError and verification::SetupError abort the run; every other
/// per-job failure is recorded.
BenchSummary run_bench(const RunConfig &config, const BenchOptions &options = {});

/// Output-safe file stem for an origin id.
std::string file_stem(const std::string &origin_id, refactor::Arm arm);

}  // namespace cogref::pipeline
