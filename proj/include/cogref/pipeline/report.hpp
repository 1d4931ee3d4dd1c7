#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cogref/pipeline/run_record.hpp"

namespace cogref::pipeline {

/// Rendered report files, keyed by file name.
struct Report {
    std::map<std::string, std::string> files;
};

/// Significance marker for a p-value: NS, *, **, ***, ****.
std::string significance_stars(double p);

/// Builds every table from the records alone; input order does not matter.
/// provenance is printed verbatim at the top of report.txt. Throws EmptyRun.
Report build_report(std::vector<RunRecord> records, const std::string &provenance = {});

/// Reads records.jsonl and run.json in run_dir, writes the report files there.
Report write_report(const std::filesystem::path &run_dir);

}  // namespace cogref::pipeline
