#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogref/complexity/metrics.hpp"
#include "cogref/refactor/constraints.hpp"
#include "cogref/refactor/prompt.hpp"
#include "cogref/similarity/codebleu.hpp"
#include "cogref/verification/taxonomy.hpp"
#include "cogref/verification/verify.hpp"

namespace cogref::pipeline {

inline constexpr int kRecordSchemaVersion = 1;

/// One persisted line per (origin_id, arm). Holds nothing time-dependent.
struct RunRecord {
    int schema = kRecordSchemaVersion;
    std::string origin_id;
    std::string dataset;
    refactor::Arm arm = refactor::Arm::Baseline;
    std::string model;
    std::string prompt_digest;
    std::optional<bool> reference_passes;
    std::string original_error;  // original did not parse
    std::string completion_error;
    std::size_t attempt_count = 0;
    bool extracted = false;
    std::vector<refactor::ConstraintViolation> violations;
    std::optional<verification::Verdict> verdict;  // nullopt: no candidate to run
    std::optional<std::size_t> failed_case_index;
    std::string exception;
    std::optional<complexity::ComplexityReport> before;
    std::optional<complexity::ComplexityReport> after;  // nullopt: candidate missing or unparseable
    std::optional<similarity::SimilarityScore> similarity;
    std::optional<verification::ErrorCategory> category;  // failures only
    std::optional<verification::ErrorLabel> human_label;

    bool failed() const noexcept { return !verdict || *verdict != verification::Verdict::Pass; }
    /// Heuristic label with the human override applied; nullopt for passes.
    std::optional<verification::ErrorCategory> resolved_category() const;
};

nlohmann::json to_json(const RunRecord &record);
/// Throws std::invalid_argument on malformed documents or a newer schema.
RunRecord record_from_json(const nlohmann::json &doc);

std::string to_line(const RunRecord &record);  // compact JSON, no newline

}  // namespace cogref::pipeline
