#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogref/bench/dataset.hpp"
#include "cogref/refactor/client.hpp"
#include "cogref/refactor/prompt.hpp"
#include "cogref/verification/verify.hpp"

namespace cogref::pipeline {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string &what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct RunConfig {
    bench::DatasetTag dataset = bench::DatasetTag::Mbpp;
    std::filesystem::path dataset_path;
    std::size_t sample_size = 0;  // apps only
    std::optional<std::uint64_t> seed;
    std::vector<refactor::Arm> arms{refactor::Arm::Baseline, refactor::Arm::Cdd};
    refactor::ModelConfig model;
    verification::SandboxPolicy sandbox;
    std::filesystem::path interpreter = "python3";
    std::filesystem::path shim;
    std::size_t workers = 1;
    std::size_t max_children = 4;
    bool replay = false;
    std::filesystem::path fixtures;
    std::filesystem::path output = "run";
    bool validate_references = true;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// `key = value` lines; `#` starts a comment line. Relative paths resolve
/// against base_dir. Unknown keys are errors.
RunConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

/// Comma separated arm list.
std::vector<refactor::Arm> parse_arm_list(const std::string &text);

/// Looks a bare program name up on PATH; other paths are returned unchanged.
std::filesystem::path resolve_program(const std::filesystem::path &program);

}  // namespace cogref::pipeline
