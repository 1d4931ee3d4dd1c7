#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/verification/verify.hpp"

namespace cogref::bench {

enum class DatasetTag { Mbpp, AppsIntroductory };

std::string_view to_string(DatasetTag tag);
std::optional<DatasetTag> parse_dataset_tag(std::string_view text);

struct DatasetRecord {
    std::string origin_id;
    std::string problem;
    std::string reference;
    verification::TestSpec tests;
    DatasetTag tag = DatasetTag::Mbpp;
    // Set by validate_references; nullopt until checked.
    std::optional<bool> reference_passes;
};

class FormatError : public std::runtime_error {
public:
    FormatError(const std::string &what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InsufficientRecords : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field names of one dataset layout.
struct DatasetAdapter {
    std::string id;
    std::string problem;
    std::string code;
    std::string tests;
    std::string setup;           // mbpp only
    std::string difficulty;      // apps only
    std::string input_output;    // apps only
    std::string keep_difficulty; // apps only
};

/// Adapter table shipped as data/datasets/adapters.json.
std::map<std::string, DatasetAdapter> load_adapters(const std::filesystem::path &path);
/// Built-in copy of the shipped table.
const DatasetAdapter &builtin_adapter(DatasetTag tag);

/// One JSON object per line. Throws FormatError with the 1-based line.
std::vector<DatasetRecord> load_mbpp(const std::filesystem::path &path, const DatasetAdapter &adapter =
                                                                          builtin_adapter(DatasetTag::Mbpp));

/// Keeps introductory problems, flattens their solutions and draws n of them
/// without replacement under seed.
std::vector<DatasetRecord> load_apps_introductory(
    const std::filesystem::path &path, std::size_t n, std::uint64_t seed,
    const DatasetAdapter &adapter = builtin_adapter(DatasetTag::AppsIntroductory));

/// Deterministic draw of k distinct indices from [0, n), in draw order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// Runs every reference through the verifier and records the result.
void validate_references(std::vector<DatasetRecord> &records, const verification::Verifier &verifier,
                         const verification::SandboxPolicy &policy);

/// Name of the function called by the assertions, if it is defined in code.
std::optional<std::string> find_entry_point(const std::string &code, const std::vector<std::string> &assertions);

}  // namespace cogref::bench
