#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::verification {

enum class TestStyle { AssertList, StdinStdout };

std::string_view to_string(TestStyle style);
std::optional<TestStyle> parse_test_style(std::string_view text);

struct IoCase {
    std::string input;
    std::string expected;
};

struct TestSpec {
    TestStyle style = TestStyle::AssertList;
    std::vector<std::string> assertions;  // assert_list
    std::vector<IoCase> io_cases;         // stdin_stdout
    std::optional<std::string> entry_point;
    std::string setup;  // executed after the candidate, before the assertions

    /// Throws std::invalid_argument unless exactly the field matching the style is populated.
    void validate() const;
};

struct SandboxPolicy {
    double timeout_s = 10.0;
    std::size_t output_cap_bytes = 1 << 20;
    bool network_allowed = false;  // must stay false
    double case_time_budget_s = 0.0;  // 0: only the wall-clock timeout applies

    void validate() const;
};

enum class Verdict { Pass, Fail, RuntimeError, Timeout, SetupError };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

struct TestOutcome {
    Verdict verdict = Verdict::SetupError;
    std::optional<std::size_t> failed_case_index;  // Fail only
    std::string exception;  // shim-reported failure or exception text
    std::string stderr_excerpt;
    long duration_ms = 0;
};

/// Raised when the interpreter or shim cannot be launched at all.
class SetupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exit status the shim uses for its own faults.
inline constexpr int kShimFaultExit = 70;

/// Normalises trailing whitespace on every line and the final newline.
std::string normalize_output(std::string_view text);

/// Runs candidates through the shim, one child process per call, at most
/// max_children at a time.
class Verifier {
public:
    Verifier(std::filesystem::path interpreter, std::filesystem::path shim, std::size_t max_children = 4);
    ~Verifier();
    Verifier(const Verifier &) = delete;
    Verifier &operator=(const Verifier &) = delete;

    /// Returns a SetupError outcome (never throws) when the shim cannot run.
    TestOutcome verify(const source_ir::SourceUnit &candidate, const TestSpec &spec,
                       const SandboxPolicy &policy = {}) const;

    /// Manifest document sent to the shim.
    static std::string manifest(const source_ir::SourceUnit &candidate, const TestSpec &spec,
                                const SandboxPolicy &policy);

private:
    struct Slots;
    std::filesystem::path interpreter_;
    std::filesystem::path shim_;
    std::unique_ptr<Slots> slots_;
};

}  // namespace cogref::verification
