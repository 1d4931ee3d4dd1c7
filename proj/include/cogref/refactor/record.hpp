#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogref/refactor/client.hpp"
#include "cogref/refactor/constraints.hpp"
#include "cogref/refactor/prompt.hpp"

namespace cogref::refactor {

/// One refactoring attempt for a (task, arm, model) triple.
struct RefactorRecord {
    std::string origin_id;
    Arm arm = Arm::Baseline;
    std::string model;
    std::string prompt;
    std::string raw_response;
    std::optional<std::string> extracted;  // nullopt: extraction failed
    std::vector<ConstraintViolation> violations;
    std::vector<Attempt> attempts;
    std::string completion_error;  // non-empty when no response was obtained

    std::size_t attempt_count() const noexcept { return attempts.size(); }
};

}  // namespace cogref::refactor
