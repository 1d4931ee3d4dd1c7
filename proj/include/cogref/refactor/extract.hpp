#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cogref::refactor {

/// Last fenced block of the response; otherwise the longest run of lines that
/// parses on its own; nullopt if neither exists.
std::optional<std::string> extract_code(std::string_view response);

}  // namespace cogref::refactor
