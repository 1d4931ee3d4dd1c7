#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cogref::refactor {

enum class Arm { Baseline, Cdd };

std::string_view to_string(Arm arm);
std::optional<Arm> parse_arm(std::string_view text);

inline constexpr std::string_view kSourceSlot = "{{SOURCE}}";

struct PromptTemplate {
    Arm arm = Arm::Baseline;
    std::string version;
    std::string text;  // template comments already removed; exactly one slot
};

/// Drops `%%` comment lines and checks the slot count. Throws std::invalid_argument.
PromptTemplate make_template(Arm arm, std::string version, std::string_view raw);

/// Templates compiled into the binary from data/prompts.
const PromptTemplate &builtin_template(Arm arm);

/// Reads `<dir>/<arm>.<version>.txt`.
PromptTemplate load_template(const std::filesystem::path &dir, Arm arm, const std::string &version);

std::string build_prompt(const PromptTemplate &tpl, std::string_view source);
std::string build_prompt(Arm arm, std::string_view source);

}  // namespace cogref::refactor
