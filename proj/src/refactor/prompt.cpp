#include "cogref/refactor/prompt.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cogref::refactor {

namespace detail {
extern const std::string_view kBuiltinVersion;
extern const std::string_view kBaselineTemplate;
extern const std::string_view kCddTemplate;
}  // namespace detail

std::string_view to_string(Arm arm) { return arm == Arm::Baseline ? "baseline" : "cdd"; }

std::optional<Arm> parse_arm(std::string_view text) {
    if (text == "baseline")
        return Arm::Baseline;
    if (text == "cdd")
        return Arm::Cdd;
    return std::nullopt;
}

PromptTemplate make_template(Arm arm, std::string version, std::string_view raw) {
    std::string text;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t end = raw.find('\n', pos);
        end = end == std::string_view::npos ? raw.size() : end + 1;
        const std::string_view line = raw.substr(pos, end - pos);
        if (line.substr(0, 2) != "%%")
            text.append(line);
        pos = end;
    }
    std::size_t slots = 0;
    for (std::size_t at = text.find(kSourceSlot); at != std::string::npos; at = text.find(kSourceSlot, at + 1))
        ++slots;
    if (slots != 1)
        throw std::invalid_argument("prompt template must contain exactly one " + std::string(kSourceSlot) + " slot");
    return {arm, std::move(version), std::move(text)};
}

const PromptTemplate &builtin_template(Arm arm) {
    static const PromptTemplate baseline =
        make_template(Arm::Baseline, std::string(detail::kBuiltinVersion), detail::kBaselineTemplate);
    static const PromptTemplate cdd = make_template(Arm::Cdd, std::string(detail::kBuiltinVersion), detail::kCddTemplate);
    return arm == Arm::Baseline ? baseline : cdd;
}

PromptTemplate load_template(const std::filesystem::path &dir, Arm arm, const std::string &version) {
    const auto path = dir / (std::string(to_string(arm)) + "." + version + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read prompt template " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return make_template(arm, version, ss.str());
}

std::string build_prompt(const PromptTemplate &tpl, std::string_view source) {
    std::string out = tpl.text;
    const std::size_t at = out.find(kSourceSlot);
    out.replace(at, kSourceSlot.size(), source);
    return out;
}

std::string build_prompt(Arm arm, std::string_view source) { return build_prompt(builtin_template(arm), source); }

}  // namespace cogref::refactor
