#include "cogref/refactor/extract.hpp"

#include <vector>

#include "cogref/source_ir/ir.hpp"

namespace cogref::refactor {

namespace {

constexpr std::size_t kMaxScanLines = 400;

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    return s;
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

std::string join(const std::vector<std::string_view> &lines, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        out.append(lines[i]);
        out.push_back('\n');
    }
    return out;
}

std::optional<std::string> last_fenced_block(const std::vector<std::string_view> &lines) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while (i < lines.size()) {
        if (trim_left(lines[i]).substr(0, 3) != "```") {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < lines.size() && trim_left(lines[j]).substr(0, 3) != "```")
            ++j;
        found = join(lines, i + 1, j);
        i = j + 1;
    }
    return found;
}

bool substantive(const source_ir::SyntaxNode &module) {
    for (const auto &stmt : module.children) {
        if (stmt.kind != source_ir::NodeKind::ExprStmt)
            return true;
        const auto &e = stmt.children.front();
        if (e.kind != source_ir::NodeKind::Name && e.kind != source_ir::NodeKind::Constant &&
            e.kind != source_ir::NodeKind::Number && e.kind != source_ir::NodeKind::String)
            return true;
    }
    return false;
}

bool parses(const std::string &text) {
    try {
        const auto parsed =
            source_ir::parse_unit(source_ir::SourceUnit::refactored("", text), source_ir::ParseOptions{true});
        return substantive(parsed.module);
    } catch (const source_ir::SourceError &) {
        return false;
    }
}

std::optional<std::string> longest_parsing_run(const std::vector<std::string_view> &lines) {
    const std::size_t n = std::min(lines.size(), kMaxScanLines);
    std::size_t best_b = 0;
    std::size_t best_e = 0;
    for (std::size_t b = 0; b < n; ++b) {
        if (is_blank(lines[b]) || lines[b].front() == ' ' || lines[b].front() == '\t')
            continue;
        for (std::size_t e = n; e > b && e - b > best_e - best_b; --e) {
            if (is_blank(lines[e - 1]))
                continue;
            if (parses(join(lines, b, e))) {
                best_b = b;
                best_e = e;
                break;
            }
        }
    }
    if (best_e == best_b)
        return std::nullopt;
    return join(lines, best_b, best_e);
}

}  // namespace

std::optional<std::string> extract_code(std::string_view response) {
    const auto lines = split_lines(response);
    if (auto fenced = last_fenced_block(lines))
        return fenced;
    return longest_parsing_run(lines);
}

}  // namespace cogref::refactor
