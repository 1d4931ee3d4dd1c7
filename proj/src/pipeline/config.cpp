#include "cogref/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace cogref::pipeline {

ConfigError::ConfigError(const std::string &what, std::size_t line)
    : std::runtime_error(line ? fmt::format("config line {}: {}", line, what) : what), line_(line) {}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string &v, std::size_t line) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("not a number: '" + v + "'", line);
    return out;
}

double parse_real(const std::string &v, std::size_t line) {
    char *end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("not a number: '" + v + "'", line);
    return d;
}

bool parse_bool(const std::string &v, std::size_t line) {
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    throw ConfigError("not a boolean: '" + v + "'", line);
}

}  // namespace

std::vector<refactor::Arm> parse_arm_list(const std::string &text) {
    std::vector<refactor::Arm> arms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto arm = refactor::parse_arm(item);
        if (!arm)
            throw ConfigError("unknown arm '" + item + "'");
        if (std::find(arms.begin(), arms.end(), *arm) == arms.end())
            arms.push_back(*arm);
    }
    if (arms.empty())
        throw ConfigError("arm list is empty");
    return arms;
}

std::filesystem::path resolve_program(const std::filesystem::path &program) {
    if (program.has_parent_path() || program.empty())
        return program;
    const char *path = std::getenv("PATH");
    if (path == nullptr)
        return program;
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty())
            continue;
        const auto candidate = std::filesystem::path(dir) / program;
        std::error_code ec;
        if (std::filesystem::is_regular_file(candidate, ec))
            return candidate;
    }
    return program;
}

void RunConfig::validate() const {
    if (dataset_path.empty())
        throw ConfigError("dataset_path is required");
    if (workers < 1)
        throw ConfigError("workers must be at least 1");
    if (max_children < 1)
        throw ConfigError("max_children must be at least 1");
    if (arms.empty())
        throw ConfigError("no arms selected");
    if (replay && fixtures.empty())
        throw ConfigError("replay mode needs a fixtures path");
    if (dataset == bench::DatasetTag::AppsIntroductory && !seed)
        throw ConfigError("apps sampling needs an explicit seed");
    if (shim.empty())
        throw ConfigError("sandbox.shim is required");
    try {
        model.validate();
        sandbox.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const std::string &text, const std::filesystem::path &base_dir) {
    RunConfig cfg;
    auto path_of = [&](const std::string &v) {
        std::filesystem::path p(v);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };

    using Setter = std::function<void(const std::string &, std::size_t)>;
    const std::map<std::string, Setter> setters = {
        {"dataset",
         [&](const std::string &v, std::size_t ln) {
             const auto tag = bench::parse_dataset_tag(v);
             if (!tag)
                 throw ConfigError("unknown dataset '" + v + "'", ln);
             cfg.dataset = *tag;
         }},
        {"dataset_path", [&](const std::string &v, std::size_t) { cfg.dataset_path = path_of(v); }},
        {"sample_size", [&](const std::string &v, std::size_t ln) { cfg.sample_size = parse_number<std::size_t>(v, ln); }},
        {"seed", [&](const std::string &v, std::size_t ln) { cfg.seed = parse_number<std::uint64_t>(v, ln); }},
        {"arms",
         [&](const std::string &v, std::size_t ln) {
             try {
                 cfg.arms = parse_arm_list(v);
             } catch (const ConfigError &e) {
                 throw ConfigError(e.what(), ln);
             }
         }},
        {"workers", [&](const std::string &v, std::size_t ln) { cfg.workers = parse_number<std::size_t>(v, ln); }},
        {"max_children",
         [&](const std::string &v, std::size_t ln) { cfg.max_children = parse_number<std::size_t>(v, ln); }},
        {"replay", [&](const std::string &v, std::size_t ln) { cfg.replay = parse_bool(v, ln); }},
        {"fixtures", [&](const std::string &v, std::size_t) { cfg.fixtures = path_of(v); }},
        {"output", [&](const std::string &v, std::size_t) { cfg.output = path_of(v); }},
        {"validate_references",
         [&](const std::string &v, std::size_t ln) { cfg.validate_references = parse_bool(v, ln); }},
        {"model.name", [&](const std::string &v, std::size_t) { cfg.model.model = v; }},
        {"model.endpoint", [&](const std::string &v, std::size_t) { cfg.model.endpoint = v; }},
        {"model.path", [&](const std::string &v, std::size_t) { cfg.model.path = v; }},
        {"model.token_env", [&](const std::string &v, std::size_t) { cfg.model.token_env = v; }},
        {"model.auth_header", [&](const std::string &v, std::size_t) { cfg.model.auth_header = v; }},
        {"model.auth_prefix", [&](const std::string &v, std::size_t) { cfg.model.auth_prefix = v; }},
        {"model.timeout_s", [&](const std::string &v, std::size_t ln) { cfg.model.timeout_s = parse_real(v, ln); }},
        {"model.max_retries", [&](const std::string &v, std::size_t ln) { cfg.model.max_retries = parse_number<int>(v, ln); }},
        {"model.backoff_ms",
         [&](const std::string &v, std::size_t ln) { cfg.model.backoff_initial_ms = parse_number<int>(v, ln); }},
        {"model.rps", [&](const std::string &v, std::size_t ln) { cfg.model.requests_per_second = parse_real(v, ln); }},
        {"sandbox.timeout_s", [&](const std::string &v, std::size_t ln) { cfg.sandbox.timeout_s = parse_real(v, ln); }},
        {"sandbox.output_cap_bytes",
         [&](const std::string &v, std::size_t ln) { cfg.sandbox.output_cap_bytes = parse_number<std::size_t>(v, ln); }},
        {"sandbox.case_budget_s",
         [&](const std::string &v, std::size_t ln) { cfg.sandbox.case_time_budget_s = parse_real(v, ln); }},
        {"sandbox.network", [&](const std::string &v, std::size_t ln) { cfg.sandbox.network_allowed = parse_bool(v, ln); }},
        {"sandbox.interpreter", [&](const std::string &v, std::size_t) {
             const std::filesystem::path p(v);
             cfg.interpreter = p.has_parent_path() ? path_of(v) : p;
         }},
        {"sandbox.shim", [&](const std::string &v, std::size_t) { cfg.shim = path_of(v); }},
    };

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.emplace(key, lineno).second)
            throw ConfigError("duplicate key '" + key + "'", lineno);
        if (key.rfind("model.sampling.", 0) == 0 && key.size() > 15) {
            cfg.model.sampling[key.substr(15)] = value;
            continue;
        }
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("unknown key '" + key + "'", lineno);
        it->second(value, lineno);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

}  // namespace cogref::pipeline
