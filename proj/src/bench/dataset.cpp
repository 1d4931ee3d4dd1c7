#include "cogref/bench/dataset.hpp"

#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cogref/source_ir/token.hpp"

namespace cogref::bench {

using nlohmann::json;

std::string_view to_string(DatasetTag tag) {
    switch (tag) {
        case DatasetTag::Mbpp: return "mbpp";
        case DatasetTag::AppsIntroductory: return "apps_introductory";
    }
    return "unknown";
}

std::optional<DatasetTag> parse_dataset_tag(std::string_view text) {
    if (text == "mbpp")
        return DatasetTag::Mbpp;
    if (text == "apps_introductory")
        return DatasetTag::AppsIntroductory;
    return std::nullopt;
}

FormatError::FormatError(const std::string &what, std::size_t line)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

DatasetAdapter adapter_from_json(const json &j) {
    auto field = [&](const char *key) { return j.contains(key) ? j.at(key).get<std::string>() : std::string(); };
    DatasetAdapter a;
    a.id = field("id");
    a.problem = field("problem");
    a.code = field("code");
    a.tests = field("tests");
    a.setup = field("setup");
    a.difficulty = field("difficulty");
    a.input_output = field("input_output");
    a.keep_difficulty = field("keep_difficulty");
    return a;
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path &path, Fn &&fn) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open dataset " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw FormatError(std::string("malformed JSON: ") + e.what(), lineno);
        }
        if (!j.is_object())
            throw FormatError("record is not an object", lineno);
        try {
            fn(j, lineno);
        } catch (const json::exception &e) {
            throw FormatError(e.what(), lineno);
        }
    }
}

const json &required(const json &j, const std::string &key, std::size_t lineno) {
    if (key.empty() || !j.contains(key))
        throw FormatError("missing field '" + key + "'", lineno);
    return j.at(key);
}

std::string id_text(const json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Some dumps store nested JSON as a string.
json maybe_decode(const json &v, std::size_t lineno) {
    if (!v.is_string())
        return v;
    const auto &s = v.get_ref<const std::string &>();
    if (s.empty())
        return json();
    try {
        return json::parse(s);
    } catch (const json::parse_error &) {
        throw FormatError("embedded JSON field is malformed", lineno);
    }
}

std::string python_string(const std::string &s) {
    std::string out = "'";
    for (unsigned char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20)
                    out += fmt::format("\\x{:02x}", c);
                else
                    out.push_back(static_cast<char>(c));
        }
    }
    return out + "'";
}

std::string python_literal(const json &v) {
    switch (v.type()) {
        case json::value_t::null: return "None";
        case json::value_t::boolean: return v.get<bool>() ? "True" : "False";
        case json::value_t::string: return python_string(v.get<std::string>());
        case json::value_t::array: {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? ", " : "") + python_literal(v[i]);
            return out + "]";
        }
        case json::value_t::object: {
            std::string out = "{";
            bool first = true;
            for (const auto &[k, val] : v.items()) {
                out += (first ? "" : ", ") + python_string(k) + ": " + python_literal(val);
                first = false;
            }
            return out + "}";
        }
        default: return v.dump();
    }
}

std::set<std::string> defined_functions(const std::string &code) {
    std::set<std::string> names;
    try {
        const auto stream = source_ir::tokenize(code);
        for (std::size_t i = 0; i + 1 < stream.tokens.size(); ++i)
            if (stream.tokens[i].lexeme == "def" && stream.tokens[i + 1].cls == source_ir::TokenClass::Identifier)
                names.insert(stream.tokens[i + 1].lexeme);
    } catch (const source_ir::SourceError &) {
    }
    return names;
}

bool defines_class(const std::string &code, const std::string &name) {
    try {
        const auto stream = source_ir::tokenize(code);
        for (std::size_t i = 0; i + 1 < stream.tokens.size(); ++i)
            if (stream.tokens[i].lexeme == "class" && stream.tokens[i + 1].lexeme == name)
                return true;
    } catch (const source_ir::SourceError &) {
    }
    return false;
}

struct AppsProblem {
    std::string id;
    std::string question;
    std::vector<std::string> solutions;
    verification::TestSpec tests;
};

verification::TestSpec apps_tests(const json &io, const std::vector<std::string> &solutions, std::size_t lineno) {
    if (!io.is_object() || !io.contains("inputs") || !io.contains("outputs"))
        throw FormatError("input_output needs inputs and outputs", lineno);
    const json &inputs = io.at("inputs");
    const json &outputs = io.at("outputs");
    if (!inputs.is_array() || !outputs.is_array() || inputs.size() != outputs.size())
        throw FormatError("inputs and outputs must be arrays of equal length", lineno);

    verification::TestSpec spec;
    if (io.contains("fn_name") && io.at("fn_name").is_string()) {
        const std::string fn = io.at("fn_name").get<std::string>();
        const bool method = !solutions.empty() && defines_class(solutions.front(), "Solution");
        const std::string callee = method ? "Solution()." + fn : fn;
        spec.style = verification::TestStyle::AssertList;
        spec.entry_point = fn;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const json &args = inputs[i];
            // single expected values are often wrapped in a one-element list
            const json &want = outputs[i].is_array() && outputs[i].size() == 1 ? outputs[i][0] : outputs[i];
            std::string call_args;
            if (args.is_array()) {
                for (std::size_t k = 0; k < args.size(); ++k)
                    call_args += (k ? ", " : "") + python_literal(args[k]);
            } else {
                call_args = python_literal(args);
            }
            spec.assertions.push_back(fmt::format("assert {}({}) == {}", callee, call_args, python_literal(want)));
        }
        return spec;
    }
    spec.style = verification::TestStyle::StdinStdout;
    auto text_of = [&](const json &v) {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto &line : v)
                s += (line.is_string() ? line.get<std::string>() : line.dump()) + "\n";
            return s;
        }
        return v.dump();
    };
    for (std::size_t i = 0; i < inputs.size(); ++i)
        spec.io_cases.push_back({text_of(inputs[i]), text_of(outputs[i])});
    return spec;
}

std::uint64_t bounded(std::mt19937_64 &rng, std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased and identical across standard libraries
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

std::map<std::string, DatasetAdapter> load_adapters(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open adapter table " + path.string());
    const json doc = json::parse(in);
    std::map<std::string, DatasetAdapter> out;
    for (const auto &[name, spec] : doc.items())
        out.emplace(name, adapter_from_json(spec));
    return out;
}

const DatasetAdapter &builtin_adapter(DatasetTag tag) {
    static const DatasetAdapter mbpp{"task_id", "text", "code", "test_list", "test_setup_code", "", "", ""};
    static const DatasetAdapter apps{"problem_id", "question", "solutions", "", "", "difficulty", "input_output",
                                     "introductory"};
    return tag == DatasetTag::Mbpp ? mbpp : apps;
}

std::optional<std::string> find_entry_point(const std::string &code, const std::vector<std::string> &assertions) {
    const auto defined = defined_functions(code);
    for (const auto &a : assertions) {
        try {
            const auto stream = source_ir::tokenize(a);
            for (std::size_t i = 0; i + 1 < stream.tokens.size(); ++i) {
                const auto &t = stream.tokens[i];
                if (t.cls == source_ir::TokenClass::Identifier && stream.tokens[i + 1].lexeme == "(" &&
                    defined.count(t.lexeme) && (i == 0 || stream.tokens[i - 1].lexeme != "."))
                    return t.lexeme;
            }
        } catch (const source_ir::SourceError &) {
        }
    }
    return std::nullopt;
}

std::vector<DatasetRecord> load_mbpp(const std::filesystem::path &path, const DatasetAdapter &adapter) {
    std::vector<DatasetRecord> out;
    std::set<std::string> seen;
    for_each_jsonl(path, [&](const json &j, std::size_t lineno) {
        DatasetRecord r;
        r.tag = DatasetTag::Mbpp;
        r.origin_id = "mbpp-" + id_text(required(j, adapter.id, lineno));
        if (!seen.insert(r.origin_id).second)
            throw FormatError("duplicate id " + r.origin_id, lineno);
        r.problem = required(j, adapter.problem, lineno).get<std::string>();
        r.reference = required(j, adapter.code, lineno).get<std::string>();
        const json &tests = required(j, adapter.tests, lineno);
        if (!tests.is_array() || tests.empty())
            throw FormatError("test list must be a non-empty array", lineno);
        r.tests.style = verification::TestStyle::AssertList;
        for (const auto &t : tests)
            r.tests.assertions.push_back(t.get<std::string>());
        if (!adapter.setup.empty() && j.contains(adapter.setup) && j.at(adapter.setup).is_string())
            r.tests.setup = j.at(adapter.setup).get<std::string>();
        r.tests.entry_point = find_entry_point(r.reference, r.tests.assertions);
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n)
        throw InsufficientRecords(fmt::format("requested {} of {} records", k, n));
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(bounded(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::vector<DatasetRecord> load_apps_introductory(const std::filesystem::path &path, std::size_t n,
                                                  std::uint64_t seed, const DatasetAdapter &adapter) {
    std::vector<DatasetRecord> flat;
    for_each_jsonl(path, [&](const json &j, std::size_t lineno) {
        if (!adapter.difficulty.empty()) {
            const json &diff = required(j, adapter.difficulty, lineno);
            if (!diff.is_string() || diff.get<std::string>() != adapter.keep_difficulty)
                return;
        }
        const std::string id = id_text(required(j, adapter.id, lineno));
        const std::string question = required(j, adapter.problem, lineno).get<std::string>();
        const json sols = maybe_decode(required(j, adapter.code, lineno), lineno);
        if (!sols.is_array())
            throw FormatError("solutions must be an array", lineno);
        std::vector<std::string> solutions;
        for (const auto &s : sols)
            solutions.push_back(s.get<std::string>());
        const json io = maybe_decode(required(j, adapter.input_output, lineno), lineno);
        const verification::TestSpec spec = apps_tests(io, solutions, lineno);
        for (std::size_t k = 0; k < solutions.size(); ++k) {
            DatasetRecord r;
            r.tag = DatasetTag::AppsIntroductory;
            r.origin_id = fmt::format("apps-{}-s{}", id, k);
            r.problem = question;
            r.reference = solutions[k];
            r.tests = spec;
            flat.push_back(std::move(r));
        }
    });
    if (flat.size() < n)
        throw InsufficientRecords(fmt::format("only {} introductory solutions available, {} requested", flat.size(), n));
    std::vector<DatasetRecord> out;
    out.reserve(n);
    for (std::size_t idx : sample_indices(flat.size(), n, seed))
        out.push_back(flat[idx]);
    return out;
}

void validate_references(std::vector<DatasetRecord> &records, const verification::Verifier &verifier,
                         const verification::SandboxPolicy &policy) {
    for (auto &r : records) {
        const auto outcome = verifier.verify(source_ir::SourceUnit::original(r.origin_id, r.reference), r.tests, policy);
        r.reference_passes = outcome.verdict == verification::Verdict::Pass;
    }
}

}  // namespace cogref::bench
