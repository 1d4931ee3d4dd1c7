#include "cogref/pipeline/run_record.hpp"

#include <stdexcept>

namespace cogref::pipeline {

using nlohmann::json;

std::optional<verification::ErrorCategory> RunRecord::resolved_category() const {
    if (!failed())
        return std::nullopt;
    const verification::ErrorCategory heuristic = category.value_or(verification::ErrorCategory{});
    return verification::resolve_label(heuristic, human_label);
}

namespace {

json report_json(const complexity::ComplexityReport &r) {
    json fns = json::array();
    for (const auto &f : r.per_function)
        fns.push_back({{"name", f.name}, {"icp", f.icp}, {"cc", f.cc}, {"cogc", f.cogc}});
    return {{"functions", fns},
            {"totals", {{"icp", r.unit_totals.icp}, {"cc", r.unit_totals.cc}, {"cogc", r.unit_totals.cogc}}},
            {"empty_unit", r.empty_unit}};
}

complexity::ComplexityReport report_from(const json &j) {
    complexity::ComplexityReport r;
    for (const auto &f : j.at("functions"))
        r.per_function.push_back({f.at("name").get<std::string>(), f.at("icp").get<int>(), f.at("cc").get<int>(),
                                  f.at("cogc").get<int>()});
    const json &t = j.at("totals");
    r.unit_totals = {t.at("icp").get<int>(), t.at("cc").get<int>(), t.at("cogc").get<int>()};
    r.empty_unit = j.at("empty_unit").get<bool>();
    return r;
}

template <typename T, typename Fn>
json optional_json(const std::optional<T> &v, Fn &&fn) {
    return v ? fn(*v) : json();
}

template <typename T>
T parse_enum(const json &j, std::optional<T> (*parse)(std::string_view), const char *what) {
    const auto v = parse(j.get<std::string>());
    if (!v)
        throw std::invalid_argument(std::string("unknown ") + what + " '" + j.get<std::string>() + "'");
    return *v;
}

std::optional<verification::ErrorLabel> parse_label(std::string_view s) { return verification::parse_error_label(s); }

}  // namespace

json to_json(const RunRecord &r) {
    json violations = json::array();
    for (const auto &v : r.violations)
        violations.push_back({{"kind", refactor::to_string(v.kind)}, {"detail", v.detail}, {"lexeme", v.lexeme}});
    return {
        {"schema", r.schema},
        {"origin_id", r.origin_id},
        {"dataset", r.dataset},
        {"arm", refactor::to_string(r.arm)},
        {"model", r.model},
        {"prompt_digest", r.prompt_digest},
        {"reference_passes", optional_json(r.reference_passes, [](bool b) { return json(b); })},
        {"original_error", r.original_error},
        {"completion_error", r.completion_error},
        {"attempt_count", r.attempt_count},
        {"extracted", r.extracted},
        {"violations", violations},
        {"verdict", optional_json(r.verdict, [](auto v) { return json(verification::to_string(v)); })},
        {"failed_case_index", optional_json(r.failed_case_index, [](std::size_t i) { return json(i); })},
        {"exception", r.exception},
        {"before", optional_json(r.before, report_json)},
        {"after", optional_json(r.after, report_json)},
        {"similarity", optional_json(r.similarity,
                                     [](const similarity::SimilarityScore &s) {
                                         return json{{"total", s.total},
                                                     {"ngram", s.ngram},
                                                     {"weighted_ngram", s.weighted_ngram},
                                                     {"syntax", s.syntax},
                                                     {"dataflow", s.dataflow}};
                                     })},
        {"category", optional_json(r.category,
                                   [](const verification::ErrorCategory &c) {
                                       return json{{"label", verification::to_string(c.label)},
                                                   {"source", verification::to_string(c.source)}};
                                   })},
        {"human_label", optional_json(r.human_label, [](auto l) { return json(verification::to_string(l)); })},
    };
}

RunRecord record_from_json(const json &j) {
    try {
        RunRecord r;
        r.schema = j.at("schema").get<int>();
        if (r.schema > kRecordSchemaVersion || r.schema < 1)
            throw std::invalid_argument("unsupported record schema " + std::to_string(r.schema));
        r.origin_id = j.at("origin_id").get<std::string>();
        r.dataset = j.at("dataset").get<std::string>();
        r.arm = parse_enum(j.at("arm"), refactor::parse_arm, "arm");
        r.model = j.at("model").get<std::string>();
        r.prompt_digest = j.at("prompt_digest").get<std::string>();
        if (!j.at("reference_passes").is_null())
            r.reference_passes = j.at("reference_passes").get<bool>();
        r.original_error = j.at("original_error").get<std::string>();
        r.completion_error = j.at("completion_error").get<std::string>();
        r.attempt_count = j.at("attempt_count").get<std::size_t>();
        r.extracted = j.at("extracted").get<bool>();
        for (const auto &v : j.at("violations"))
            r.violations.push_back({parse_enum(v.at("kind"), refactor::parse_violation_kind, "violation"),
                                    v.at("detail").get<std::string>(), v.at("lexeme").get<std::string>()});
        if (!j.at("verdict").is_null())
            r.verdict = parse_enum(j.at("verdict"), verification::parse_verdict, "verdict");
        if (!j.at("failed_case_index").is_null())
            r.failed_case_index = j.at("failed_case_index").get<std::size_t>();
        r.exception = j.at("exception").get<std::string>();
        if (!j.at("before").is_null())
            r.before = report_from(j.at("before"));
        if (!j.at("after").is_null())
            r.after = report_from(j.at("after"));
        if (const json &s = j.at("similarity"); !s.is_null())
            r.similarity = similarity::SimilarityScore{s.at("total").get<double>(), s.at("ngram").get<double>(),
                                                       s.at("weighted_ngram").get<double>(),
                                                       s.at("syntax").get<double>(), s.at("dataflow").get<double>()};
        if (const json &c = j.at("category"); !c.is_null()) {
            verification::ErrorCategory cat;
            cat.label = parse_enum(c.at("label"), parse_label, "label");
            cat.source = c.at("source").get<std::string>() == "human" ? verification::LabelSource::Human
                                                                       : verification::LabelSource::Heuristic;
            r.category = cat;
        }
        if (!j.at("human_label").is_null())
            r.human_label = parse_enum(j.at("human_label"), parse_label, "label");
        return r;
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("malformed run record: ") + e.what());
    }
}

std::string to_line(const RunRecord &record) { return to_json(record).dump(); }

}  // namespace cogref::pipeline
