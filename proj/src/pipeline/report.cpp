#include "cogref/pipeline/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cogref/bench/stats.hpp"
#include "cogref/pipeline/runner.hpp"

namespace cogref::pipeline {

namespace fs = std::filesystem;
using bench::format_fixed2;
using refactor::Arm;

std::string significance_stars(double p) {
    if (p < 0.0001)
        return "****";
    if (p < 0.001)
        return "***";
    if (p < 0.01)
        return "**";
    if (p < 0.05)
        return "*";
    return "NS";
}

namespace {

struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string text() const {
        std::vector<std::size_t> width(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) {
            width[c] = header[c].size();
            for (const auto &r : rows)
                width[c] = std::max(width[c], r[c].size());
        }
        auto line = [&](const std::vector<std::string> &cells) {
            std::string s;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                s += c ? "  " : "";
                s += c + 1 < cells.size() ? fmt::format("{:<{}}", cells[c], width[c]) : cells[c];
            }
            return s + "\n";
        };
        std::string out = "== " + title + " ==\n" + line(header);
        for (const auto &r : rows)
            out += line(r);
        return out;
    }

    std::string csv() const {
        auto field = [](const std::string &v) {
            if (v.find_first_of(",\"\n") == std::string::npos)
                return v;
            std::string q = "\"";
            for (char c : v)
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
        };
        auto line = [&](const std::vector<std::string> &cells) {
            std::string s;
            for (std::size_t c = 0; c < cells.size(); ++c)
                s += (c ? "," : "") + field(cells[c]);
            return s + "\n";
        };
        std::string out = line(header);
        for (const auto &r : rows)
            out += line(r);
        return out;
    }
};

struct Group {
    std::string dataset;
    std::string model;
    std::vector<const RunRecord *> records;

    std::size_t corpus_size() const {
        std::set<std::string> ids;
        for (const auto *r : records)
            ids.insert(r->origin_id);
        return ids.size();
    }

    std::vector<const RunRecord *> arm(Arm a) const {
        std::vector<const RunRecord *> out;
        for (const auto *r : records)
            if (r->arm == a)
                out.push_back(r);
        return out;
    }
};

std::string pct(long count, std::size_t n) { return format_fixed2(100.0 * static_cast<double>(count) / static_cast<double>(n)); }

long failures(const std::vector<const RunRecord *> &rs) {
    return std::count_if(rs.begin(), rs.end(), [](const RunRecord *r) { return r->failed(); });
}

const std::vector<Arm> kArms{Arm::Baseline, Arm::Cdd};

Table correctness(const std::vector<Group> &groups) {
    Table t{"Correctness",
            {"dataset", "model", "n", "ref_flagged", "baseline_fail", "baseline_pct", "cdd_fail", "cdd_pct",
             "change_pct", "reduction_pct"},
            {}};
    for (const auto &g : groups) {
        const std::size_t n = g.corpus_size();
        std::set<std::string> flagged;
        for (const auto *r : g.records)
            if (r->reference_passes == false)
                flagged.insert(r->origin_id);
        const auto base = g.arm(Arm::Baseline);
        const auto cdd = g.arm(Arm::Cdd);
        const long fb = failures(base);
        const long fc = failures(cdd);
        std::vector<std::string> row{g.dataset, g.model, std::to_string(n), std::to_string(flagged.size())};
        row.push_back(base.empty() ? "n/a" : std::to_string(fb));
        row.push_back(base.empty() ? "n/a" : pct(fb, n));
        row.push_back(cdd.empty() ? "n/a" : std::to_string(fc));
        row.push_back(cdd.empty() ? "n/a" : pct(fc, n));
        if (base.empty() || cdd.empty()) {
            row.insert(row.end(), {"n/a", "n/a"});
        } else {
            row.push_back(pct(fc - fb, n));
            try {
                row.push_back(format_fixed2(bench::reduction_rate(fb, fc)));
            } catch (const bench::UndefinedRate &) {
                row.push_back("undefined");
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table complexity_table(const std::vector<Group> &groups) {
    Table t{"Complexity",
            {"dataset", "model", "metric", "arm", "pairs", "decrease", "decrease_pct", "increase", "increase_pct",
             "net", "net_pct", "p", "sig", "method", "cliffs_delta", "magnitude"},
            {}};
    struct Metric {
        const char *name;
        int complexity::MetricTotals::*field;
    };
    for (const auto &g : groups) {
        const std::size_t n = g.corpus_size();
        for (const Metric m : {Metric{"CogC", &complexity::MetricTotals::cogc}, Metric{"CC", &complexity::MetricTotals::cc}}) {
            for (Arm arm : kArms) {
                const auto rs = g.arm(arm);
                if (rs.empty())
                    continue;
                bench::PairedSample sample;
                long dec = 0;
                long inc = 0;
                for (const auto *r : rs) {
                    if (!r->before || !r->after)
                        continue;
                    const int b = r->before->unit_totals.*m.field;
                    const int a = r->after->unit_totals.*m.field;
                    sample.add(r->origin_id, b, a);
                    const auto d = complexity::delta_class(b, a);
                    dec += d == complexity::DeltaClass::Decrease;
                    inc += d == complexity::DeltaClass::Increase;
                }
                std::vector<std::string> row{g.dataset, g.model, m.name, std::string(refactor::to_string(arm)),
                                             std::to_string(sample.size())};
                const auto net = bench::net_effect(dec, inc, static_cast<long>(n));
                row.insert(row.end(), {std::to_string(dec), pct(dec, n), std::to_string(inc), pct(inc, n),
                                       std::to_string(net.net), format_fixed2(net.net_pct)});
                if (sample.size() == 0) {
                    row.insert(row.end(), {"n/a", "n/a", "n/a", "n/a", "n/a"});
                } else {
                    const auto w = bench::wilcoxon_signed_rank(sample);
                    const auto cd = bench::cliffs_delta(sample.before, sample.after);
                    row.insert(row.end(), {fmt::format("{:.4e}", w.p), significance_stars(w.p),
                                           std::string(bench::to_string(w.method)), fmt::format("{:.3f}", cd.delta),
                                           std::string(bench::to_string(cd.magnitude))});
                }
                t.rows.push_back(std::move(row));
            }
        }
    }
    return t;
}

Table similarity_table(const std::vector<Group> &groups) {
    Table t{"Similarity (CodeBLEU)", {"dataset", "model", "arm", "n", "q1", "median", "q3"}, {}};
    for (const auto &g : groups)
        for (Arm arm : kArms) {
            const auto rs = g.arm(arm);
            if (rs.empty())
                continue;
            std::vector<double> scores;
            for (const auto *r : rs)
                if (r->similarity)
                    scores.push_back(r->similarity->total);
            std::vector<std::string> row{g.dataset, g.model, std::string(refactor::to_string(arm)),
                                         std::to_string(scores.size())};
            if (scores.empty()) {
                row.insert(row.end(), {"n/a", "n/a", "n/a"});
            } else {
                const auto q = bench::quartile_summary(scores);
                row.insert(row.end(), {fmt::format("{:.4f}", q.q1), fmt::format("{:.4f}", q.median),
                                       fmt::format("{:.4f}", q.q3)});
            }
            t.rows.push_back(std::move(row));
        }
    return t;
}

const std::vector<verification::ErrorLabel> kLabels{
    verification::ErrorLabel::LogicAlteration, verification::ErrorLabel::SmallValueDiscrepancy,
    verification::ErrorLabel::FunctionSignatureChange, verification::ErrorLabel::ConditionalLogicIssue,
    verification::ErrorLabel::Miscellaneous};

Table taxonomy_table(const std::vector<Group> &groups) {
    Table t{"Error categories", {"dataset", "model", "arm"}, {}};
    for (auto l : kLabels)
        t.header.emplace_back(verification::to_string(l));
    t.header.insert(t.header.end(), {"total", "human_labelled"});
    for (const auto &g : groups)
        for (Arm arm : kArms) {
            const auto rs = g.arm(arm);
            if (rs.empty())
                continue;
            std::map<verification::ErrorLabel, long> counts;
            long total = 0;
            long human = 0;
            for (const auto *r : rs)
                if (const auto c = r->resolved_category()) {
                    ++counts[c->label];
                    ++total;
                    human += c->source == verification::LabelSource::Human;
                }
            std::vector<std::string> row{g.dataset, g.model, std::string(refactor::to_string(arm))};
            for (auto l : kLabels)
                row.push_back(std::to_string(counts[l]));
            row.insert(row.end(), {std::to_string(total), std::to_string(human)});
            t.rows.push_back(std::move(row));
        }
    return t;
}

Table failure_table(const std::vector<RunRecord> &records) {
    Table t{"Failures", {"origin_id", "arm", "verdict", "failed_case", "label", "source"}, {}};
    for (const auto &r : records) {
        const auto c = r.resolved_category();
        if (!c)
            continue;
        std::string verdict = r.verdict ? std::string(verification::to_string(*r.verdict))
                                        : (r.completion_error.empty() ? "no_code" : "no_response");
        t.rows.push_back({r.origin_id, std::string(refactor::to_string(r.arm)), verdict,
                          r.failed_case_index ? std::to_string(*r.failed_case_index) : "-",
                          std::string(verification::to_string(c->label)),
                          std::string(verification::to_string(c->source))});
    }
    return t;
}

}  // namespace

Report build_report(std::vector<RunRecord> records, const std::string &provenance) {
    if (records.empty())
        throw EmptyRun("no run records to report on");
    std::sort(records.begin(), records.end(), [](const RunRecord &a, const RunRecord &b) {
        return std::tie(a.dataset, a.model, a.origin_id, a.arm) < std::tie(b.dataset, b.model, b.origin_id, b.arm);
    });
    std::vector<Group> groups;
    for (const auto &r : records) {
        if (groups.empty() || groups.back().dataset != r.dataset || groups.back().model != r.model)
            groups.push_back({r.dataset, r.model, {}});
        groups.back().records.push_back(&r);
    }

    const std::vector<std::pair<std::string, Table>> tables{
        {"correctness.csv", correctness(groups)},
        {"complexity.csv", complexity_table(groups)},
        {"similarity.csv", similarity_table(groups)},
        {"taxonomy.csv", taxonomy_table(groups)},
        {"failures.csv", failure_table(records)},
    };

    Report rep;
    std::string text = "# cogref report\n";
    text += provenance;
    text += fmt::format("records: {}\nrecord_schema: {}\n", records.size(), kRecordSchemaVersion);
    text += "complexity pairs: parseable refactorings only; percentages use the task count\n";
    for (const auto &[file, table] : tables) {
        text += "\n" + table.text();
        rep.files[file] = table.csv();
    }
    rep.files["report.txt"] = text;
    return rep;
}

Report write_report(const fs::path &run_dir) {
    const RunPaths paths = run_paths(run_dir);
    std::vector<RunRecord> records = load_records(paths.records);
    std::string provenance;
    if (fs::exists(paths.manifest)) {
        std::ifstream in(paths.manifest);
        const auto manifest = nlohmann::json::parse(in);
        for (const auto &[key, value] : manifest.items())
            provenance += fmt::format("{}: {}\n", key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    Report rep = build_report(std::move(records), provenance);
    for (const auto &[file, content] : rep.files) {
        std::ofstream out(run_dir / file, std::ios::binary | std::ios::trunc);
        out << content;
    }
    return rep;
}

}  // namespace cogref::pipeline
