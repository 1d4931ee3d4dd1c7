#include "cogref/similarity/codebleu.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>

namespace cogref::similarity {

using source_ir::Token;
using source_ir::TokenClass;

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> grams(const std::vector<Token> &toks, std::size_t n) {
    std::map<Gram, std::size_t> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        Gram g;
        for (std::size_t k = 0; k < n; ++k)
            g.push_back(toks[i + k].lexeme);
        ++out[g];
    }
    return out;
}

// Unigram weights follow the hypothesis token class.
double bleu(const std::vector<Token> &ref, const std::vector<Token> &hyp, int n_max, double keyword_weight) {
    if (hyp.empty() || n_max < 1)
        return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto h = grams(hyp, static_cast<std::size_t>(n));
        const auto r = grams(ref, static_cast<std::size_t>(n));
        double matched = 0.0;
        double total = 0.0;
        if (n == 1) {
            std::map<std::string, double> weight;
            for (const auto &t : hyp)
                weight[t.lexeme] = t.cls == TokenClass::Keyword ? keyword_weight : 1.0;
            for (const auto &[g, count] : h) {
                const double w = weight[g.front()];
                auto it = r.find(g);
                const std::size_t clipped = it == r.end() ? 0 : std::min(count, it->second);
                matched += w * static_cast<double>(clipped);
                total += w * static_cast<double>(count);
            }
            if (matched == 0.0)
                return 0.0;
        } else {
            for (const auto &[g, count] : h) {
                auto it = r.find(g);
                if (it != r.end())
                    matched += static_cast<double>(std::min(count, it->second));
                total += static_cast<double>(count);
            }
            if (matched == 0.0) {
                matched = 1.0;
                total += 1.0;
            }
        }
        log_sum += std::log(matched / total);
    }
    const double c = static_cast<double>(hyp.size());
    const double r = static_cast<double>(ref.size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return std::clamp(bp * std::exp(log_sum / n_max), 0.0, 1.0);
}

std::optional<ParsedUnit> try_parse(const SourceUnit &unit) {
    try {
        return source_ir::parse_unit(unit);
    } catch (const source_ir::SourceError &) {
        return std::nullopt;
    }
}

TokenStream strip_docstrings(const ParsedUnit &parsed) {
    const std::vector<std::size_t> doc = source_ir::docstring_tokens(parsed);
    TokenStream out;
    for (std::size_t i = 0; i < parsed.tokens.tokens.size(); ++i)
        if (!std::binary_search(doc.begin(), doc.end(), i))
            out.tokens.push_back(parsed.tokens.tokens[i]);
    return out;
}

}  // namespace

void CodeBleuWeights::validate() const {
    if (ngram < 0 || weighted_ngram < 0 || syntax < 0 || dataflow < 0)
        throw std::invalid_argument("CodeBLEU weights must be non-negative");
    if (std::abs(ngram + weighted_ngram + syntax + dataflow - 1.0) > 1e-9)
        throw std::invalid_argument("CodeBLEU weights must sum to 1");
}

double ngram_match(const TokenStream &ref, const TokenStream &hyp, int n_max) {
    return bleu(ref.tokens, hyp.tokens, n_max, 1.0);
}

double weighted_ngram_match(const TokenStream &ref, const TokenStream &hyp, double keyword_weight, int n_max) {
    return bleu(ref.tokens, hyp.tokens, n_max, keyword_weight);
}

double syntax_match(const ParsedUnit &ref, const ParsedUnit &hyp) {
    const auto r = source_ir::subtree_multiset(ref);
    const std::size_t total = source_ir::multiset_size(r);
    if (total == 0)
        return 1.0;
    return static_cast<double>(source_ir::multiset_intersection_size(r, source_ir::subtree_multiset(hyp))) /
           static_cast<double>(total);
}

std::map<DataflowKey, std::size_t> dataflow_multiset(const ParsedUnit &unit) {
    std::map<DataflowKey, std::size_t> out;
    for (const auto &fn : unit.functions) {
        const auto pairs = source_ir::extract_def_use(fn);
        std::map<std::string, std::set<std::size_t>> defs;
        for (const auto &p : pairs)
            defs[p.variable].insert(p.def_site);
        for (const auto &p : pairs) {
            const auto &sites = defs[p.variable];
            const auto ordinal = static_cast<std::size_t>(std::distance(sites.begin(), sites.find(p.def_site)));
            ++out[{p.variable, ordinal}];
        }
    }
    return out;
}

double dataflow_match(const ParsedUnit &ref, const ParsedUnit &hyp) {
    const auto r = dataflow_multiset(ref);
    std::size_t total = 0;
    for (const auto &[k, c] : r)
        total += c;
    if (total == 0)
        return 1.0;
    const auto h = dataflow_multiset(hyp);
    std::size_t matched = 0;
    for (const auto &[k, c] : r) {
        auto it = h.find(k);
        if (it != h.end())
            matched += std::min(c, it->second);
    }
    return static_cast<double>(matched) / static_cast<double>(total);
}

double syntax_match(const SourceUnit &ref, const SourceUnit &hyp) {
    const ParsedUnit r = source_ir::parse_unit(ref);
    const auto h = try_parse(hyp);
    return h ? syntax_match(r, *h) : 0.0;
}

double dataflow_match(const SourceUnit &ref, const SourceUnit &hyp) {
    const ParsedUnit r = source_ir::parse_unit(ref);
    const auto h = try_parse(hyp);
    return h ? dataflow_match(r, *h) : 0.0;
}

TokenStream scoring_tokens(const SourceUnit &unit) {
    if (auto parsed = try_parse(unit))
        return strip_docstrings(*parsed);
    try {
        return source_ir::tokenize(unit.text);
    } catch (const source_ir::SourceError &) {
        return {};
    }
}

SimilarityScore codebleu(const SourceUnit &original, const SourceUnit &refactored, const CodeBleuWeights &weights) {
    weights.validate();
    const ParsedUnit ref = source_ir::parse_unit(original);
    SimilarityScore s;
    if (refactored.is_blank())
        return s;
    const TokenStream ref_tokens = strip_docstrings(ref);
    const TokenStream hyp_tokens = scoring_tokens(refactored);
    s.ngram = ngram_match(ref_tokens, hyp_tokens);
    s.weighted_ngram = weighted_ngram_match(ref_tokens, hyp_tokens);
    if (const auto hyp = try_parse(refactored)) {
        s.syntax = syntax_match(ref, *hyp);
        s.dataflow = dataflow_match(ref, *hyp);
    }
    s.total = weights.ngram * s.ngram + weights.weighted_ngram * s.weighted_ngram + weights.syntax * s.syntax +
              weights.dataflow * s.dataflow;
    return s;
}

}  // namespace cogref::similarity
