#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cogref/source_ir/analysis.hpp"
#include "cogref/source_ir/ir.hpp"

namespace cogref::similarity {

using source_ir::ParsedUnit;
using source_ir::SourceUnit;
using source_ir::TokenStream;

inline constexpr int kDefaultNMax = 4;
inline constexpr double kDefaultKeywordWeight = 5.0;

struct CodeBleuWeights {
    double ngram = 0.25;
    double weighted_ngram = 0.25;
    double syntax = 0.25;
    double dataflow = 0.25;

    /// Throws std::invalid_argument unless all weights are >= 0 and sum to 1.
    void validate() const;
};

struct SimilarityScore {
    double total = 0.0;
    double ngram = 0.0;
    double weighted_ngram = 0.0;
    double syntax = 0.0;
    double dataflow = 0.0;
};

/// BLEU over token lexemes: geometric mean of modified precisions for
/// n = 1..n_max times the brevity penalty.
double ngram_match(const TokenStream &ref, const TokenStream &hyp, int n_max = kDefaultNMax);

/// Same as ngram_match, with keyword unigrams counted keyword_weight times.
double weighted_ngram_match(const TokenStream &ref, const TokenStream &hyp, double keyword_weight = kDefaultKeywordWeight,
                            int n_max = kDefaultNMax);

double syntax_match(const ParsedUnit &ref, const ParsedUnit &hyp);
double dataflow_match(const ParsedUnit &ref, const ParsedUnit &hyp);

/// Parses both sides; an unparseable hypothesis scores 0 on syntax and dataflow.
double syntax_match(const SourceUnit &ref, const SourceUnit &hyp);
double dataflow_match(const SourceUnit &ref, const SourceUnit &hyp);

/// Multiset key for def-use matching: normalised variable plus which of that
/// variable's definitions reaches the use.
using DataflowKey = std::pair<std::string, std::size_t>;
std::map<DataflowKey, std::size_t> dataflow_multiset(const ParsedUnit &unit);

/// Token stream used for scoring: comments are already gone; docstrings are
/// removed when the unit parses.
TokenStream scoring_tokens(const SourceUnit &unit);

/// Reference = original, hypothesis = refactored. Throws on an unparseable
/// original; a blank hypothesis scores 0 everywhere.
SimilarityScore codebleu(const SourceUnit &original, const SourceUnit &refactored, const CodeBleuWeights &weights = {});

}  // namespace cogref::similarity
