#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"

namespace tracebench {

struct VsmOptions {
    // Off by default: these corpora are dominated by domain acronyms and
    // generic stopwords barely move the cosine ordering.
    bool filter_stopwords{false};
};

// Lowercased tokens split on non-alphanumeric boundaries, camelCase humps,
// and underscores; tokens shorter than 2 characters are dropped. No stemming.
std::vector<std::string> tokenize(std::string_view text, const VsmOptions& options = {});

// term -> ln(N/df) + 1 over the given corpus. Terms absent from the table
// carry weight 0 during scoring.
using IdfTable = std::map<std::string, double>;
IdfTable fit_corpus(const std::vector<Artifact>& artifacts, const VsmOptions& options = {});

// Sparse TF-IDF vector (raw term counts times IDF) with its cached norm.
struct TermVector {
    std::map<std::string, double> weights;
    double norm{0.0};

    static TermVector build(std::string_view text, const IdfTable& idf,
                            const VsmOptions& options = {});
};

double cosine(const TermVector& a, const TermVector& b);

// Cosine similarity of the two artifact bodies under the fitted IDF table;
// 0 when either vector is empty.
double score(const Artifact& a, const Artifact& b, const IdfTable& idf,
             const VsmOptions& options = {});

struct RankedCandidate {
    std::string child_id;
    double score{0.0};
};

// Candidates sorted by score descending, ties broken ascending by id.
std::vector<RankedCandidate> vsm_rank(const TraceQuery& query, const IdfTable& idf,
                                      const VsmOptions& options = {});

}  // namespace tracebench
