#include "core/vsm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "core/errors.hpp"

namespace tracebench {

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }

// Splits one alphanumeric run at camelCase humps: aB -> a|B, ABc -> A|Bc.
void split_camel(std::string_view run, std::vector<std::string>& out) {
    std::size_t start = 0;
    for (std::size_t i = 1; i < run.size(); ++i) {
        const bool lower_to_upper = is_lower(run[i - 1]) && is_upper(run[i]);
        const bool upper_run_end =
            i + 1 < run.size() && is_upper(run[i - 1]) && is_upper(run[i]) && is_lower(run[i + 1]);
        if (lower_to_upper || upper_run_end) {
            out.emplace_back(run.substr(start, i - start));
            start = i;
        }
    }
    out.emplace_back(run.substr(start));
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "have",
        "in", "is", "it", "its", "of", "on", "or", "shall", "that", "the", "this",
        "to", "was", "were", "will", "with"};
    return words;
}

std::map<std::string, std::size_t> term_counts(std::string_view text, const VsmOptions& options) {
    std::map<std::string, std::size_t> counts;
    for (const auto& token : tokenize(text, options)) {
        ++counts[token];
    }
    return counts;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const VsmOptions& options) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start < text.size()) {
        while (start < text.size() && !is_token_char(text[start])) ++start;
        std::size_t end = start;
        while (end < text.size() && is_token_char(text[end])) ++end;
        if (end > start) {
            split_camel(text.substr(start, end - start), pieces);
        }
        start = end;
    }

    std::vector<std::string> tokens;
    tokens.reserve(pieces.size());
    for (auto& piece : pieces) {
        if (piece.size() < 2) continue;
        for (char& c : piece) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        if (options.filter_stopwords && stopwords().count(piece) != 0) continue;
        tokens.push_back(std::move(piece));
    }
    return tokens;
}

IdfTable fit_corpus(const std::vector<Artifact>& artifacts, const VsmOptions& options) {
    if (artifacts.empty()) {
        fail(ErrorCode::validation, "empty corpus: cannot fit idf table");
    }
    std::map<std::string, std::size_t> document_frequency;
    for (const auto& artifact : artifacts) {
        std::set<std::string> seen;
        for (const auto& token : tokenize(artifact.body, options)) {
            seen.insert(token);
        }
        for (const auto& term : seen) {
            ++document_frequency[term];
        }
    }
    const double n = static_cast<double>(artifacts.size());
    IdfTable idf;
    for (const auto& [term, df] : document_frequency) {
        idf[term] = std::log(n / static_cast<double>(df)) + 1.0;
    }
    return idf;
}

TermVector TermVector::build(std::string_view text, const IdfTable& idf,
                             const VsmOptions& options) {
    TermVector vec;
    for (const auto& [term, count] : term_counts(text, options)) {
        auto it = idf.find(term);
        if (it == idf.end()) continue;  // unseen term: weight 0
        vec.weights[term] = static_cast<double>(count) * it->second;
    }
    double sum = 0.0;
    for (const auto& [term, weight] : vec.weights) {
        sum += weight * weight;
    }
    vec.norm = std::sqrt(sum);
    return vec;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.norm <= 0.0 || b.norm <= 0.0) {
        return 0.0;
    }
    double dot = 0.0;
    for (const auto& [term, weight] : a.weights) {
        auto it = b.weights.find(term);
        if (it != b.weights.end()) {
            dot += weight * it->second;
        }
    }
    return std::clamp(dot / (a.norm * b.norm), 0.0, 1.0);
}

double score(const Artifact& a, const Artifact& b, const IdfTable& idf,
             const VsmOptions& options) {
    return cosine(TermVector::build(a.body, idf, options),
                  TermVector::build(b.body, idf, options));
}

std::vector<RankedCandidate> vsm_rank(const TraceQuery& query, const IdfTable& idf,
                                      const VsmOptions& options) {
    const TermVector source = TermVector::build(query.parent.body, idf, options);
    std::vector<RankedCandidate> ranked;
    ranked.reserve(query.candidates.size());
    for (const auto& candidate : query.candidates) {
        ranked.push_back({candidate.id, cosine(source, TermVector::build(candidate.body, idf, options))});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.child_id < b.child_id;
    });
    return ranked;
}

}  // namespace tracebench
