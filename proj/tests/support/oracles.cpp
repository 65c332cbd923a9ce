#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tbtest {

double oracle_average_precision(const std::vector<std::string>& ranking,
                                const std::set<std::string>& relevant) {
    double sum = 0.0;
    for (std::size_t rank = 1; rank <= ranking.size(); ++rank) {
        if (relevant.count(ranking[rank - 1]) == 0) continue;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < rank; ++i) {
            if (relevant.count(ranking[i]) != 0) ++hits;
        }
        sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
    return sum / static_cast<double>(relevant.size());
}

DenseTfidfOracle::DenseTfidfOracle(const std::vector<std::vector<std::string>>& documents) {
    std::vector<std::string> vocab;
    for (const auto& tokens : documents) {
        for (const auto& token : tokens) {
            vocab.push_back(token);
        }
    }
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

    const double n = static_cast<double>(documents.size());
    std::vector<double> idf(vocab.size(), 0.0);
    for (std::size_t t = 0; t < vocab.size(); ++t) {
        std::size_t df = 0;
        for (const auto& tokens : documents) {
            if (std::find(tokens.begin(), tokens.end(), vocab[t]) != tokens.end()) {
                ++df;
            }
        }
        idf[t] = std::log(n / static_cast<double>(df)) + 1.0;
    }

    for (const auto& tokens : documents) {
        std::vector<double> vec(vocab.size(), 0.0);
        for (std::size_t t = 0; t < vocab.size(); ++t) {
            const auto count = std::count(tokens.begin(), tokens.end(), vocab[t]);
            vec[t] = static_cast<double>(count) * idf[t];
        }
        vectors_.push_back(std::move(vec));
    }
}

double DenseTfidfOracle::score(std::size_t a, std::size_t b) const {
    const auto& va = vectors_[a];
    const auto& vb = vectors_[b];
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t t = 0; t < va.size(); ++t) {
        dot += va[t] * vb[t];
        na += va[t] * va[t];
        nb += vb[t] * vb[t];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace tbtest
