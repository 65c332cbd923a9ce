#pragma once

#include <set>
#include <string>
#include <vector>

namespace tbtest {

// Independent discrete-AP oracle: for every rank holding a relevant item,
// recount the relevant prefix from scratch, then average the precisions.
// Deliberately quadratic and free of shared state with the implementation.
double oracle_average_precision(const std::vector<std::string>& ranking,
                                const std::set<std::string>& relevant);

// Dense brute-force TF-IDF cosine oracle over pre-tokenized documents. Builds
// an explicit vocabulary, dense count vectors, its own idf = ln(N/df) + 1,
// and naive dot products; shares nothing with the sparse implementation
// except the token lists fed in.
class DenseTfidfOracle {
public:
    explicit DenseTfidfOracle(const std::vector<std::vector<std::string>>& documents);

    double score(std::size_t a, std::size_t b) const;

private:
    std::vector<std::vector<double>> vectors_;  // per document, dense over vocab
};

}  // namespace tbtest
