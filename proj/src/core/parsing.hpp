#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tracebench {

// True iff the first standalone, case-insensitive "yes"/"no" token is "yes".
// Fails loudly when neither token occurs.
bool parse_yes_no(std::string_view response);

struct TaggedResponse {
    std::map<std::string, std::string> sections;  // tag -> trimmed enclosed text
    std::string raw;
};

// Extracts the first <tag>...</tag> pair for each declared tag, in any order;
// missing or unclosed tags are reported together.
TaggedResponse parse_tagged(std::string_view response, const std::vector<std::string>& tags);

// Number of vote sections parsing to "yes"; any section that is neither yes
// nor no is an error naming the tag.
int vote_count(const TaggedResponse& tagged, const std::vector<std::string>& vote_tags);

struct RankingParse {
    std::vector<std::string> order;     // permutation of expected_ids
    std::vector<std::string> dropped;   // unknown tokens and duplicate repeats
    std::vector<std::string> appended;  // omitted ids, in seeded-random order
    bool empty_fallback{false};
};

// Parses a comma-delimited id list: trims tokens, drops unknown tokens and
// duplicate repeats, then appends the omitted ids in seeded-random order.
// A response with no recognizable id is an error unless the caller opts into
// the seeded full-random fallback.
RankingParse parse_ranking(std::string_view response, const std::set<std::string>& expected_ids,
                           std::uint64_t seed, bool allow_empty_fallback = false);

}  // namespace tracebench
