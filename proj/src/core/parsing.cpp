#include "core/parsing.hpp"

#include <algorithm>
#include <cctype>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/strings.hpp"

namespace tracebench {

namespace {

bool is_letter(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

bool parse_yes_no(std::string_view response) {
    std::size_t pos = 0;
    while (pos < response.size()) {
        while (pos < response.size() && !is_letter(response[pos])) ++pos;
        std::size_t end = pos;
        while (end < response.size() && is_letter(response[end])) ++end;
        const std::string word = to_lower(response.substr(pos, end - pos));
        if (word == "yes") return true;
        if (word == "no") return false;
        pos = end;
    }
    fail(ErrorCode::parse, "unparseable yes/no response: '" + trim(response) + "'");
}

TaggedResponse parse_tagged(std::string_view response, const std::vector<std::string>& tags) {
    if (tags.empty()) {
        fail(ErrorCode::validation, "parse_tagged requires a non-empty tag list");
    }
    TaggedResponse result;
    result.raw = std::string(response);
    std::vector<std::string> missing;
    for (const auto& tag : tags) {
        const std::string open = "<" + tag + ">";
        const std::string close = "</" + tag + ">";
        const std::size_t open_pos = response.find(open);
        if (open_pos == std::string_view::npos) {
            missing.push_back(tag);
            continue;
        }
        const std::size_t content_pos = open_pos + open.size();
        const std::size_t close_pos = response.find(close, content_pos);
        if (close_pos == std::string_view::npos) {
            missing.push_back(tag);
            continue;
        }
        result.sections[tag] = trim(response.substr(content_pos, close_pos - content_pos));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& tag : missing) {
            if (!list.empty()) list += ", ";
            list += tag;
        }
        fail(ErrorCode::parse, "missing tags: " + list);
    }
    return result;
}

int vote_count(const TaggedResponse& tagged, const std::vector<std::string>& vote_tags) {
    int votes = 0;
    for (const auto& tag : vote_tags) {
        auto it = tagged.sections.find(tag);
        if (it == tagged.sections.end()) {
            fail(ErrorCode::parse, "vote tag not extracted: " + tag);
        }
        try {
            if (parse_yes_no(it->second)) ++votes;
        } catch (const Error&) {
            fail(ErrorCode::parse, "unparseable vote section: " + tag);
        }
    }
    return votes;
}

RankingParse parse_ranking(std::string_view response, const std::set<std::string>& expected_ids,
                           std::uint64_t seed, bool allow_empty_fallback) {
    if (expected_ids.empty()) {
        fail(ErrorCode::validation, "parse_ranking requires a non-empty id set");
    }

    RankingParse result;
    std::set<std::string> seen;
    for (const auto& raw_token : split(response, ',')) {
        const std::string token = trim(raw_token);
        if (token.empty()) continue;
        if (expected_ids.count(token) == 0 || seen.count(token) != 0) {
            result.dropped.push_back(token);
            continue;
        }
        seen.insert(token);
        result.order.push_back(token);
    }

    if (result.order.empty() && !allow_empty_fallback) {
        fail(ErrorCode::parse, "empty ranking response: no recognizable id");
    }
    result.empty_fallback = result.order.empty();

    std::vector<std::string> missing;
    for (const auto& id : expected_ids) {
        if (seen.count(id) == 0) {
            missing.push_back(id);  // ascending order before the shuffle
        }
    }
    Rng rng(seed);
    seeded_shuffle(missing, rng);
    for (auto& id : missing) {
        result.appended.push_back(id);
        result.order.push_back(std::move(id));
    }
    return result;
}

}  // namespace tracebench
