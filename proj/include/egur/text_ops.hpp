#pragma once

// Deterministic text utilities used by the extractor/vote processes and the
// verifiers: fenced code block extraction, final-answer extraction, answer
// normalization, and majority voting.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egur/common.hpp"
#include "egur/value.hpp"

namespace egur {

struct CodeBlocks {
    std::vector<std::string> blocks;
    bool unterminated = false;  // an opening fence was never closed
};

// Fenced blocks only: a line whose first non-space characters are ``` opens
// a block (anything after the fence on that line is a language tag and is
// dropped); the next such line closes it. Inline backticks do not count.
inline CodeBlocks extract_code_blocks(std::string_view text) {
    CodeBlocks out;
    bool in_block = false;
    std::string current;
    for (const std::string& raw : split_lines(text)) {
        std::string_view line = raw;
        std::size_t indent = line.find_first_not_of(" \t");
        std::string_view body = indent == std::string_view::npos ? "" : line.substr(indent);
        if (starts_with(body, "```")) {
            if (in_block) {
                out.blocks.push_back(current);
                current.clear();
                in_block = false;
            } else {
                in_block = true;
            }
            continue;
        }
        if (in_block) {
            current += raw;
            current += '\n';
        }
    }
    if (in_block) out.unterminated = true;  // dangling fence: content is not a block
    return out;
}

// The last line reading "FINAL ANSWER: ..." (leading/trailing whitespace on
// the line is ignored); the remainder of that line, trimmed.
inline std::optional<std::string> extract_final_answer(std::string_view text) {
    static constexpr std::string_view kMarker = "FINAL ANSWER:";
    std::optional<std::string> found;
    for (const std::string& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (starts_with(line, kMarker)) {
            found = trim(std::string_view(line).substr(kMarker.size()));
        }
    }
    return found;
}

// Case-folded (ASCII), trimmed, inner whitespace runs collapsed to one space.
inline std::string normalize_answer(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// Majority by normalized form; ties go to the candidate whose first
// occurrence is earliest. Returns the original (un-normalized) text of the
// winner's first occurrence.
inline std::string majority_vote(const std::vector<std::string>& candidates) {
    if (candidates.empty()) {
        throw RunError(ErrKind::process_failure, "majority vote over zero candidates");
    }
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::size_t> first_seen;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        std::string key = normalize_answer(candidates[i]);
        ++counts[key];
        first_seen.emplace(key, i);
    }
    std::string best_key;
    std::size_t best_count = 0, best_first = candidates.size();
    for (const auto& [key, count] : counts) {
        std::size_t first = first_seen[key];
        if (count > best_count || (count == best_count && first < best_first)) {
            best_key = key;
            best_count = count;
            best_first = first;
        }
    }
    return candidates[best_first];
}

// Flattens a value into vote candidates: lists recurse in order, maps recurse
// in key order (so a par pairing {"left","right"} yields left before right),
// scalars contribute their display text.
inline void flatten_candidates(const Value& v, std::vector<std::string>& out) {
    if (v.is_list()) {
        for (const Value& e : v.as_list()) flatten_candidates(e, out);
    } else if (v.is_map()) {
        for (const auto& [k, e] : v.as_map()) flatten_candidates(e, out);
    } else {
        out.push_back(to_display_text(v));
    }
}

inline std::vector<std::string> flatten_candidates(const Value& v) {
    std::vector<std::string> out;
    flatten_candidates(v, out);
    return out;
}

}  // namespace egur
