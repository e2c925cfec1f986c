#pragma once

// The persistent memory a Guide conditions on: free-form notes plus a
// library of strategies keyed by task signature, with win/loss/cost records.
//
// Two serializations: a JSON sidecar (exact round-trip, the storage format)
// and the numbered <memory_entry-N> text form that goes into prompts and
// context.txt. Entry numbering in the text form — notes first, then
// strategies — is the id space consolidation edits refer to.
//
// Retention keeps the context bounded no matter what a consolidator tries:
// texts are clipped to per-entry caps and eviction keeps entry counts under
// the configured maxima, deterministically.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"
#include "egur/text_ops.hpp"

namespace egur {

struct Note {
    std::string text;
    std::int64_t created_episode = 0;
    std::int64_t access_count = 0;
};

struct LibraryEntry {
    std::string signature;      // normalized task fingerprint
    std::string strategy_text;  // canonical DSL
    std::int64_t wins = 0;
    std::int64_t losses = 0;
    double mean_cost_usd = 0.0;
    std::int64_t created_episode = 0;
    std::int64_t last_used_episode = 0;

    double win_rate() const {
        std::int64_t uses = wins + losses;
        return uses == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(uses);
    }
};

struct RetentionPolicy {
    int max_strategies = 32;
    int max_notes = 64;
    std::size_t max_note_chars = 500;
    std::size_t max_strategy_chars = 4000;
    std::size_t max_signature_chars = 160;

    // Upper bound on the serialized text form under this policy.
    std::size_t max_context_bytes() const {
        std::size_t per_note = max_note_chars + 160;
        std::size_t per_strategy = max_strategy_chars + max_signature_chars + 320;
        return static_cast<std::size_t>(max_notes) * per_note +
               static_cast<std::size_t>(max_strategies) * per_strategy + 64;
    }
};

struct Context {
    std::vector<Note> notes;
    std::vector<LibraryEntry> library;
    std::int64_t episode_count = 0;
};

// First `max_chars` of the normalized question, tagged with the task type.
inline std::string task_signature(const std::string& question, const std::string& task_type,
                                  std::size_t max_chars = 160) {
    std::string norm = normalize_answer(question);
    if (norm.size() > max_chars) norm.resize(max_chars);
    return norm + " [" + task_type + "]";
}

// --- Text form ---------------------------------------------------------------

inline std::string serialize_context(const Context& ctx) {
    if (ctx.notes.empty() && ctx.library.empty()) {
        return "(memory is empty)\n";
    }
    std::string out;
    int id = 0;
    for (const Note& n : ctx.notes) {
        ++id;
        std::string tag = "memory_entry-" + std::to_string(id);
        std::string text = n.text;
        for (char& c : text) {
            if (c == '\n' || c == '\r') c = ' ';  // notes render one line per entry
        }
        out += "<" + tag + ">\n";
        out += "Type: note\n";
        out += "Created: episode " + std::to_string(n.created_episode) + ", accessed " +
               std::to_string(n.access_count) + " times\n";
        out += "Text: " + text + "\n";
        out += "</" + tag + ">\n";
    }
    for (const LibraryEntry& e : ctx.library) {
        ++id;
        std::string tag = "memory_entry-" + std::to_string(id);
        out += "<" + tag + ">\n";
        out += "Type: strategy\n";
        out += "Task: " + e.signature + "\n";
        out += "Record: wins=" + std::to_string(e.wins) + " losses=" + std::to_string(e.losses) +
               " mean_cost_usd=" + format_double(e.mean_cost_usd) + " last_used=episode " +
               std::to_string(e.last_used_episode) + "\n";
        out += "Strategy:\n<strategy>\n" + e.strategy_text + "\n</strategy>\n";
        out += "</" + tag + ">\n";
    }
    return out;
}

// --- JSON sidecar ---------------------------------------------------------------

inline nlohmann::json context_to_json(const Context& ctx) {
    nlohmann::json notes = nlohmann::json::array();
    for (const Note& n : ctx.notes) {
        notes.push_back({{"text", n.text},
                         {"created_episode", n.created_episode},
                         {"access_count", n.access_count}});
    }
    nlohmann::json lib = nlohmann::json::array();
    for (const LibraryEntry& e : ctx.library) {
        lib.push_back({{"signature", e.signature},
                       {"strategy", e.strategy_text},
                       {"wins", e.wins},
                       {"losses", e.losses},
                       {"mean_cost_usd", e.mean_cost_usd},
                       {"created_episode", e.created_episode},
                       {"last_used_episode", e.last_used_episode}});
    }
    return nlohmann::json{
        {"v", 1}, {"episode_count", ctx.episode_count}, {"notes", notes}, {"library", lib}};
}

inline Context context_from_json(const nlohmann::json& j) {
    if (j.value("v", 0) != 1) throw RunError(ErrKind::config, "unsupported context version");
    Context ctx;
    ctx.episode_count = j.value("episode_count", std::int64_t{0});
    for (const auto& n : j.value("notes", nlohmann::json::array())) {
        Note note;
        note.text = n.at("text").get<std::string>();
        note.created_episode = n.value("created_episode", std::int64_t{0});
        note.access_count = n.value("access_count", std::int64_t{0});
        ctx.notes.push_back(std::move(note));
    }
    for (const auto& e : j.value("library", nlohmann::json::array())) {
        LibraryEntry entry;
        entry.signature = e.at("signature").get<std::string>();
        entry.strategy_text = e.at("strategy").get<std::string>();
        entry.wins = e.value("wins", std::int64_t{0});
        entry.losses = e.value("losses", std::int64_t{0});
        entry.mean_cost_usd = e.value("mean_cost_usd", 0.0);
        entry.created_episode = e.value("created_episode", std::int64_t{0});
        entry.last_used_episode = e.value("last_used_episode", std::int64_t{0});
        ctx.library.push_back(std::move(entry));
    }
    return ctx;
}

// --- Retention ------------------------------------------------------------------

namespace detail {

template <typename T, typename KeyFn>
void evict_to_cap(std::vector<T>& items, std::size_t cap, KeyFn key) {
    if (items.size() <= cap) return;
    // Rank items by eviction priority (lowest key evicts first); keep the
    // survivors in their original order.
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(items[a]) < key(items[b]); });
    std::vector<bool> evict(items.size(), false);
    std::size_t to_evict = items.size() - cap;
    for (std::size_t i = 0; i < to_evict; ++i) evict[order[i]] = true;
    std::vector<T> kept;
    kept.reserve(cap);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!evict[i]) kept.push_back(std::move(items[i]));
    }
    items = std::move(kept);
}

}  // namespace detail

// Clips texts to the per-entry caps and evicts entries beyond the count caps.
// Note texts and signatures are free text and clip safely; a strategy body is
// code, so an over-long one is dropped outright rather than corrupted.
// Notes evict by (access_count, created_episode, position); strategies by
// (last_used_episode, win_rate, position). Deterministic by construction.
inline void retention_pass(Context& ctx, const RetentionPolicy& policy) {
    for (Note& n : ctx.notes) {
        if (n.text.size() > policy.max_note_chars) n.text.resize(policy.max_note_chars);
    }
    for (LibraryEntry& e : ctx.library) {
        if (e.signature.size() > policy.max_signature_chars) {
            e.signature.resize(policy.max_signature_chars);
        }
    }
    ctx.library.erase(std::remove_if(ctx.library.begin(), ctx.library.end(),
                                     [&](const LibraryEntry& e) {
                                         return e.strategy_text.size() >
                                                policy.max_strategy_chars;
                                     }),
                      ctx.library.end());
    detail::evict_to_cap(ctx.notes, static_cast<std::size_t>(policy.max_notes),
                         [](const Note& n) {
                             return std::make_tuple(n.access_count, n.created_episode);
                         });
    detail::evict_to_cap(ctx.library, static_cast<std::size_t>(policy.max_strategies),
                         [](const LibraryEntry& e) {
                             return std::make_tuple(e.last_used_episode, e.win_rate());
                         });
}

}  // namespace egur
