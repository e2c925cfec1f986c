#pragma once

// The Consolidator turns an episode's experiences into memory edits. The
// engine first applies its own bookkeeping (strategy win/loss/cost stats,
// note access counts), then asks the model for an edit script. Scripts
// apply atomically: any malformed directive, bad id, or invalid strategy
// rejects the whole script, leaving memory untouched. A retention pass
// always runs afterwards, so memory stays bounded no matter what the
// model says.

#include <set>
#include <string>
#include <vector>

#include "egur/backend.hpp"
#include "egur/context.hpp"
#include "egur/experience.hpp"
#include "egur/parser.hpp"
#include "egur/printer.hpp"
#include "egur/prompts.hpp"
#include "egur/registry.hpp"
#include "egur/tasks.hpp"
#include "egur/text_ops.hpp"
#include "egur/validate.hpp"

namespace egur {

struct EditOp {
    enum class Kind { add_note, del_note, add_strategy, del_strategy };
    Kind kind = Kind::add_note;
    std::string text;       // add_note: the note; add_strategy: the program
    std::string signature;  // add_strategy only
    std::size_t id = 0;     // del ops: memory_entry number from the prompt
};

struct EditScript {
    std::vector<EditOp> ops;
    std::vector<std::string> errors;  // malformed directives (reject script)
};

namespace detail {

inline bool parse_entry_id(const std::string& s, std::size_t& out) {
    if (s.empty()) return false;
    std::size_t value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<std::size_t>(c - '0');
        if (value > 1000000) return false;
    }
    if (value == 0) return false;
    out = value;
    return true;
}

inline bool is_fence_line(const std::string& line) {
    return starts_with(trim(line), "```");
}

}  // namespace detail

// Directives live one per line; `ADD STRATEGY <sig>:` is followed by a
// fenced block holding the program. Lines that start with no directive
// keyword are commentary and ignored; lines that start like a directive
// but do not parse are errors.
inline EditScript parse_edit_script(const std::string& reply) {
    EditScript script;
    std::vector<std::string> lines = split_lines(reply);
    std::size_t i = 0;
    while (i < lines.size()) {
        std::string line = trim(lines[i]);
        std::size_t line_no = i + 1;
        ++i;
        if (starts_with(line, "ADD NOTE")) {
            std::string rest = line.substr(8);
            if (rest.empty() || rest[0] != ':') {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD NOTE needs a ':' and the note text");
                continue;
            }
            std::string text = trim(rest.substr(1));
            if (text.empty()) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD NOTE has empty text");
                continue;
            }
            script.ops.push_back({EditOp::Kind::add_note, text, "", 0});
        } else if (starts_with(line, "DEL NOTE")) {
            std::size_t id = 0;
            if (!detail::parse_entry_id(trim(line.substr(8)), id)) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": DEL NOTE needs a memory_entry number");
                continue;
            }
            script.ops.push_back({EditOp::Kind::del_note, "", "", id});
        } else if (starts_with(line, "ADD STRATEGY")) {
            std::string rest = trim(line.substr(12));
            if (rest.empty() || rest.back() != ':') {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD STRATEGY needs '<signature>:'");
                continue;
            }
            std::string signature = trim(rest.substr(0, rest.size() - 1));
            if (signature.empty()) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD STRATEGY has an empty signature");
                continue;
            }
            // Skip blank lines, then demand an opening fence.
            while (i < lines.size() && trim(lines[i]).empty()) ++i;
            if (i >= lines.size() || !detail::is_fence_line(lines[i])) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD STRATEGY needs a fenced code block");
                continue;
            }
            ++i;  // opening fence
            std::string body;
            bool closed = false;
            while (i < lines.size()) {
                if (detail::is_fence_line(lines[i])) {
                    closed = true;
                    ++i;
                    break;
                }
                body += lines[i];
                body += '\n';
                ++i;
            }
            if (!closed) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": ADD STRATEGY block is never closed");
                continue;
            }
            script.ops.push_back({EditOp::Kind::add_strategy, trim(body), signature, 0});
        } else if (starts_with(line, "DEL STRATEGY")) {
            std::size_t id = 0;
            if (!detail::parse_entry_id(trim(line.substr(12)), id)) {
                script.errors.push_back("line " + std::to_string(line_no) +
                                        ": DEL STRATEGY needs a memory_entry number");
                continue;
            }
            script.ops.push_back({EditOp::Kind::del_strategy, "", "", id});
        }
        // anything else: commentary
    }
    return script;
}

// Applies atomically against the id numbering the consolidator was shown
// (notes first, then library entries, 1-based). Returns the list of
// reasons the script was rejected; empty means it applied.
inline std::vector<std::string> apply_edit_script(Context& ctx, const EditScript& script,
                                                  const ProcessRegistry& reg,
                                                  std::int64_t episode,
                                                  const std::vector<Experience>& experiences) {
    std::vector<std::string> errors = script.errors;
    std::size_t note_count = ctx.notes.size();
    std::size_t total = note_count + ctx.library.size();

    struct PendingStrategy {
        std::string signature;
        std::string canonical;
    };
    std::set<std::size_t> del_notes, del_strategies;
    std::vector<EditOp> add_notes;
    std::vector<PendingStrategy> add_strategies;

    for (const EditOp& op : script.ops) {
        switch (op.kind) {
            case EditOp::Kind::add_note:
                add_notes.push_back(op);
                break;
            case EditOp::Kind::del_note:
                if (op.id > total) {
                    errors.push_back("DEL NOTE " + std::to_string(op.id) + ": no such entry");
                } else if (op.id > note_count) {
                    errors.push_back("DEL NOTE " + std::to_string(op.id) +
                                     ": that entry is a strategy");
                } else {
                    del_notes.insert(op.id - 1);
                }
                break;
            case EditOp::Kind::add_strategy: {
                ParseResult parsed = parse_strategy(op.text);
                if (!parsed.ok()) {
                    std::string why = parsed.diagnostics.empty()
                                          ? "unparseable"
                                          : format_diagnostic(parsed.diagnostics.front());
                    errors.push_back("ADD STRATEGY " + op.signature + ": " + why);
                    break;
                }
                auto diags = validate(*parsed.program, reg.names());
                if (!diags.empty()) {
                    errors.push_back("ADD STRATEGY " + op.signature + ": " +
                                     format_diagnostic(diags.front()));
                    break;
                }
                add_strategies.push_back({op.signature, pretty_print(*parsed.program)});
                break;
            }
            case EditOp::Kind::del_strategy:
                if (op.id > total) {
                    errors.push_back("DEL STRATEGY " + std::to_string(op.id) + ": no such entry");
                } else if (op.id <= note_count) {
                    errors.push_back("DEL STRATEGY " + std::to_string(op.id) +
                                     ": that entry is a note");
                } else {
                    del_strategies.insert(op.id - 1 - note_count);
                }
                break;
        }
    }
    if (!errors.empty()) return errors;

    for (auto it = del_notes.rbegin(); it != del_notes.rend(); ++it) {
        ctx.notes.erase(ctx.notes.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    for (auto it = del_strategies.rbegin(); it != del_strategies.rend(); ++it) {
        ctx.library.erase(ctx.library.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    for (const EditOp& op : add_notes) {
        Note n;
        n.text = op.text;
        n.created_episode = episode;
        n.access_count = 0;
        ctx.notes.push_back(std::move(n));
    }
    for (const PendingStrategy& add : add_strategies) {
        LibraryEntry* existing = nullptr;
        for (auto& e : ctx.library) {
            if (e.signature == add.signature) {
                existing = &e;
                break;
            }
        }
        if (existing != nullptr) {
            // Same signature: refresh the program, keep its track record.
            existing->strategy_text = add.canonical;
            existing->last_used_episode = episode;
            continue;
        }
        LibraryEntry e;
        e.signature = add.signature;
        e.strategy_text = add.canonical;
        e.created_episode = episode;
        e.last_used_episode = episode;
        // Seed the record from this episode's own evidence when the added
        // program is one that just ran.
        const Experience* match = nullptr;
        for (const auto& exp : experiences) {
            if (exp.strategy_text == add.canonical) {
                match = &exp;
                break;
            }
        }
        if (match != nullptr && !match->failed) {
            e.wins = match->feedback.correct ? 1 : 0;
            e.losses = match->feedback.correct ? 0 : 1;
            e.mean_cost_usd = match->cost.usd;
        } else {
            e.wins = 1;
            e.losses = 0;
            e.mean_cost_usd = 0.0;
        }
        ctx.library.push_back(std::move(e));
    }
    return {};
}

namespace detail {

// Engine-side bookkeeping that does not depend on the model: refresh the
// track record of every library strategy that ran, and count a win for
// the notes that were in memory when the episode succeeded.
inline void auto_update_stats(Context& ctx, const std::vector<Experience>& experiences,
                              bool episode_correct, std::int64_t episode) {
    for (const auto& exp : experiences) {
        if (exp.failed) continue;
        for (auto& entry : ctx.library) {
            if (entry.strategy_text != exp.strategy_text) continue;
            double n = static_cast<double>(entry.wins + entry.losses);
            entry.mean_cost_usd = (entry.mean_cost_usd * n + exp.cost.usd) / (n + 1.0);
            if (exp.feedback.correct) {
                ++entry.wins;
            } else {
                ++entry.losses;
            }
            entry.last_used_episode = episode;
        }
    }
    if (episode_correct) {
        for (auto& note : ctx.notes) ++note.access_count;
    }
}

inline std::string experiences_text(const TaskInstance& task,
                                    const std::vector<Experience>& experiences,
                                    bool episode_correct) {
    std::string out = "Task: " + task.question + "\n";
    out += "Chosen answer judged: ";
    out += episode_correct ? "CORRECT" : "INCORRECT";
    out += '\n';
    for (const auto& exp : experiences) {
        out += "\nCandidate " + std::to_string(exp.slot) + ":\n```\n" + exp.strategy_text +
               "\n```\n";
        if (exp.failed) {
            out += "run failed: " + exp.error + '\n';
        } else {
            out += "answer: " + exp.answer + '\n';
            out += "verdict: ";
            out += exp.feedback.correct ? "CORRECT" : "INCORRECT";
            if (!exp.feedback.detail.empty()) out += " (" + exp.feedback.detail + ")";
            out += '\n';
        }
        out += "cost: $" + format_double(exp.cost.usd) + '\n';
    }
    return out;
}

}  // namespace detail

struct ConsolidateResult {
    bool llm_failed = false;        // backend error; bookkeeping still ran
    std::size_t ops_applied = 0;    // directives applied (0 when rejected)
    std::vector<std::string> errors;
    std::string reply;              // raw consolidator reply
};

// One consolidation turn. Never throws for model or script trouble; the
// result says what happened. The context's episode_count advances by one.
inline ConsolidateResult consolidate(Backend& llm, const PricingTable& pricing,
                                     const ProcessRegistry& reg, const PromptSet& prompts,
                                     Context& ctx, const TaskInstance& task,
                                     const std::vector<Experience>& experiences,
                                     bool episode_correct, const std::string& partition,
                                     CostLedger& cost, const RetentionPolicy& policy = {}) {
    ConsolidateResult result;
    std::int64_t episode = ctx.episode_count + 1;
    detail::auto_update_stats(ctx, experiences, episode_correct, episode);

    std::map<std::string, std::string> vars{
        {"context", serialize_context(ctx)},
        {"experiences", detail::experiences_text(task, experiences, episode_correct)},
    };
    std::vector<ChatMessage> messages{{"user", render_prompt(prompts.consolidator, vars)}};
    LlmParams params;
    Completion reply;
    bool have_reply = false;
    try {
        reply = llm.complete(messages, params, partition);
        have_reply = true;
    } catch (const RunError& e) {
        result.llm_failed = true;
        result.errors.push_back(e.what());
    }
    if (have_reply) {
        cost.input_tokens += reply.input_tokens;
        cost.output_tokens += reply.output_tokens;
        double usd = price(reply.input_tokens, reply.output_tokens, pricing);
        cost.usd += usd;
        cost.per_process["Consolidator"] += usd;
        result.reply = reply.text;

        EditScript script = parse_edit_script(reply.text);
        std::vector<std::string> errors =
            apply_edit_script(ctx, script, reg, episode, experiences);
        if (errors.empty()) {
            result.ops_applied = script.ops.size();
        } else {
            result.errors = std::move(errors);
        }
    }
    retention_pass(ctx, policy);
    ctx.episode_count = episode;
    return result;
}

}  // namespace egur
