#pragma once

// Execution traces. Every process invocation (and every primitive step:
// return/pure/get/put) appends exactly one TraceEvent; `par` appends one
// event whose two children ("par.left"/"par.right") wrap the branch traces,
// preserving the branch split for replay and cost reconstruction.
//
// Digests are FNV-1a 64 over the canonical value text. Payloads (the full
// canonical texts) are retained only when requested; replay needs them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"
#include "egur/ledger.hpp"
#include "egur/value.hpp"

namespace egur {

struct TraceEvent {
    std::string process;  // registered name, or "return"/"pure"/"get"/"put"/"par"/"par.left"/...
    std::string input_digest;
    std::string output_digest;
    std::optional<std::string> input_payload;   // canonical text, when retained
    std::optional<std::string> output_payload;
    CostLedger cost_delta;   // this event's own cost, excluding children
    std::int64_t wall_ns = 0;
    std::vector<TraceEvent> children;  // par branches only
};

// Recomputed total: the sum of every event's own delta across the tree.
// Summation is depth-first in event order, matching how the interpreter
// accumulated the run ledger, so totals agree exactly.
namespace detail {
inline void accumulate_trace(const TraceEvent& e, CostLedger& into) {
    into += e.cost_delta;
    for (const TraceEvent& c : e.children) accumulate_trace(c, into);
}
}  // namespace detail

inline CostLedger cost_of_trace(const std::vector<TraceEvent>& events) {
    CostLedger total;
    for (const TraceEvent& e : events) detail::accumulate_trace(e, total);
    return total;
}

// --- JSONL export / import ------------------------------------------------

inline nlohmann::json trace_event_to_json(const TraceEvent& e, bool include_wall = true) {
    nlohmann::json j{{"v", 1},
                     {"process", e.process},
                     {"input_digest", e.input_digest},
                     {"output_digest", e.output_digest},
                     {"cost", ledger_to_json(e.cost_delta)}};
    if (include_wall) j["wall_ns"] = e.wall_ns;
    if (e.input_payload) j["input"] = *e.input_payload;
    if (e.output_payload) j["output"] = *e.output_payload;
    if (!e.children.empty()) {
        nlohmann::json kids = nlohmann::json::array();
        for (const TraceEvent& c : e.children) kids.push_back(trace_event_to_json(c, include_wall));
        j["children"] = kids;
    }
    return j;
}

inline TraceEvent trace_event_from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.process = j.value("process", std::string());
    e.input_digest = j.value("input_digest", std::string());
    e.output_digest = j.value("output_digest", std::string());
    if (j.contains("cost")) e.cost_delta = ledger_from_json(j["cost"]);
    e.wall_ns = j.value("wall_ns", std::int64_t{0});
    if (j.contains("input")) e.input_payload = j["input"].get<std::string>();
    if (j.contains("output")) e.output_payload = j["output"].get<std::string>();
    if (j.contains("children")) {
        for (const auto& c : j["children"]) e.children.push_back(trace_event_from_json(c));
    }
    return e;
}

// One JSON object per top-level event, then a trailer line with the total
// ledger. The trailer makes truncated files detectable.
inline std::string export_trace_jsonl(const std::vector<TraceEvent>& events,
                                      const CostLedger& total, bool include_wall = true) {
    std::string out;
    for (const TraceEvent& e : events) {
        out += trace_event_to_json(e, include_wall).dump();
        out += '\n';
    }
    nlohmann::json trailer{{"v", 1}, {"total", ledger_to_json(total)}};
    out += trailer.dump();
    out += '\n';
    return out;
}

struct ImportedTrace {
    std::vector<TraceEvent> events;
    CostLedger total;
};

inline ImportedTrace import_trace_jsonl(const std::string& text) {
    ImportedTrace t;
    bool saw_trailer = false;
    for (const std::string& line : split_lines(text)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw RunError(ErrKind::io, "trace line is not valid JSON: " + line.substr(0, 80));
        }
        if (j.value("v", 0) != 1) {
            throw RunError(ErrKind::io, "unsupported trace version");
        }
        if (j.contains("total")) {
            t.total = ledger_from_json(j["total"]);
            saw_trailer = true;
        } else {
            if (saw_trailer) {
                throw RunError(ErrKind::io, "trace has events after the total trailer");
            }
            t.events.push_back(trace_event_from_json(j));
        }
    }
    if (!saw_trailer) {
        throw RunError(ErrKind::io, "trace is missing its total trailer (truncated file?)");
    }
    return t;
}

// --- Replay -----------------------------------------------------------------

// Renders a human-readable transcript from a payload-bearing trace. The
// transcript is deterministic: wall-clock never appears.
namespace detail {
inline void replay_event(const TraceEvent& e, int depth, std::string& out) {
    if (!e.input_payload || !e.output_payload) {
        throw RunError(ErrKind::config,
                       "trace was exported without payloads; re-run with payload retention "
                       "to replay");
    }
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += e.process;
    out += '(';
    out += *e.input_payload;
    out += ") -> ";
    out += *e.output_payload;
    if (e.cost_delta.usd != 0 || e.cost_delta.input_tokens != 0 ||
        e.cost_delta.output_tokens != 0) {
        out += "  [usd=";
        out += format_double(e.cost_delta.usd);
        out += " tokens=";
        out += std::to_string(e.cost_delta.input_tokens);
        out += '/';
        out += std::to_string(e.cost_delta.output_tokens);
        out += ']';
    }
    out += '\n';
    for (const TraceEvent& c : e.children) replay_event(c, depth + 1, out);
}
}  // namespace detail

inline std::string replay_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const TraceEvent& e : events) detail::replay_event(e, 0, out);
    return out;
}

}  // namespace egur
