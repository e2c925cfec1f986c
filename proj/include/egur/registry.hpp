#pragma once

// The base-process registry. A process is a named handler over (input value,
// run state) plus a declaration of which state components it touches, a flat
// dollar cost, and classification flags (LLM / code-interpreter) used when
// summarizing what a strategy relies on.

#include <functional>
#include <map>
#include <set>
#include <string>

#include "egur/common.hpp"
#include "egur/ledger.hpp"
#include "egur/state.hpp"
#include "egur/value.hpp"

namespace egur {

struct StateAccess {
    bool conversation = false;
    bool exec_env = false;
    bool user_state = false;
};

// Handed to every handler: the mutable run state, a per-invocation seed
// derived from (run seed, event position), and the cost delta the handler
// should add token/dollar charges into.
struct ProcessInvocation {
    RunState& state;
    std::uint64_t seed = 0;
    CostLedger delta;
};

using ProcessHandler = std::function<Value(const Value& input, ProcessInvocation&)>;

struct ProcessEntry {
    std::string name;
    ProcessHandler handler;
    StateAccess reads;
    StateAccess writes;
    double flat_cost_usd = 0.0;
    bool uses_llm = false;
    bool uses_code = false;
};

class ProcessRegistry {
public:
    void add(ProcessEntry entry) {
        if (entries_.count(entry.name)) {
            throw RunError(ErrKind::config, "process '" + entry.name + "' is already registered");
        }
        std::string name = entry.name;
        entries_.emplace(std::move(name), std::move(entry));
    }

    void add_or_replace(ProcessEntry entry) {
        entries_[entry.name] = entry;
    }

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }

    const ProcessEntry* find(const std::string& name) const {
        auto it = entries_.find(name);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::set<std::string> names() const {
        std::set<std::string> out;
        for (const auto& [k, v] : entries_) out.insert(k);
        return out;
    }

    Value invoke(const std::string& name, const Value& input, ProcessInvocation& inv) const {
        const ProcessEntry* entry = find(name);
        if (!entry) {
            throw RunError(ErrKind::unbound_name, "process '" + name + "' is not registered");
        }
        inv.delta.usd += entry->flat_cost_usd;
        return entry->handler(input, inv);
    }

private:
    std::map<std::string, ProcessEntry> entries_;
};

}  // namespace egur
