#pragma once

// RunState: everything a strategy execution threads along — the LLM
// conversation, the code-execution environment handle, the trace, the cost
// ledger, and the strategy-visible userState value.

#include <memory>
#include <string>
#include <vector>

#include "egur/ledger.hpp"
#include "egur/trace.hpp"
#include "egur/value.hpp"

namespace egur {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

// Opaque handle to a code execution environment. Definitions persist across
// run() calls on the same handle; fork() produces an isolated copy for a
// parallel branch (branch changes never flow back).
class CodeRunner {
public:
    virtual ~CodeRunner() = default;

    struct Outcome {
        bool ok = true;
        std::string output;  // captured output, or the error text the caller observes
    };

    virtual Outcome run(const std::string& code) = 0;
    virtual std::shared_ptr<CodeRunner> fork() const = 0;
};

struct RunState {
    std::vector<ChatMessage> conversation;
    std::shared_ptr<CodeRunner> exec_env;  // null when no code process is in play
    std::vector<TraceEvent> trace;
    CostLedger cost;
    Value user_state;  // always a plain data value, never a closure

    // Partition key used by the scripted backend to route this run's LLM
    // calls to its own reply queue (e.g. "exec:task-3:2"). Empty routes to
    // the default queue.
    std::string script_partition;
};

}  // namespace egur
