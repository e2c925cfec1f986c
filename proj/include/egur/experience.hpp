#pragma once

// One candidate execution's worth of evidence: what ran, what it answered,
// what it cost, and how it was judged. The invariant cost == cost_of_trace
// holds whenever the run finished or failed cleanly (partial traces carry
// partial cost).

#include <string>
#include <vector>

#include "egur/ledger.hpp"
#include "egur/trace.hpp"
#include "egur/verify.hpp"

namespace egur {

struct Experience {
    std::string question;
    std::string answer;  // empty when the candidate failed before answering
    std::vector<TraceEvent> trace;
    CostLedger cost;
    BinaryVerdict feedback;
    std::string strategy_text;  // canonical DSL of the candidate that ran
    int slot = 0;               // 1-based; slot 1 is the answering candidate
    bool failed = false;        // a runtime error ended the run
    std::string error;          // the error text when failed
};

}  // namespace egur
