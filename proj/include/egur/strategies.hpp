#pragma once

// The builtin strategy library. Each strategy is kept as concrete syntax and
// parsed on demand, so the parser stays the single source of truth for
// shapes. `classify` summarizes which combinators and capability classes a
// strategy uses (the same axes the builtin table is organized along).

#include <set>
#include <string>
#include <vector>

#include "egur/ast.hpp"
#include "egur/common.hpp"
#include "egur/parser.hpp"
#include "egur/registry.hpp"

namespace egur {

inline const std::vector<std::string>& builtin_strategy_names() {
    static const std::vector<std::string> names{"cot", "self_consistency", "code", "eval_opt",
                                                "codeact"};
    return names;
}

// Number of parallel samples self-consistency draws by default.
inline constexpr int kSelfConsistencySamples = 10;

inline std::string builtin_strategy_text(const std::string& name,
                                         int fanout = kSelfConsistencySamples) {
    if (name == "cot") {
        return "CallLLM";
    }
    if (name == "self_consistency") {
        if (fanout < 2) throw RunError(ErrKind::config, "self_consistency needs fanout >= 2");
        std::string par = "CallLLM";
        for (int i = 1; i < fanout; ++i) par += " || CallLLM";
        return par + "; MajorityVote";  // `||` binds tighter than `;`
    }
    if (name == "code") {
        return "CallLLM; if ContainsCode then ExecCode else return";
    }
    if (name == "eval_opt") {
        return "recfun EvalOpt: CallOptLLM; if EvalLLM then return else EvalOpt";
    }
    if (name == "codeact") {
        return "recfun CodeAct: CallLLM; if ContainsCode then ExecCode; CodeAct else return";
    }
    throw RunError(ErrKind::config, "unknown builtin strategy '" + name + "'");
}

inline ProgPtr builtin_strategy(const std::string& name, int fanout = kSelfConsistencySamples) {
    ParseResult r = parse_strategy(builtin_strategy_text(name, fanout));
    if (!r.ok()) {
        throw RunError(ErrKind::config, "builtin strategy '" + name + "' failed to parse: " +
                                            (r.diagnostics.empty() ? "?" : r.diagnostics[0].message));
    }
    return r.program;
}

// Which combinators appear, and which capability classes the referenced
// processes draw on (per the registry's entry flags).
struct StrategyTraits {
    bool uses_seq = false;
    bool uses_par = false;
    bool uses_if = false;
    bool uses_fix = false;
    bool uses_llm = false;
    bool uses_code = false;
    std::set<std::string> processes;

    bool operator==(const StrategyTraits& o) const {
        return uses_seq == o.uses_seq && uses_par == o.uses_par && uses_if == o.uses_if &&
               uses_fix == o.uses_fix && uses_llm == o.uses_llm && uses_code == o.uses_code &&
               processes == o.processes;
    }
};

namespace detail {
inline void classify_rec(const Program& p, const ProcessRegistry& reg, StrategyTraits& t) {
    switch (p.kind) {
        case ProgKind::base_proc: {
            t.processes.insert(p.name);
            if (const ProcessEntry* e = reg.find(p.name)) {
                t.uses_llm = t.uses_llm || e->uses_llm;
                t.uses_code = t.uses_code || e->uses_code;
            }
            break;
        }
        case ProgKind::seq: t.uses_seq = true; break;
        case ProgKind::par: t.uses_par = true; break;
        case ProgKind::if_: t.uses_if = true; break;
        case ProgKind::fix: t.uses_fix = true; break;
        default: break;
    }
    if (p.a) classify_rec(*p.a, reg, t);
    if (p.b) classify_rec(*p.b, reg, t);
    if (p.c) classify_rec(*p.c, reg, t);
}
}  // namespace detail

inline StrategyTraits classify(const Program& p, const ProcessRegistry& reg) {
    StrategyTraits t;
    detail::classify_rec(p, reg, t);
    return t;
}

}  // namespace egur
