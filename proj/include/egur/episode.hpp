#pragma once

// One learning episode: the Guide proposes k strategies for the task, all
// of them run against fresh states, the first slot's answer is the
// episode's answer, and the Consolidator folds what happened back into
// memory. The answer phase reads memory without touching it, so a stream
// driver may run answer phases against a snapshot and consolidate later.

#include <memory>
#include <string>
#include <vector>

#include "egur/backend.hpp"
#include "egur/consolidator.hpp"
#include "egur/context.hpp"
#include "egur/experience.hpp"
#include "egur/guide.hpp"
#include "egur/interp.hpp"
#include "egur/processes.hpp"
#include "egur/prompts.hpp"
#include "egur/tasks.hpp"
#include "egur/text_ops.hpp"

namespace egur {

struct EgurDeps {
    std::shared_ptr<Backend> llm;
    PricingTable pricing;
    PromptSet prompts = default_prompts();
    ProcessRegistry registry;  // build with make_egur_deps or default_registry
    Verifier verifier;
    RunOptions run_options;
    RetentionPolicy retention;
    std::size_t k = 3;  // candidates per episode
};

inline EgurDeps make_egur_deps(std::shared_ptr<Backend> llm, Verifier verifier,
                               const RegistryOptions& reg_opts = {}, std::size_t k = 3) {
    EgurDeps deps;
    deps.llm = llm;
    deps.pricing = reg_opts.pricing;
    deps.registry = default_registry(llm, reg_opts);
    deps.verifier = std::move(verifier);
    deps.k = k;
    return deps;
}

// Everything produced before consolidation. `cost` covers the Guide's
// calls plus every candidate run.
struct AnswerPhase {
    std::vector<CandidateStrategy> candidates;
    std::vector<Experience> experiences;  // slot order, one per candidate
    std::string answer;                   // slot 1's answer ("" if it failed)
    BinaryVerdict verdict;
    bool chosen_failed = false;
    CostLedger cost;
};

namespace detail {

inline std::string answer_from_output(const Value& out) {
    std::string text = to_display_text(out);
    if (auto final = extract_final_answer(text)) return *final;
    return trim(text);
}

}  // namespace detail

// Runs one candidate in a fresh state; failures become evidence, never
// exceptions.
inline Experience run_candidate(const EgurDeps& deps, const TaskInstance& task,
                                const CandidateStrategy& candidate) {
    Experience exp;
    exp.question = task.question;
    exp.strategy_text = candidate.text;
    exp.slot = static_cast<int>(candidate.slot);

    RunState state;
    state.script_partition = "exec:" + task.id + ":" + std::to_string(candidate.slot);
    RunOptions opts = deps.run_options;
    opts.seed = mix_seed(opts.seed, fnv1a64(state.script_partition));
    try {
        Value out = run(candidate.program, Value(task.question), state, deps.registry, opts);
        exp.answer = detail::answer_from_output(out);
        exp.feedback = deps.verifier(task, exp.answer);
    } catch (const RunError& e) {
        exp.failed = true;
        exp.error = e.what();
        exp.feedback = BinaryVerdict{false, std::string("run failed: ") + e.what()};
    }
    exp.trace = std::move(state.trace);
    exp.cost = state.cost;
    return exp;
}

// Guide + k candidate runs against a read-only view of memory.
inline AnswerPhase answer_task(const EgurDeps& deps, const TaskInstance& task,
                               const Context& ctx) {
    if (deps.k == 0) throw RunError(ErrKind::config, "an episode needs at least one candidate");
    AnswerPhase phase;
    phase.candidates = guide_generate(*deps.llm, deps.pricing, deps.registry, deps.prompts, ctx,
                                      task, deps.k, "guide:" + task.id, phase.cost);
    for (const CandidateStrategy& candidate : phase.candidates) {
        Experience exp = run_candidate(deps, task, candidate);
        phase.cost += exp.cost;
        phase.experiences.push_back(std::move(exp));
    }
    const Experience& chosen = phase.experiences.front();
    phase.answer = chosen.answer;
    phase.verdict = chosen.feedback;
    phase.chosen_failed = chosen.failed;
    return phase;
}

struct EpisodeResult {
    AnswerPhase answer;
    ConsolidateResult consolidation;
    CostLedger consolidate_cost;
};

// Full episode against live memory: answer, then consolidate.
inline EpisodeResult egur_episode(const EgurDeps& deps, const TaskInstance& task, Context& ctx) {
    EpisodeResult result;
    result.answer = answer_task(deps, task, ctx);
    result.consolidation = consolidate(*deps.llm, deps.pricing, deps.registry, deps.prompts, ctx,
                                       task, result.answer.experiences,
                                       result.answer.verdict.correct, "consolidator:" + task.id,
                                       result.consolidate_cost, deps.retention);
    return result;
}

}  // namespace egur
