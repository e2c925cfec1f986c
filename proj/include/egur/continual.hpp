#pragma once

// Prequential (test-then-train) driver over a task stream. Samples are
// grouped into batches: every sample in a batch is answered against the
// memory as it stood when the batch began (which is what makes in-batch
// parallelism safe), then the batch's consolidations apply one by one in
// stream order. Holdout checkpoints measure frozen-memory accuracy on a
// side set at chosen points in the stream. Results are deterministic for
// a given input, independent of the jobs setting.

#include <cmath>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "egur/context.hpp"
#include "egur/episode.hpp"
#include "egur/metrics.hpp"
#include "egur/tasks.hpp"

namespace egur {

struct ContinualOptions {
    std::size_t batch_size = 10;
    std::size_t jobs = 1;  // parallel answer phases within a batch
    std::vector<TaskInstance> holdout;
    std::vector<double> holdout_fractions = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    // Called after each sample's consolidation, in stream order.
    std::function<void(const SampleRecord&, const AnswerPhase&, const ConsolidateResult&)>
        on_episode;
};

struct ContinualResult {
    EvalReport report;
    Context context;
};

namespace detail {

inline std::vector<std::size_t> holdout_targets(std::size_t n,
                                                const std::vector<double>& fractions) {
    std::vector<std::size_t> targets;
    for (double f : fractions) {
        if (f < 0.0) f = 0.0;
        if (f > 1.0) f = 1.0;
        targets.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

inline HoldoutPoint eval_holdout(const EgurDeps& deps, const std::vector<TaskInstance>& holdout,
                                 const Context& ctx, std::size_t at_sample) {
    HoldoutPoint point;
    point.at_sample = at_sample;
    point.total = holdout.size();
    for (const TaskInstance& task : holdout) {
        AnswerPhase phase = answer_task(deps, task, ctx);
        if (phase.verdict.correct) ++point.correct;
        point.cost += phase.cost;
    }
    return point;
}

}  // namespace detail

inline ContinualResult run_continual(const EgurDeps& deps, const std::vector<TaskInstance>& tasks,
                                     Context initial, const ContinualOptions& opts = {}) {
    if (opts.batch_size == 0) throw RunError(ErrKind::config, "batch size must be at least 1");
    ContinualResult result;
    result.context = std::move(initial);
    result.report.batch_size = opts.batch_size;
    result.report.config["k"] = std::to_string(deps.k);
    result.report.config["batch_size"] = std::to_string(opts.batch_size);
    result.report.config["samples"] = std::to_string(tasks.size());
    result.report.config["holdout_size"] = std::to_string(opts.holdout.size());
    result.report.config["fix_max_depth"] = std::to_string(deps.run_options.fix_max_depth);
    result.report.config["seed"] = std::to_string(deps.run_options.seed);

    std::vector<std::size_t> targets = detail::holdout_targets(tasks.size(),
                                                               opts.holdout_fractions);
    std::size_t next_target = 0;
    std::size_t consumed = 0;
    auto checkpoint = [&]() {
        bool crossed = false;
        while (next_target < targets.size() && consumed >= targets[next_target]) {
            ++next_target;
            crossed = true;
        }
        if (crossed && !opts.holdout.empty()) {
            result.report.holdout.push_back(
                detail::eval_holdout(deps, opts.holdout, result.context, consumed));
        }
    };
    checkpoint();  // the before-any-learning point

    std::size_t jobs = opts.jobs == 0 ? 1 : opts.jobs;
    for (std::size_t batch_start = 0; batch_start < tasks.size();
         batch_start += opts.batch_size) {
        std::size_t batch_end = std::min(tasks.size(), batch_start + opts.batch_size);

        // Answer the whole batch against the batch-start memory.
        Context snapshot = result.context;
        std::vector<AnswerPhase> phases(batch_end - batch_start);
        if (jobs <= 1) {
            for (std::size_t i = batch_start; i < batch_end; ++i) {
                phases[i - batch_start] = answer_task(deps, tasks[i], snapshot);
            }
        } else {
            for (std::size_t wave = batch_start; wave < batch_end; wave += jobs) {
                std::size_t wave_end = std::min(batch_end, wave + jobs);
                std::vector<std::future<AnswerPhase>> futures;
                for (std::size_t i = wave; i < wave_end; ++i) {
                    futures.push_back(std::async(std::launch::async, [&deps, &snapshot,
                                                                      &task = tasks[i]]() {
                        return answer_task(deps, task, snapshot);
                    }));
                }
                for (std::size_t i = wave; i < wave_end; ++i) {
                    phases[i - batch_start] = futures[i - wave].get();
                }
            }
        }

        // Consolidate sequentially, in stream order, against live memory.
        for (std::size_t i = batch_start; i < batch_end; ++i) {
            const TaskInstance& task = tasks[i];
            AnswerPhase& phase = phases[i - batch_start];
            CostLedger consolidate_cost;
            ConsolidateResult consolidation = consolidate(
                *deps.llm, deps.pricing, deps.registry, deps.prompts, result.context, task,
                phase.experiences, phase.verdict.correct, "consolidator:" + task.id,
                consolidate_cost, deps.retention);

            SampleRecord record;
            record.index = i;
            record.task_id = task.id;
            record.task_type = task.task_type;
            record.answer = phase.answer;
            record.correct = phase.verdict.correct;
            record.chosen_failed = phase.chosen_failed;
            record.candidates = phase.candidates.size();
            record.answer_cost = phase.cost;
            record.consolidate_cost = consolidate_cost;
            if (opts.on_episode) opts.on_episode(record, phase, consolidation);
            result.report.samples.push_back(std::move(record));
        }
        consumed = batch_end;
        checkpoint();
    }
    return result;
}

}  // namespace egur
