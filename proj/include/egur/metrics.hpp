#pragma once

// Evaluation records and report serialization. Reports carry no
// timestamps or machine state, so a rerun with the same inputs produces a
// byte-identical report.json / costs.csv.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"
#include "egur/ledger.hpp"

namespace egur {

// One continual-learning sample, recorded before its consolidation.
struct SampleRecord {
    std::size_t index = 0;  // 0-based position in the stream
    std::string task_id;
    std::string task_type;
    std::string answer;
    bool correct = false;
    bool chosen_failed = false;   // slot-1 candidate failed to run
    std::size_t candidates = 0;   // k actually run
    CostLedger answer_cost;       // guide + all candidate runs
    CostLedger consolidate_cost;  // consolidator turn
};

// Frozen-context accuracy on the holdout set at one point in the stream.
struct HoldoutPoint {
    std::size_t at_sample = 0;  // samples consumed when measured
    std::size_t correct = 0;
    std::size_t total = 0;
    CostLedger cost;
    double accuracy() const { return total == 0 ? 0.0 : double(correct) / double(total); }
};

struct EvalReport {
    std::map<std::string, std::string> config;  // echo of run parameters
    std::vector<SampleRecord> samples;
    std::vector<HoldoutPoint> holdout;
    std::size_t batch_size = 10;
};

inline double prequential_accuracy(const std::vector<SampleRecord>& samples) {
    if (samples.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& s : samples)
        if (s.correct) ++correct;
    return double(correct) / double(samples.size());
}

// Accuracy per consecutive batch of `batch_size` samples (last may be short).
inline std::vector<double> per_batch_accuracy(const std::vector<SampleRecord>& samples,
                                              std::size_t batch_size) {
    std::vector<double> out;
    if (batch_size == 0) return out;
    for (std::size_t start = 0; start < samples.size(); start += batch_size) {
        std::size_t end = std::min(samples.size(), start + batch_size);
        std::size_t correct = 0;
        for (std::size_t i = start; i < end; ++i)
            if (samples[i].correct) ++correct;
        out.push_back(double(correct) / double(end - start));
    }
    return out;
}

inline CostLedger total_cost(const std::vector<SampleRecord>& samples) {
    CostLedger total;
    for (const auto& s : samples) {
        total += s.answer_cost;
        total += s.consolidate_cost;
    }
    return total;
}

inline nlohmann::ordered_json sample_to_json(const SampleRecord& s) {
    nlohmann::ordered_json j;
    j["index"] = s.index;
    j["taskId"] = s.task_id;
    j["taskType"] = s.task_type;
    j["answer"] = s.answer;
    j["correct"] = s.correct;
    j["chosenFailed"] = s.chosen_failed;
    j["candidates"] = s.candidates;
    j["answerCost"] = ledger_to_json(s.answer_cost);
    j["consolidateCost"] = ledger_to_json(s.consolidate_cost);
    return j;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r,
                                             const nlohmann::ordered_json& final_context) {
    nlohmann::ordered_json j;
    j["v"] = 1;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;  // std::map: sorted keys
    j["config"] = cfg;
    j["samples"] = r.samples.size();
    j["prequentialAccuracy"] = prequential_accuracy(r.samples);
    j["perBatchAccuracy"] = per_batch_accuracy(r.samples, r.batch_size);
    j["batchSize"] = r.batch_size;

    CostLedger answering, consolidating;
    for (const auto& s : r.samples) {
        answering += s.answer_cost;
        consolidating += s.consolidate_cost;
    }
    CostLedger total = answering;
    total += consolidating;
    j["cost"] = nlohmann::ordered_json{{"answering", ledger_to_json(answering)},
                                       {"consolidating", ledger_to_json(consolidating)},
                                       {"total", ledger_to_json(total)}};

    nlohmann::ordered_json hold = nlohmann::ordered_json::array();
    for (const auto& h : r.holdout) {
        hold.push_back(nlohmann::ordered_json{{"atSample", h.at_sample},
                                              {"correct", h.correct},
                                              {"total", h.total},
                                              {"accuracy", h.accuracy()},
                                              {"cost", ledger_to_json(h.cost)}});
    }
    j["holdout"] = hold;
    j["finalContext"] = final_context;
    return j;
}

namespace detail {
inline std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}
}  // namespace detail

// Per-sample cost table. Columns are fixed; doubles print with nine
// fractional digits so reruns diff cleanly.
inline std::string costs_csv(const std::vector<SampleRecord>& samples) {
    std::string out =
        "index,task_id,correct,answer_usd,answer_tokens_in,answer_tokens_out,"
        "consolidate_usd,consolidate_tokens_in,consolidate_tokens_out\n";
    CostLedger answer_total, consolidate_total;
    std::size_t correct_total = 0;
    for (const auto& s : samples) {
        answer_total += s.answer_cost;
        consolidate_total += s.consolidate_cost;
        if (s.correct) ++correct_total;
        out += std::to_string(s.index) + ',' + s.task_id + ',' + (s.correct ? "1" : "0") + ',' +
               detail::csv_double(s.answer_cost.usd) + ',' +
               std::to_string(s.answer_cost.input_tokens) + ',' +
               std::to_string(s.answer_cost.output_tokens) + ',' +
               detail::csv_double(s.consolidate_cost.usd) + ',' +
               std::to_string(s.consolidate_cost.input_tokens) + ',' +
               std::to_string(s.consolidate_cost.output_tokens) + '\n';
    }
    out += "total,," + std::to_string(correct_total) + ',' +
           detail::csv_double(answer_total.usd) + ',' + std::to_string(answer_total.input_tokens) +
           ',' + std::to_string(answer_total.output_tokens) + ',' +
           detail::csv_double(consolidate_total.usd) + ',' +
           std::to_string(consolidate_total.input_tokens) + ',' +
           std::to_string(consolidate_total.output_tokens) + '\n';
    return out;
}

}  // namespace egur
