#pragma once

// Exact cost accounting. A CostLedger accumulates token counts, dollars, and
// a per-process dollar breakdown. Ledgers add associatively; equality checks
// use a tight tolerance because the *same* additions performed in the same
// order must reproduce bit-identical doubles, while independently re-derived
// totals (e.g. from a trace) may differ by rounding only.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace egur {

struct CostLedger {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    double usd = 0.0;
    std::map<std::string, double> per_process;  // dollars attributed per process name

    CostLedger& operator+=(const CostLedger& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        usd += o.usd;
        for (const auto& [k, v] : o.per_process) per_process[k] += v;
        return *this;
    }

    friend CostLedger operator+(CostLedger a, const CostLedger& b) {
        a += b;
        return a;
    }

    bool is_zero() const {
        return input_tokens == 0 && output_tokens == 0 && usd == 0.0 && per_process.empty();
    }

    bool approx_equal(const CostLedger& o, double tol = 1e-9) const {
        if (input_tokens != o.input_tokens || output_tokens != o.output_tokens) return false;
        if (std::abs(usd - o.usd) > tol) return false;
        for (const auto& [k, v] : per_process) {
            auto it = o.per_process.find(k);
            double ov = it == o.per_process.end() ? 0.0 : it->second;
            if (std::abs(v - ov) > tol) return false;
        }
        for (const auto& [k, v] : o.per_process) {
            if (!per_process.count(k) && std::abs(v) > tol) return false;
        }
        return true;
    }
};

inline nlohmann::json ledger_to_json(const CostLedger& c) {
    nlohmann::json j{{"input_tokens", c.input_tokens},
                     {"output_tokens", c.output_tokens},
                     {"usd", c.usd}};
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [k, v] : c.per_process) per[k] = v;
    j["per_process"] = per;
    return j;
}

inline CostLedger ledger_from_json(const nlohmann::json& j) {
    CostLedger c;
    c.input_tokens = j.value("input_tokens", std::int64_t{0});
    c.output_tokens = j.value("output_tokens", std::int64_t{0});
    c.usd = j.value("usd", 0.0);
    if (j.contains("per_process")) {
        for (auto it = j["per_process"].begin(); it != j["per_process"].end(); ++it) {
            c.per_process[it.key()] = it.value().get<double>();
        }
    }
    return c;
}

}  // namespace egur
