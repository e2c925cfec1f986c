#pragma once

// Task instances and streams. Tasks live in JSONL files, one object per
// line: {"id", "taskType", "question", "gold"?, "cnf"?, "meta"?}. The two
// task types are "exact" (normalized string match against gold) and "sat3"
// (assignment checked against the embedded CNF).

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"
#include "egur/sat.hpp"
#include "egur/verify.hpp"

namespace egur {

struct TaskInstance {
    std::string id;
    std::string task_type;  // "exact" | "sat3"
    std::string question;
    std::optional<std::string> gold;
    std::optional<CnfFormula> cnf;
    std::optional<bool> satisfiable;  // meta, when established by a solver
};

inline nlohmann::json task_to_json(const TaskInstance& t) {
    nlohmann::json j{{"id", t.id}, {"taskType", t.task_type}, {"question", t.question}};
    if (t.gold) j["gold"] = *t.gold;
    if (t.cnf) j["cnf"] = cnf_to_json(*t.cnf);
    if (t.satisfiable.has_value()) j["meta"] = nlohmann::json{{"satisfiable", *t.satisfiable}};
    return j;
}

inline TaskInstance task_from_json(const nlohmann::json& j) {
    TaskInstance t;
    t.id = j.at("id").get<std::string>();
    t.task_type = j.at("taskType").get<std::string>();
    t.question = j.at("question").get<std::string>();
    if (j.contains("gold")) t.gold = j["gold"].get<std::string>();
    if (j.contains("cnf")) t.cnf = cnf_from_json(j["cnf"]);
    if (j.contains("meta") && j["meta"].contains("satisfiable")) {
        t.satisfiable = j["meta"]["satisfiable"].get<bool>();
    }
    if (t.task_type != "exact" && t.task_type != "sat3") {
        throw RunError(ErrKind::config, "task " + t.id + ": unknown taskType '" + t.task_type + "'");
    }
    if (t.task_type == "exact" && !t.gold) {
        throw RunError(ErrKind::config, "task " + t.id + ": exact tasks need a gold answer");
    }
    if (t.task_type == "sat3" && !t.cnf) {
        throw RunError(ErrKind::config, "task " + t.id + ": sat3 tasks need a cnf");
    }
    return t;
}

inline std::vector<TaskInstance> load_tasks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError(ErrKind::io, "cannot open task file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<TaskInstance> tasks;
    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw RunError(ErrKind::config,
                           path + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        try {
            tasks.push_back(task_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw RunError(ErrKind::config,
                           path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return tasks;
}

inline void save_tasks(const std::string& path, const std::vector<TaskInstance>& tasks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError(ErrKind::io, "cannot write task file: " + path);
    for (const TaskInstance& t : tasks) out << task_to_json(t).dump() << '\n';
}

// The standard verifier: dispatches on task type and converts verification
// throws (malformed assignments and the like) into incorrect verdicts so an
// episode never aborts on a bad answer.
using Verifier = std::function<BinaryVerdict(const TaskInstance&, const std::string&)>;

inline Verifier make_verifier() {
    return [](const TaskInstance& t, const std::string& answer) -> BinaryVerdict {
        try {
            if (t.task_type == "exact") {
                if (!t.gold) return {false, "task has no gold answer"};
                return verify_exact(*t.gold, answer);
            }
            if (t.task_type == "sat3") {
                if (!t.cnf) return {false, "task has no formula"};
                return verify_3sat(*t.cnf, answer, t.satisfiable);
            }
            return {false, "unknown task type '" + t.task_type + "'"};
        } catch (const RunError& e) {
            return {false, e.what()};
        }
    };
}

struct SatTaskOptions {
    int count = 20;
    int vars_min = 5;
    int vars_max = 40;
    double ratio = kDefaultClauseRatio;
    std::uint64_t seed = 0;
    bool satisfiable_only = false;
    std::int64_t solver_budget = 200'000;  // DPLL nodes per instance for labeling
};

inline std::vector<TaskInstance> gen_sat_tasks(const SatTaskOptions& opts) {
    if (opts.vars_min < 3 || opts.vars_max < opts.vars_min) {
        throw RunError(ErrKind::config, "bad variable range for 3-SAT generation");
    }
    Rng rng(opts.seed);
    std::vector<TaskInstance> tasks;
    int attempts = 0;
    const int max_attempts = opts.count * 200 + 1000;
    while (static_cast<int>(tasks.size()) < opts.count) {
        if (++attempts > max_attempts) {
            throw RunError(ErrKind::config,
                           "could not generate enough satisfiable instances; "
                           "lower --ratio or widen the variable range");
        }
        int n = static_cast<int>(rng.range(opts.vars_min, opts.vars_max));
        CnfFormula f = gen_3sat(n, opts.ratio, rng);
        std::optional<bool> satisfiable;
        DpllResult solved = dpll_sat(f, opts.solver_budget);
        if (solved.status == SatStatus::sat) satisfiable = true;
        if (solved.status == SatStatus::unsat) satisfiable = false;
        if (opts.satisfiable_only && (!satisfiable.has_value() || !*satisfiable)) continue;
        TaskInstance t;
        t.id = "sat3-" + std::to_string(opts.seed) + "-" + std::to_string(tasks.size());
        t.task_type = "sat3";
        t.question = question_text(f);
        t.cnf = std::move(f);
        t.satisfiable = satisfiable;
        tasks.push_back(std::move(t));
    }
    return tasks;
}

}  // namespace egur
