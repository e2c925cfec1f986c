#pragma once

// Random 3-SAT: generation, assignment checking, a brute-force solver for
// small instances, and a node-bounded DPLL for the rest. Everything is
// driven by the portable RNG so a seed reproduces the same formulas on any
// platform.
//
// Literals use the DIMACS convention: +v / -v with 1-based variables. Every
// clause has three literals over three distinct variables, canonicalized by
// ascending variable; clauses within a formula are distinct.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"

namespace egur {

struct CnfFormula {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;

    bool operator==(const CnfFormula& o) const {
        return num_vars == o.num_vars && clauses == o.clauses;
    }
};

inline const double kDefaultClauseRatio = 4.26;  // near the 3-SAT phase transition

// round(num_vars * ratio) distinct clauses over `num_vars` variables.
inline CnfFormula gen_3sat(int num_vars, double ratio, Rng& rng) {
    if (num_vars < 3) throw RunError(ErrKind::config, "3-SAT needs at least 3 variables");
    auto target = static_cast<std::size_t>(std::llround(num_vars * ratio));
    double var_triples = static_cast<double>(num_vars) * (num_vars - 1) * (num_vars - 2) / 6.0;
    if (static_cast<double>(target) > var_triples * 8.0) {
        throw RunError(ErrKind::config,
                       "cannot draw " + std::to_string(target) + " distinct 3-clauses over " +
                           std::to_string(num_vars) + " variables");
    }
    CnfFormula f;
    f.num_vars = num_vars;
    std::set<std::array<int, 3>> seen;
    while (f.clauses.size() < target) {
        int a = static_cast<int>(rng.range(1, num_vars));
        int b = static_cast<int>(rng.range(1, num_vars));
        int c = static_cast<int>(rng.range(1, num_vars));
        if (a == b || a == c || b == c) continue;
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        std::array<int, 3> clause{rng.coin() ? a : -a, rng.coin() ? b : -b, rng.coin() ? c : -c};
        if (seen.insert(clause).second) f.clauses.push_back(clause);
    }
    return f;
}

// assignment[i] is the value of variable i+1.
inline bool eval_assignment(const CnfFormula& f, const std::vector<bool>& assignment) {
    if (static_cast<int>(assignment.size()) != f.num_vars) {
        throw RunError(ErrKind::config, "assignment size does not match variable count");
    }
    for (const auto& clause : f.clauses) {
        bool sat = false;
        for (int lit : clause) {
            int v = lit > 0 ? lit : -lit;
            bool val = assignment[static_cast<std::size_t>(v - 1)];
            if ((lit > 0) == val) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

// Exhaustive search; exponential, intended for num_vars <= ~20.
inline std::optional<std::vector<bool>> brute_force_sat(const CnfFormula& f) {
    if (f.num_vars > 25) {
        throw RunError(ErrKind::config, "brute force capped at 25 variables");
    }
    std::uint64_t limit = 1ull << f.num_vars;
    std::vector<bool> assignment(static_cast<std::size_t>(f.num_vars));
    for (std::uint64_t bits = 0; bits < limit; ++bits) {
        for (int i = 0; i < f.num_vars; ++i) {
            assignment[static_cast<std::size_t>(i)] = (bits >> i) & 1;
        }
        if (eval_assignment(f, assignment)) return assignment;
    }
    return std::nullopt;
}

enum class SatStatus { sat, unsat, unknown };

struct DpllResult {
    SatStatus status = SatStatus::unknown;
    std::vector<bool> assignment;  // meaningful when status == sat
};

namespace detail {

struct DpllSearch {
    const CnfFormula& f;
    std::int64_t budget;
    std::vector<int> assign;  // -1 unknown, 0 false, 1 true

    explicit DpllSearch(const CnfFormula& formula, std::int64_t node_budget)
        : f(formula), budget(node_budget), assign(static_cast<std::size_t>(formula.num_vars), -1) {}

    // 1 = satisfied under current partial assignment, 0 = conflict, -1 = open
    int clause_state(const std::array<int, 3>& clause, int& unit_lit) const {
        int unassigned = 0;
        unit_lit = 0;
        for (int lit : clause) {
            int v = (lit > 0 ? lit : -lit) - 1;
            int a = assign[static_cast<std::size_t>(v)];
            if (a == -1) {
                ++unassigned;
                unit_lit = lit;
            } else if ((lit > 0) == (a == 1)) {
                return 1;
            }
        }
        if (unassigned == 0) return 0;
        unit_lit = unassigned == 1 ? unit_lit : 0;
        return -1;
    }

    bool propagate(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& clause : f.clauses) {
                int unit = 0;
                int state = clause_state(clause, unit);
                if (state == 0) return false;
                if (state == -1 && unit != 0) {
                    int v = (unit > 0 ? unit : -unit) - 1;
                    assign[static_cast<std::size_t>(v)] = unit > 0 ? 1 : 0;
                    trail.push_back(v);
                    changed = true;
                }
            }
        }
        return true;
    }

    SatStatus search() {
        if (budget-- <= 0) return SatStatus::unknown;
        std::vector<int> trail;
        if (!propagate(trail)) {
            for (int v : trail) assign[static_cast<std::size_t>(v)] = -1;
            return SatStatus::unsat;
        }
        int branch_var = -1;
        for (int i = 0; i < f.num_vars; ++i) {
            if (assign[static_cast<std::size_t>(i)] == -1) {
                branch_var = i;
                break;
            }
        }
        if (branch_var == -1) return SatStatus::sat;

        for (int value : {1, 0}) {
            assign[static_cast<std::size_t>(branch_var)] = value;
            SatStatus s = search();
            if (s == SatStatus::sat || s == SatStatus::unknown) {
                if (s == SatStatus::unknown) {
                    assign[static_cast<std::size_t>(branch_var)] = -1;
                    for (int v : trail) assign[static_cast<std::size_t>(v)] = -1;
                }
                return s;
            }
        }
        assign[static_cast<std::size_t>(branch_var)] = -1;
        for (int v : trail) assign[static_cast<std::size_t>(v)] = -1;
        return SatStatus::unsat;
    }
};

}  // namespace detail

inline DpllResult dpll_sat(const CnfFormula& f, std::int64_t node_budget = 1'000'000) {
    detail::DpllSearch s(f, node_budget);
    DpllResult r;
    r.status = s.search();
    if (r.status == SatStatus::sat) {
        r.assignment.resize(static_cast<std::size_t>(f.num_vars));
        for (int i = 0; i < f.num_vars; ++i) {
            // Unassigned vars (possible when propagation satisfied everything)
            // default to false.
            r.assignment[static_cast<std::size_t>(i)] = s.assign[static_cast<std::size_t>(i)] == 1;
        }
    }
    return r;
}

// --- Text forms -------------------------------------------------------------

inline std::string clause_text(const std::array<int, 3>& clause) {
    std::string out = "(";
    for (int i = 0; i < 3; ++i) {
        if (i) out += " OR ";
        int lit = clause[static_cast<std::size_t>(i)];
        if (lit < 0) out += "NOT ";
        out += "x" + std::to_string(lit > 0 ? lit : -lit);
    }
    out += ")";
    return out;
}

inline std::string question_text(const CnfFormula& f) {
    std::string out = "Find a truth assignment for the variables x1..x" +
                      std::to_string(f.num_vars) +
                      " that satisfies this 3-CNF formula, or decide that none exists:\n\n";
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        if (i) out += " AND ";
        out += clause_text(f.clauses[i]);
    }
    out +=
        "\n\nEnd your reply with one line formatted exactly as\n"
        "FINAL ANSWER: x1=T,x2=F,...  (every variable assigned T or F)\n"
        "or, if the formula is unsatisfiable,\n"
        "FINAL ANSWER: UNSAT";
    return out;
}

inline std::string to_dimacs(const CnfFormula& f) {
    std::string out =
        "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
    for (const auto& clause : f.clauses) {
        out += std::to_string(clause[0]) + " " + std::to_string(clause[1]) + " " +
               std::to_string(clause[2]) + " 0\n";
    }
    return out;
}

inline CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula f;
    bool saw_header = false;
    std::vector<int> pending;
    for (const std::string& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            std::istringstream in(line);
            std::string p, cnf;
            int clauses = 0;
            if (!(in >> p >> cnf >> f.num_vars >> clauses) || cnf != "cnf") {
                throw RunError(ErrKind::config, "bad DIMACS header: " + line);
            }
            saw_header = true;
            continue;
        }
        std::istringstream in(line);
        int lit = 0;
        while (in >> lit) {
            if (lit == 0) {
                if (pending.size() != 3) {
                    throw RunError(ErrKind::config, "only 3-literal clauses are supported");
                }
                f.clauses.push_back({pending[0], pending[1], pending[2]});
                pending.clear();
            } else {
                pending.push_back(lit);
            }
        }
    }
    if (!saw_header) throw RunError(ErrKind::config, "DIMACS input has no 'p cnf' header");
    if (!pending.empty()) throw RunError(ErrKind::config, "DIMACS input ends mid-clause");
    for (const auto& clause : f.clauses) {
        for (int lit : clause) {
            int v = lit > 0 ? lit : -lit;
            if (v < 1 || v > f.num_vars) {
                throw RunError(ErrKind::config, "DIMACS literal out of range: " + std::to_string(lit));
            }
        }
    }
    return f;
}

inline nlohmann::json cnf_to_json(const CnfFormula& f) {
    nlohmann::json clauses = nlohmann::json::array();
    for (const auto& c : f.clauses) clauses.push_back({c[0], c[1], c[2]});
    return nlohmann::json{{"num_vars", f.num_vars}, {"clauses", clauses}};
}

inline CnfFormula cnf_from_json(const nlohmann::json& j) {
    CnfFormula f;
    f.num_vars = j.at("num_vars").get<int>();
    for (const auto& c : j.at("clauses")) {
        if (!c.is_array() || c.size() != 3) {
            throw RunError(ErrKind::config, "clause must be an array of 3 literals");
        }
        f.clauses.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
    return f;
}

// --- Assignment answers ------------------------------------------------------

// Parses "x1=T,x2=F,..." (case-insensitive, whitespace-tolerant). Every
// variable must be assigned exactly once; anything else throws a classified
// error with a pointed message.
inline std::vector<bool> parse_assignment(const std::string& answer, int num_vars) {
    std::vector<int> seen(static_cast<std::size_t>(num_vars), 0);
    std::vector<bool> out(static_cast<std::size_t>(num_vars), false);
    std::size_t start = 0;
    std::string text = trim(answer);
    if (text.empty()) throw RunError(ErrKind::process_failure, "empty assignment");
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string part = trim(comma == std::string::npos ? text.substr(start)
                                                           : text.substr(start, comma - start));
        if (!part.empty()) {
            std::size_t eq = part.find('=');
            if (eq == std::string::npos) {
                throw RunError(ErrKind::process_failure, "bad assignment token '" + part + "'");
            }
            std::string var = trim(part.substr(0, eq));
            std::string val = trim(part.substr(eq + 1));
            if (var.size() < 2 || (var[0] != 'x' && var[0] != 'X')) {
                throw RunError(ErrKind::process_failure, "bad variable name '" + var + "'");
            }
            int idx = 0;
            auto conv = std::from_chars(var.data() + 1, var.data() + var.size(), idx);
            if (conv.ec != std::errc() || conv.ptr != var.data() + var.size()) {
                throw RunError(ErrKind::process_failure, "bad variable name '" + var + "'");
            }
            if (idx < 1 || idx > num_vars) {
                throw RunError(ErrKind::process_failure,
                               "variable x" + std::to_string(idx) + " out of range (1.." +
                                   std::to_string(num_vars) + ")");
            }
            if (seen[static_cast<std::size_t>(idx - 1)]++) {
                throw RunError(ErrKind::process_failure,
                               "variable x" + std::to_string(idx) + " assigned twice");
            }
            bool truth;
            if (val == "T" || val == "t") truth = true;
            else if (val == "F" || val == "f") truth = false;
            else {
                throw RunError(ErrKind::process_failure,
                               "value for " + var + " must be T or F, got '" + val + "'");
            }
            out[static_cast<std::size_t>(idx - 1)] = truth;
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    for (int i = 0; i < num_vars; ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw RunError(ErrKind::process_failure,
                           "variable x" + std::to_string(i + 1) + " is not assigned");
        }
    }
    return out;
}

inline std::string assignment_text(const std::vector<bool>& assignment) {
    std::string out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (i) out += ',';
        out += "x" + std::to_string(i + 1) + "=" + (assignment[i] ? "T" : "F");
    }
    return out;
}

}  // namespace egur
