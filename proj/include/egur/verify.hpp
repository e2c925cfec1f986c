#pragma once

// Binary verifiers. A verdict is correct/incorrect plus a detail string that
// only the consolidation layer ever sees (strategies must not be able to
// peek at grader reasoning).

#include <optional>
#include <string>

#include "egur/common.hpp"
#include "egur/sat.hpp"
#include "egur/text_ops.hpp"

namespace egur {

struct BinaryVerdict {
    bool correct = false;
    std::string detail;
};

inline BinaryVerdict verify_exact(const std::string& expected, const std::string& answer) {
    std::string want = normalize_answer(expected);
    std::string got = normalize_answer(answer);
    if (want == got) return {true, "exact match"};
    return {false, "expected '" + want + "', got '" + got + "'"};
}

// Checks a "x1=T,x2=F,..." assignment against the formula. "UNSAT" is
// accepted as an answer only when the instance is known unsatisfiable
// (known_satisfiable == false). Malformed assignments throw a classified
// error; callers in the episode layer convert that into an incorrect verdict.
inline BinaryVerdict verify_3sat(const CnfFormula& f, const std::string& answer,
                                 std::optional<bool> known_satisfiable = std::nullopt) {
    if (normalize_answer(answer) == "unsat") {
        if (known_satisfiable.has_value() && !*known_satisfiable) {
            return {true, "formula is unsatisfiable and the answer says so"};
        }
        if (known_satisfiable.has_value()) {
            return {false, "answered UNSAT but the formula is satisfiable"};
        }
        return {false, "answered UNSAT but satisfiability is not established for this instance"};
    }
    std::vector<bool> assignment = parse_assignment(answer, f.num_vars);
    if (eval_assignment(f, assignment)) {
        return {true, "assignment satisfies all " + std::to_string(f.clauses.size()) + " clauses"};
    }
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        bool sat = false;
        for (int lit : f.clauses[i]) {
            int v = lit > 0 ? lit : -lit;
            if ((lit > 0) == assignment[static_cast<std::size_t>(v - 1)]) sat = true;
        }
        if (!sat) {
            return {false, "clause " + std::to_string(i + 1) + " " + clause_text(f.clauses[i]) +
                               " is violated"};
        }
    }
    return {false, "assignment does not satisfy the formula"};
}

}  // namespace egur
