#pragma once

// Static validation of a parsed strategy against a set of registered
// process names. Catches everything name-shaped that the parser cannot:
// unknown processes, unbound expression variables, and collisions between
// recursion names and process names (which would make the printed form
// re-parse to a different tree).

#include <set>
#include <string>
#include <vector>

#include "egur/ast.hpp"
#include "egur/common.hpp"

namespace egur {

// The one name every expression may always reference: the process input.
inline const std::string kInputBinding = "input";

namespace detail {

inline void collect_fix_names(const Program& p, std::set<std::string>& out) {
    if (p.kind == ProgKind::fix) out.insert(p.name);
    if (p.a) collect_fix_names(*p.a, out);
    if (p.b) collect_fix_names(*p.b, out);
    if (p.c) collect_fix_names(*p.c, out);
}

inline void validate_expr_rec(const Expr& e, std::set<std::string>& bound,
                              std::vector<Diagnostic>& diags) {
    switch (e.kind) {
        case ExprKind::var:
            if (!bound.count(e.name)) {
                diags.push_back({e.span, "unbound variable '" + e.name + "'"});
            }
            break;
        case ExprKind::lit: break;
        case ExprKind::lambda: {
            bool fresh = bound.insert(e.name).second;
            validate_expr_rec(*e.a, bound, diags);
            if (fresh) bound.erase(e.name);
            break;
        }
        default:
            validate_expr_rec(*e.a, bound, diags);
            validate_expr_rec(*e.b, bound, diags);
    }
}

inline void validate_prog_rec(const Program& p, const std::set<std::string>& processes,
                              const std::set<std::string>& all_fix_names,
                              std::vector<std::string>& fix_stack,
                              std::vector<Diagnostic>& diags) {
    switch (p.kind) {
        case ProgKind::base_proc:
            if (all_fix_names.count(p.name)) {
                diags.push_back({p.span, "process name '" + p.name +
                                             "' collides with a recursion name in this strategy"});
            } else if (!processes.count(p.name)) {
                diags.push_back({p.span, "unknown process '" + p.name + "'"});
            }
            break;
        case ProgKind::recur: {
            bool bound = false;
            for (const std::string& n : fix_stack) bound = bound || n == p.name;
            if (!bound) {
                diags.push_back({p.span, "recursion name '" + p.name + "' is not in scope"});
            }
            break;
        }
        case ProgKind::ret:
        case ProgKind::get: break;
        case ProgKind::pure:
        case ProgKind::put: {
            std::set<std::string> bound{kInputBinding};
            validate_expr_rec(*p.expr, bound, diags);
            break;
        }
        case ProgKind::seq:
        case ProgKind::par:
            validate_prog_rec(*p.a, processes, all_fix_names, fix_stack, diags);
            validate_prog_rec(*p.b, processes, all_fix_names, fix_stack, diags);
            break;
        case ProgKind::if_:
            validate_prog_rec(*p.a, processes, all_fix_names, fix_stack, diags);
            validate_prog_rec(*p.b, processes, all_fix_names, fix_stack, diags);
            validate_prog_rec(*p.c, processes, all_fix_names, fix_stack, diags);
            break;
        case ProgKind::fix:
            if (processes.count(p.name)) {
                diags.push_back({p.span, "recursion name '" + p.name +
                                             "' collides with a registered process"});
            }
            fix_stack.push_back(p.name);
            validate_prog_rec(*p.a, processes, all_fix_names, fix_stack, diags);
            fix_stack.pop_back();
            break;
    }
}

}  // namespace detail

inline std::vector<Diagnostic> validate(const Program& p,
                                        const std::set<std::string>& known_processes) {
    std::vector<Diagnostic> diags;
    std::set<std::string> fix_names;
    detail::collect_fix_names(p, fix_names);
    std::vector<std::string> stack;
    detail::validate_prog_rec(p, known_processes, fix_names, stack, diags);
    return diags;
}

inline std::vector<Diagnostic> validate_expr(const Expr& e) {
    std::vector<Diagnostic> diags;
    std::set<std::string> bound{kInputBinding};
    detail::validate_expr_rec(e, bound, diags);
    return diags;
}

}  // namespace egur
