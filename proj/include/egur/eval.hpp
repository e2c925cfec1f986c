#pragma once

// Expression evaluation. Pure: reads the environment, never touches run
// state. Lambdas close over the environment by copy; application substitutes
// into the captured bindings. A step counter and a depth cap bound every
// evaluation so hostile expressions (e.g. self-application loops) surface as
// classified timeout errors rather than runaway recursion.

#include <cmath>
#include <cstdint>

#include "egur/ast.hpp"
#include "egur/common.hpp"
#include "egur/value.hpp"

namespace egur {

struct EvalBudget {
    std::uint64_t steps = 1'000'000;
    int depth = 0;
    int max_depth = 2'000;
};

namespace detail {

inline Value eval_expr_rec(const Expr& e, const Env& env, EvalBudget& budget) {
    if (budget.steps == 0) {
        throw RunError(ErrKind::timeout, "expression evaluation exceeded its step limit", e.span);
    }
    --budget.steps;
    if (budget.depth >= budget.max_depth) {
        throw RunError(ErrKind::timeout, "expression recursion too deep", e.span);
    }

    switch (e.kind) {
        case ExprKind::var: {
            const Value* v = env.find(e.name);
            if (!v) throw RunError(ErrKind::unbound_name, "unbound variable '" + e.name + "'", e.span);
            return *v;
        }
        case ExprKind::lit: return e.literal;
        case ExprKind::lambda:
            return Value(std::make_shared<const Closure>(Closure{e.name, e.a, env.bindings}));
        case ExprKind::apply: {
            Value fn = eval_expr_rec(*e.a, env, budget);
            if (!fn.is_closure()) {
                throw RunError(ErrKind::type_error,
                               std::string("cannot call a ") + fn.type_name(), e.span);
            }
            Value arg = eval_expr_rec(*e.b, env, budget);
            const Closure& c = *fn.as_closure();
            Env inner{c.captured};
            inner.bindings[c.param] = std::move(arg);
            ++budget.depth;
            Value result = eval_expr_rec(*c.body, inner, budget);
            --budget.depth;
            return result;
        }
        case ExprKind::index: {
            Value target = eval_expr_rec(*e.a, env, budget);
            Value idx = eval_expr_rec(*e.b, env, budget);
            if (target.is_list()) {
                double d = idx.as_number();
                if (d != std::floor(d) || d < 0 ||
                    d >= static_cast<double>(target.as_list().size())) {
                    throw RunError(ErrKind::type_error,
                                   "list index " + format_double(d) + " out of range for length " +
                                       std::to_string(target.as_list().size()),
                                   e.span);
                }
                return target.as_list()[static_cast<std::size_t>(d)];
            }
            if (target.is_map()) {
                const std::string& key = idx.as_string();
                auto it = target.as_map().find(key);
                if (it == target.as_map().end()) {
                    throw RunError(ErrKind::type_error, "missing map key " + escape_string(key),
                                   e.span);
                }
                return it->second;
            }
            throw RunError(ErrKind::type_error,
                           std::string("cannot index a ") + target.type_name(), e.span);
        }
        case ExprKind::list_append: {
            Value a = eval_expr_rec(*e.a, env, budget);
            Value b = eval_expr_rec(*e.b, env, budget);
            if (!a.is_list() || !b.is_list()) {
                throw RunError(ErrKind::type_error,
                               std::string("'++' needs two lists, got ") + a.type_name() +
                                   " and " + b.type_name(),
                               e.span);
            }
            ValueList out = a.as_list();
            for (const Value& v : b.as_list()) out.push_back(v);
            return Value(std::move(out));
        }
        case ExprKind::dict_merge: {
            Value a = eval_expr_rec(*e.a, env, budget);
            Value b = eval_expr_rec(*e.b, env, budget);
            if (!a.is_map() || !b.is_map()) {
                throw RunError(ErrKind::type_error,
                               std::string("'<+>' needs two maps, got ") + a.type_name() +
                                   " and " + b.type_name(),
                               e.span);
            }
            ValueMap out = a.as_map();
            for (const auto& [k, v] : b.as_map()) out[k] = v;  // right side wins
            return Value(std::move(out));
        }
        case ExprKind::add:
        case ExprKind::sub:
        case ExprKind::mul:
        case ExprKind::div: {
            Value a = eval_expr_rec(*e.a, env, budget);
            Value b = eval_expr_rec(*e.b, env, budget);
            double x = a.as_number(), y = b.as_number(), r = 0;
            switch (e.kind) {
                case ExprKind::add: r = x + y; break;
                case ExprKind::sub: r = x - y; break;
                case ExprKind::mul: r = x * y; break;
                default:
                    if (y == 0) throw RunError(ErrKind::type_error, "division by zero", e.span);
                    r = x / y;
            }
            if (!std::isfinite(r)) {
                throw RunError(ErrKind::type_error, "non-finite arithmetic result", e.span);
            }
            return Value(r);
        }
    }
    throw RunError(ErrKind::type_error, "unreachable expression kind", e.span);
}

}  // namespace detail

inline Value eval_expr(const Expr& e, const Env& env) {
    EvalBudget budget;
    return detail::eval_expr_rec(e, env, budget);
}

inline Value eval_expr(const Expr& e, const Env& env, EvalBudget& budget) {
    return detail::eval_expr_rec(e, env, budget);
}

// Call a closure on one argument under a fresh budget.
inline Value apply_closure(const ClosurePtr& c, const Value& arg) {
    Env env{c->captured};
    env.bindings[c->param] = arg;
    EvalBudget budget;
    return detail::eval_expr_rec(*c->body, env, budget);
}

// True when a closure hides anywhere inside v (userState must never hold one).
inline bool contains_closure(const Value& v) {
    if (v.is_closure()) return true;
    if (v.is_list()) {
        for (const Value& e : v.as_list())
            if (contains_closure(e)) return true;
    }
    if (v.is_map()) {
        for (const auto& [k, e] : v.as_map())
            if (contains_closure(e)) return true;
    }
    return false;
}

}  // namespace egur
