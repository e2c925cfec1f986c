#pragma once

// Abstract syntax for the strategy language.
//
// Expressions are the pure data sublanguage (variables, literals, arithmetic,
// container ops, lambda/apply). Programs are the effectful strategy layer
// (base processes, state access, sequencing, parallel split, branching,
// bounded recursion). Nodes are immutable and shared via shared_ptr; every
// node carries the source span it was parsed from (synthetic nodes keep a
// default span).

#include <memory>
#include <string>
#include <utility>

#include "egur/common.hpp"
#include "egur/value.hpp"

namespace egur {

// --- Expressions --------------------------------------------------------

enum class ExprKind {
    var,          // name
    lit,          // literal Value
    index,        // a[b]
    list_append,  // a ++ b
    dict_merge,   // a <+> b
    add,          // a + b
    sub,          // a - b
    mul,          // a * b
    div,          // a / b
    lambda,       // lambda name. a
    apply,        // a(b)
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    SourceSpan span;
    std::string name;  // var: the variable; lambda: the parameter
    Value literal;     // lit only
    ExprPtr a, b;      // binary: lhs/rhs; index: target/index; lambda: body in a;
                       // apply: callee in a, argument in b
};

// Lambdas evaluate to closures: parameter, body, and the captured bindings.
struct Closure {
    std::string param;
    ExprPtr body;
    std::map<std::string, Value> captured;
};

// Evaluation environment for expressions. Bindings map names to runtime
// values (which may be closures). Lookup is flat: closures capture by copy.
struct Env {
    std::map<std::string, Value> bindings;

    const Value* find(const std::string& name) const {
        auto it = bindings.find(name);
        return it == bindings.end() ? nullptr : &it->second;
    }
};

// --- Programs ------------------------------------------------------------

enum class ProgKind {
    base_proc,  // named process from the registry
    ret,        // return: output := input
    pure,       // pure e
    get,        // get: output := userState
    put,        // put e: userState := eval(e)
    seq,        // a ; b
    par,        // a || b
    if_,        // if a then b else c
    fix,        // recfun name: a
    recur,      // reference to an enclosing recfun
};

struct Program;
using ProgPtr = std::shared_ptr<const Program>;

struct Program {
    ProgKind kind;
    SourceSpan span;
    std::string name;  // base_proc: process name; fix: self name; recur: target name
    ExprPtr expr;      // pure / put
    ProgPtr a, b, c;   // seq/par: a,b; if: cond/then/else; fix: body in a
};

// --- Constructors --------------------------------------------------------

namespace mk {

inline ExprPtr var(std::string name, SourceSpan s = {}) {
    return std::make_shared<Expr>(Expr{ExprKind::var, s, std::move(name), {}, nullptr, nullptr});
}
inline ExprPtr lit(Value v, SourceSpan s = {}) {
    return std::make_shared<Expr>(Expr{ExprKind::lit, s, "", std::move(v), nullptr, nullptr});
}
inline ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return std::make_shared<Expr>(Expr{k, s, "", {}, std::move(a), std::move(b)});
}
inline ExprPtr index(ExprPtr target, ExprPtr idx, SourceSpan s = {}) {
    return binary(ExprKind::index, std::move(target), std::move(idx), s);
}
inline ExprPtr list_append(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::list_append, std::move(a), std::move(b), s);
}
inline ExprPtr dict_merge(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::dict_merge, std::move(a), std::move(b), s);
}
inline ExprPtr add(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::add, std::move(a), std::move(b), s);
}
inline ExprPtr sub(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::sub, std::move(a), std::move(b), s);
}
inline ExprPtr mul(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::mul, std::move(a), std::move(b), s);
}
inline ExprPtr div(ExprPtr a, ExprPtr b, SourceSpan s = {}) {
    return binary(ExprKind::div, std::move(a), std::move(b), s);
}
inline ExprPtr lambda(std::string param, ExprPtr body, SourceSpan s = {}) {
    return std::make_shared<Expr>(
        Expr{ExprKind::lambda, s, std::move(param), {}, std::move(body), nullptr});
}
inline ExprPtr apply(ExprPtr fn, ExprPtr arg, SourceSpan s = {}) {
    return binary(ExprKind::apply, std::move(fn), std::move(arg), s);
}

inline ProgPtr base(std::string process, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::base_proc, s, std::move(process), nullptr, nullptr, nullptr, nullptr});
}
inline ProgPtr ret(SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::ret, s, "", nullptr, nullptr, nullptr, nullptr});
}
inline ProgPtr pure(ExprPtr e, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::pure, s, "", std::move(e), nullptr, nullptr, nullptr});
}
inline ProgPtr get(SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::get, s, "", nullptr, nullptr, nullptr, nullptr});
}
inline ProgPtr put(ExprPtr e, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::put, s, "", std::move(e), nullptr, nullptr, nullptr});
}
inline ProgPtr seq(ProgPtr a, ProgPtr b, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::seq, s, "", nullptr, std::move(a), std::move(b), nullptr});
}
inline ProgPtr par(ProgPtr a, ProgPtr b, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::par, s, "", nullptr, std::move(a), std::move(b), nullptr});
}
inline ProgPtr iff(ProgPtr cond, ProgPtr then_branch, ProgPtr else_branch, SourceSpan s = {}) {
    return std::make_shared<Program>(Program{ProgKind::if_, s, "", nullptr, std::move(cond),
                                             std::move(then_branch), std::move(else_branch)});
}
inline ProgPtr fix(std::string self, ProgPtr body, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::fix, s, std::move(self), nullptr, std::move(body), nullptr, nullptr});
}
inline ProgPtr recur(std::string target, SourceSpan s = {}) {
    return std::make_shared<Program>(
        Program{ProgKind::recur, s, std::move(target), nullptr, nullptr, nullptr, nullptr});
}

// Fold a list of programs into a right-nested seq / par chain.
inline ProgPtr seq_all(std::vector<ProgPtr> parts) {
    if (parts.empty()) return ret();
    ProgPtr acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = seq(parts[i], acc);
    return acc;
}
inline ProgPtr par_all(std::vector<ProgPtr> parts) {
    if (parts.empty()) return ret();
    ProgPtr acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = par(parts[i], acc);
    return acc;
}

}  // namespace mk

// --- Structural equality (spans ignored) ---------------------------------

inline bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::var: return a.name == b.name;
        case ExprKind::lit: return a.literal == b.literal;
        case ExprKind::lambda: return a.name == b.name && equal(*a.a, *b.a);
        default: break;
    }
    return equal(*a.a, *b.a) && equal(*a.b, *b.b);
}

inline bool equal(const Program& a, const Program& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ProgKind::base_proc:
        case ProgKind::recur: return a.name == b.name;
        case ProgKind::ret:
        case ProgKind::get: return true;
        case ProgKind::pure:
        case ProgKind::put: return equal(*a.expr, *b.expr);
        case ProgKind::seq:
        case ProgKind::par: return equal(*a.a, *b.a) && equal(*a.b, *b.b);
        case ProgKind::if_:
            return equal(*a.a, *b.a) && equal(*a.b, *b.b) && equal(*a.c, *b.c);
        case ProgKind::fix: return a.name == b.name && equal(*a.a, *b.a);
    }
    return false;
}

inline bool equal(const ProgPtr& a, const ProgPtr& b) {
    if (!a || !b) return a == b;
    return equal(*a, *b);
}

}  // namespace egur
