#pragma once

// Pretty-printer. Produces the canonical single-line form; parse(print(x))
// is the identity on ASTs (spans aside), which the property tests hammer.
//
// Parenthesization: each node has a structural level (seq=1, par=2,
// everything else 3; for expressions lambda=0, '++'/'<+>'=1, '+'/'-'=2,
// '*'/'/'=3, postfix=4, atoms=5). A node prints bare when its level meets
// the position's minimum. `if`/`recfun` additionally absorb any trailing
// `;`/`||` chain, so they also require the position to be a *tail* (nothing
// follows before a closing delimiter); otherwise they are parenthesized.

#include <string>

#include "egur/ast.hpp"
#include "egur/value.hpp"

namespace egur {

namespace detail {

inline int expr_level(const Expr& e) {
    switch (e.kind) {
        case ExprKind::lambda: return 0;
        case ExprKind::list_append:
        case ExprKind::dict_merge: return 1;
        case ExprKind::add:
        case ExprKind::sub: return 2;
        case ExprKind::mul:
        case ExprKind::div: return 3;
        case ExprKind::index:
        case ExprKind::apply: return 4;
        case ExprKind::var:
        case ExprKind::lit: return 5;
    }
    return 5;
}

inline void print_expr_rec(const Expr& e, int min_level, std::string& out) {
    if (expr_level(e) < min_level) {
        out += '(';
        print_expr_rec(e, 0, out);
        out += ')';
        return;
    }
    switch (e.kind) {
        case ExprKind::var: out += e.name; break;
        case ExprKind::lit: out += to_text(e.literal); break;
        case ExprKind::lambda:
            out += "lambda ";
            out += e.name;
            out += ". ";
            print_expr_rec(*e.a, 0, out);
            break;
        case ExprKind::list_append:
        case ExprKind::dict_merge:
            print_expr_rec(*e.a, 1, out);
            out += e.kind == ExprKind::list_append ? " ++ " : " <+> ";
            print_expr_rec(*e.b, 2, out);
            break;
        case ExprKind::add:
        case ExprKind::sub:
            print_expr_rec(*e.a, 2, out);
            out += e.kind == ExprKind::add ? " + " : " - ";
            print_expr_rec(*e.b, 3, out);
            break;
        case ExprKind::mul:
        case ExprKind::div:
            print_expr_rec(*e.a, 3, out);
            out += e.kind == ExprKind::mul ? " * " : " / ";
            print_expr_rec(*e.b, 4, out);
            break;
        case ExprKind::apply:
            print_expr_rec(*e.a, 4, out);
            out += '(';
            print_expr_rec(*e.b, 0, out);
            out += ')';
            break;
        case ExprKind::index:
            print_expr_rec(*e.a, 4, out);
            out += '[';
            print_expr_rec(*e.b, 0, out);
            out += ']';
            break;
    }
}

inline int prog_level(const Program& p) {
    switch (p.kind) {
        case ProgKind::seq: return 1;
        case ProgKind::par: return 2;
        default: return 3;
    }
}

inline bool prog_absorbs_tail(const Program& p) {
    return p.kind == ProgKind::if_ || p.kind == ProgKind::fix;
}

inline void print_prog_rec(const Program& p, int min_level, bool tail, std::string& out) {
    if (prog_level(p) < min_level || (prog_absorbs_tail(p) && !tail)) {
        out += '(';
        print_prog_rec(p, 1, true, out);
        out += ')';
        return;
    }
    switch (p.kind) {
        case ProgKind::base_proc:
        case ProgKind::recur: out += p.name; break;
        case ProgKind::ret: out += "return"; break;
        case ProgKind::get: out += "get"; break;
        case ProgKind::pure:
            out += "pure ";
            print_expr_rec(*p.expr, 0, out);
            break;
        case ProgKind::put:
            out += "put ";
            print_expr_rec(*p.expr, 0, out);
            break;
        case ProgKind::seq:
            print_prog_rec(*p.a, 2, false, out);
            out += "; ";
            print_prog_rec(*p.b, 1, tail, out);
            break;
        case ProgKind::par:
            print_prog_rec(*p.a, 3, false, out);
            out += " || ";
            print_prog_rec(*p.b, 2, tail, out);
            break;
        case ProgKind::if_:
            out += "if ";
            print_prog_rec(*p.a, 1, true, out);
            out += " then ";
            print_prog_rec(*p.b, 1, true, out);
            out += " else ";
            print_prog_rec(*p.c, 1, tail, out);
            break;
        case ProgKind::fix:
            out += "recfun ";
            out += p.name;
            out += ": ";
            print_prog_rec(*p.a, 1, tail, out);
            break;
    }
}

}  // namespace detail

inline std::string print_expr(const Expr& e) {
    std::string out;
    detail::print_expr_rec(e, 0, out);
    return out;
}

inline std::string pretty_print(const Program& p) {
    std::string out;
    detail::print_prog_rec(p, 1, true, out);
    return out;
}

inline std::string pretty_print(const ProgPtr& p) { return pretty_print(*p); }

}  // namespace egur
