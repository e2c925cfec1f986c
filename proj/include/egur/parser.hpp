#pragma once

// Recursive-descent parser for strategies and expressions.
//
// Grammar (programs; `;` and `||` are right-associative, `||` binds tighter):
//
//   program := seq EOF
//   seq     := par (';' seq)?
//   par     := unit ('||' par)?
//   unit    := 'if' seq 'then' seq 'else' seq
//            | 'recfun' NAME ':' seq
//            | atom
//   atom    := 'return' | 'get' | 'pure' expr | 'put' expr
//            | NAME | '(' seq ')'
//
// A NAME is a recursion reference iff an enclosing `recfun` binds it;
// otherwise it is a base-process name. Using a recfun's name outside its
// body is an error (it is almost certainly a mistake, not a process).
//
// Expressions (loosest to tightest, binaries left-associative):
//
//   expr    := 'lambda' NAME '.' expr | concat
//   concat  := addsub (('++' | '<+>') addsub)*
//   addsub  := muldiv (('+' | '-') muldiv)*
//   muldiv  := postfix (('*' | '/') postfix)*
//   postfix := eatom ('(' expr ')' | '[' expr ']')*
//   eatom   := NAME | literal | '(' expr ')'
//
// Container literals hold *values* only (the data sublanguage): lists are
// built from other lists with '++', maps with '<+>'.
//
// Parsing is total: failures come back as diagnostics, never exceptions.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "egur/ast.hpp"
#include "egur/common.hpp"
#include "egur/lexer.hpp"
#include "egur/value.hpp"

namespace egur {

struct ParseResult {
    ProgPtr program;  // null on failure
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return program != nullptr; }
};

struct ExprParseResult {
    ExprPtr expr;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return expr != nullptr; }
};

struct ValueParseResult {
    std::optional<Value> value;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return value.has_value(); }
};

namespace detail {

class Parser {
public:
    explicit Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : tokens_(std::move(tokens)), diags_(diags) {}

    struct Fail {};  // internal unwinding only; never escapes the API functions

    ProgPtr parse_program() {
        ProgPtr p = parse_seq();
        expect_eof();
        return p;
    }

    ExprPtr parse_full_expr() {
        ExprPtr e = parse_expr();
        expect_eof();
        return e;
    }

    Value parse_full_value() {
        Value v = parse_value();
        expect_eof();
        return v;
    }

private:
    // --- token plumbing ---------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t idx = pos_ + ahead;
        if (idx >= tokens_.size()) idx = tokens_.size() - 1;  // eof
        return tokens_[idx];
    }
    bool at(Tok t) const { return peek().type == t; }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const SourceSpan& span) {
        diags_.push_back({span, msg});
        throw Fail{};
    }
    [[noreturn]] void fail_here(const std::string& msg) { fail(msg, peek().span); }

    const Token& eat(Tok t, const char* context) {
        if (!at(t)) {
            fail_here(std::string("expected ") + token_name(t) + " " + context + ", found " +
                      token_name(peek().type));
        }
        return advance();
    }

    void expect_eof() {
        if (!at(Tok::eof)) {
            fail_here(std::string("expected end of input, found ") + token_name(peek().type));
        }
    }

    // --- programs ----------------------------------------------------------

    ProgPtr parse_seq() {
        ProgPtr left = parse_par();
        if (at(Tok::semi)) {
            advance();
            ProgPtr right = parse_seq();
            return mk::seq(left, right, join_spans(left->span, right->span));
        }
        return left;
    }

    ProgPtr parse_par() {
        ProgPtr left = parse_unit();
        if (at(Tok::parpar)) {
            advance();
            ProgPtr right = parse_par();
            return mk::par(left, right, join_spans(left->span, right->span));
        }
        return left;
    }

    ProgPtr parse_unit() {
        if (at(Tok::kw_if)) {
            SourceSpan start = advance().span;
            ProgPtr cond = parse_seq();
            eat(Tok::kw_then, "after the condition of 'if'");
            ProgPtr then_branch = parse_seq();
            eat(Tok::kw_else, "after the 'then' branch");
            ProgPtr else_branch = parse_seq();
            return mk::iff(cond, then_branch, else_branch,
                           join_spans(start, else_branch->span));
        }
        if (at(Tok::kw_recfun)) {
            SourceSpan start = advance().span;
            const Token& name = eat(Tok::ident, "after 'recfun'");
            eat(Tok::colon, "after the recfun name");
            fix_stack_.push_back(name.text);
            ProgPtr body = parse_seq();
            fix_stack_.pop_back();
            fix_seen_.insert(name.text);
            return mk::fix(name.text, body, join_spans(start, body->span));
        }
        return parse_atom();
    }

    ProgPtr parse_atom() {
        const Token& t = peek();
        switch (t.type) {
            case Tok::kw_return: advance(); return mk::ret(t.span);
            case Tok::kw_get: advance(); return mk::get(t.span);
            case Tok::kw_pure: {
                advance();
                ExprPtr e = parse_expr();
                return mk::pure(e, join_spans(t.span, e->span));
            }
            case Tok::kw_put: {
                advance();
                ExprPtr e = parse_expr();
                return mk::put(e, join_spans(t.span, e->span));
            }
            case Tok::ident: {
                advance();
                for (auto it = fix_stack_.rbegin(); it != fix_stack_.rend(); ++it) {
                    if (*it == t.text) return mk::recur(t.text, t.span);
                }
                if (fix_seen_.count(t.text)) {
                    fail(std::string("recursion name '") + t.text +
                             "' is not in scope here (its recfun has ended)",
                         t.span);
                }
                return mk::base(t.text, t.span);
            }
            case Tok::lparen: {
                advance();
                ProgPtr inner = parse_seq();
                eat(Tok::rparen, "to close '('");
                return inner;
            }
            default:
                fail_here(std::string("expected a strategy term, found ") +
                          token_name(t.type));
        }
    }

    // --- expressions ---------------------------------------------------------

    ExprPtr parse_expr() {
        if (at(Tok::kw_lambda)) {
            SourceSpan start = advance().span;
            const Token& param = eat(Tok::ident, "after 'lambda'");
            eat(Tok::dot, "after the lambda parameter");
            ExprPtr body = parse_expr();
            return mk::lambda(param.text, body, join_spans(start, body->span));
        }
        return parse_concat();
    }

    ExprPtr parse_concat() {
        ExprPtr left = parse_addsub();
        while (at(Tok::concat) || at(Tok::merge)) {
            ExprKind k = at(Tok::concat) ? ExprKind::list_append : ExprKind::dict_merge;
            advance();
            ExprPtr right = parse_addsub();
            left = mk::binary(k, left, right, join_spans(left->span, right->span));
        }
        return left;
    }

    ExprPtr parse_addsub() {
        ExprPtr left = parse_muldiv();
        while (at(Tok::plus) || at(Tok::minus)) {
            ExprKind k = at(Tok::plus) ? ExprKind::add : ExprKind::sub;
            advance();
            ExprPtr right = parse_muldiv();
            left = mk::binary(k, left, right, join_spans(left->span, right->span));
        }
        return left;
    }

    ExprPtr parse_muldiv() {
        ExprPtr left = parse_postfix();
        while (at(Tok::star) || at(Tok::slash)) {
            ExprKind k = at(Tok::star) ? ExprKind::mul : ExprKind::div;
            advance();
            ExprPtr right = parse_postfix();
            left = mk::binary(k, left, right, join_spans(left->span, right->span));
        }
        return left;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_expr_atom();
        for (;;) {
            if (at(Tok::lparen)) {
                advance();
                ExprPtr arg = parse_expr();
                const Token& close = eat(Tok::rparen, "to close the call argument");
                e = mk::apply(e, arg, join_spans(e->span, close.span));
            } else if (at(Tok::lbracket)) {
                advance();
                ExprPtr idx = parse_expr();
                const Token& close = eat(Tok::rbracket, "to close the index");
                e = mk::index(e, idx, join_spans(e->span, close.span));
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_expr_atom() {
        const Token& t = peek();
        switch (t.type) {
            case Tok::ident: advance(); return mk::var(t.text, t.span);
            case Tok::lparen: {
                advance();
                ExprPtr inner = parse_expr();
                eat(Tok::rparen, "to close '('");
                return inner;
            }
            case Tok::number:
            case Tok::minus:
            case Tok::string:
            case Tok::kw_true:
            case Tok::kw_false:
            case Tok::kw_null:
            case Tok::lbracket:
            case Tok::lbrace: {
                SourceSpan start = t.span;
                Value v = parse_value();
                SourceSpan end = pos_ > 0 ? tokens_[pos_ - 1].span : start;
                return mk::lit(std::move(v), join_spans(start, end));
            }
            default:
                fail_here(std::string("expected an expression, found ") + token_name(t.type));
        }
    }

    // --- value literals -------------------------------------------------------

    Value parse_value() {
        const Token& t = peek();
        switch (t.type) {
            case Tok::number: advance(); return Value(t.number);
            case Tok::minus: {
                advance();
                const Token& n = eat(Tok::number, "after unary '-'");
                return Value(-n.number);
            }
            case Tok::string: advance(); return Value(t.text);
            case Tok::kw_true: advance(); return Value(true);
            case Tok::kw_false: advance(); return Value(false);
            case Tok::kw_null: advance(); return Value::null();
            case Tok::lbracket: {
                advance();
                ValueList items;
                if (!at(Tok::rbracket)) {
                    items.push_back(parse_value());
                    while (at(Tok::comma)) {
                        advance();
                        items.push_back(parse_value());
                    }
                }
                eat(Tok::rbracket, "to close the list literal");
                return Value(std::move(items));
            }
            case Tok::lbrace: {
                advance();
                ValueMap entries;
                if (!at(Tok::rbrace)) {
                    parse_map_entry(entries);
                    while (at(Tok::comma)) {
                        advance();
                        parse_map_entry(entries);
                    }
                }
                eat(Tok::rbrace, "to close the map literal");
                return Value(std::move(entries));
            }
            default:
                fail_here(std::string("expected a value literal, found ") + token_name(t.type));
        }
    }

    void parse_map_entry(ValueMap& entries) {
        const Token& key = eat(Tok::string, "as a map key");
        if (entries.count(key.text)) {
            fail(std::string("duplicate map key ") + escape_string(key.text), key.span);
        }
        eat(Tok::colon, "after the map key");
        entries[key.text] = parse_value();
    }

    std::vector<Token> tokens_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    std::vector<std::string> fix_stack_;
    std::set<std::string> fix_seen_;
};

}  // namespace detail

inline ParseResult parse_strategy(std::string_view src) {
    ParseResult res;
    LexResult lexed = lex(src);
    res.diagnostics = lexed.diagnostics;
    if (!lexed.ok()) return res;
    detail::Parser p(std::move(lexed.tokens), res.diagnostics);
    try {
        res.program = p.parse_program();
    } catch (const detail::Parser::Fail&) {
        res.program = nullptr;
    }
    return res;
}

inline ExprParseResult parse_expression(std::string_view src) {
    ExprParseResult res;
    LexResult lexed = lex(src);
    res.diagnostics = lexed.diagnostics;
    if (!lexed.ok()) return res;
    detail::Parser p(std::move(lexed.tokens), res.diagnostics);
    try {
        res.expr = p.parse_full_expr();
    } catch (const detail::Parser::Fail&) {
        res.expr = nullptr;
    }
    return res;
}

inline ValueParseResult parse_value_text(std::string_view src) {
    ValueParseResult res;
    LexResult lexed = lex(src);
    res.diagnostics = lexed.diagnostics;
    if (!lexed.ok()) return res;
    detail::Parser p(std::move(lexed.tokens), res.diagnostics);
    try {
        res.value = p.parse_full_value();
    } catch (const detail::Parser::Fail&) {
        res.value.reset();
    }
    return res;
}

}  // namespace egur
