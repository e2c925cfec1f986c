#pragma once

// Tokenizer for the strategy language. Total: malformed input produces
// diagnostics plus an error token, never an exception. `#` starts a comment
// running to end of line. Keywords are reserved and never identifiers.

#include <string>
#include <string_view>
#include <vector>

#include "egur/common.hpp"

namespace egur {

enum class Tok {
    ident,
    number,
    string,
    kw_return,
    kw_pure,
    kw_get,
    kw_put,
    kw_if,
    kw_then,
    kw_else,
    kw_recfun,
    kw_lambda,
    kw_true,
    kw_false,
    kw_null,
    lparen,
    rparen,
    lbracket,
    rbracket,
    lbrace,
    rbrace,
    comma,
    colon,
    dot,
    semi,
    parpar,      // ||
    plus,
    minus,
    star,
    slash,
    concat,      // ++
    merge,       // <+>
    equals,      // = (used by the sandbox statement form, not by strategies)
    eof,
    error,
};

struct Token {
    Tok type = Tok::eof;
    std::string text;    // raw spelling; for strings, the *decoded* contents
    double number = 0;   // Tok::number only
    SourceSpan span;
};

inline const char* token_name(Tok t) {
    switch (t) {
        case Tok::ident: return "identifier";
        case Tok::number: return "number";
        case Tok::string: return "string";
        case Tok::kw_return: return "'return'";
        case Tok::kw_pure: return "'pure'";
        case Tok::kw_get: return "'get'";
        case Tok::kw_put: return "'put'";
        case Tok::kw_if: return "'if'";
        case Tok::kw_then: return "'then'";
        case Tok::kw_else: return "'else'";
        case Tok::kw_recfun: return "'recfun'";
        case Tok::kw_lambda: return "'lambda'";
        case Tok::kw_true: return "'true'";
        case Tok::kw_false: return "'false'";
        case Tok::kw_null: return "'null'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::lbracket: return "'['";
        case Tok::rbracket: return "']'";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::comma: return "','";
        case Tok::colon: return "':'";
        case Tok::dot: return "'.'";
        case Tok::semi: return "';'";
        case Tok::parpar: return "'||'";
        case Tok::plus: return "'+'";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
        case Tok::slash: return "'/'";
        case Tok::concat: return "'++'";
        case Tok::merge: return "'<+>'";
        case Tok::equals: return "'='";
        case Tok::eof: return "end of input";
        case Tok::error: return "invalid token";
    }
    return "?";
}

struct LexResult {
    std::vector<Token> tokens;  // always ends with eof
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

inline LexResult lex(std::string_view src) {
    LexResult res;
    std::size_t i = 0;
    int line = 1, col = 1;

    auto here = [&](std::size_t begin, int bline, int bcol) {
        return SourceSpan{begin, i, bline, bcol};
    };
    auto advance = [&]() {
        if (i < src.size()) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto push = [&](Tok t, std::size_t begin, int bline, int bcol, std::string text = "",
                    double num = 0) {
        res.tokens.push_back(Token{t, std::move(text), num, here(begin, bline, bcol)});
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance();
            continue;
        }

        std::size_t begin = i;
        int bline = line, bcol = col;

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                      src[i] == '_')) {
                advance();
            }
            std::string word(src.substr(begin, i - begin));
            Tok t = Tok::ident;
            if (word == "return") t = Tok::kw_return;
            else if (word == "pure") t = Tok::kw_pure;
            else if (word == "get") t = Tok::kw_get;
            else if (word == "put") t = Tok::kw_put;
            else if (word == "if") t = Tok::kw_if;
            else if (word == "then") t = Tok::kw_then;
            else if (word == "else") t = Tok::kw_else;
            else if (word == "recfun") t = Tok::kw_recfun;
            else if (word == "lambda") t = Tok::kw_lambda;
            else if (word == "true") t = Tok::kw_true;
            else if (word == "false") t = Tok::kw_false;
            else if (word == "null") t = Tok::kw_null;
            push(t, begin, bline, bcol, std::move(word));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
            if (i + 1 < src.size() && src[i] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
                advance();
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t save_i = i;
                int save_line = line, save_col = col;
                advance();
                if (i < src.size() && (src[i] == '+' || src[i] == '-')) advance();
                if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
                        advance();
                } else {
                    i = save_i;  // bare 'e' was not an exponent
                    line = save_line;
                    col = save_col;
                }
            }
            std::string text(src.substr(begin, i - begin));
            double num = 0;
            auto conv = std::from_chars(text.data(), text.data() + text.size(), num);
            if (conv.ec != std::errc()) {
                res.diagnostics.push_back({here(begin, bline, bcol), "malformed number literal"});
                push(Tok::error, begin, bline, bcol, text);
            } else {
                push(Tok::number, begin, bline, bcol, text, num);
            }
            continue;
        }

        if (c == '"') {
            advance();
            std::string decoded;
            bool closed = false;
            while (i < src.size()) {
                char d = src[i];
                if (d == '"') {
                    advance();
                    closed = true;
                    break;
                }
                if (d == '\n') break;  // strings do not span lines
                if (d == '\\') {
                    advance();
                    if (i >= src.size()) break;
                    char e = src[i];
                    advance();
                    switch (e) {
                        case '"': decoded += '"'; break;
                        case '\\': decoded += '\\'; break;
                        case 'n': decoded += '\n'; break;
                        case 't': decoded += '\t'; break;
                        case 'r': decoded += '\r'; break;
                        case 'u': {
                            unsigned code = 0;
                            bool ok = true;
                            for (int h = 0; h < 4; ++h) {
                                if (i >= src.size() || !std::isxdigit(static_cast<unsigned char>(src[i]))) {
                                    ok = false;
                                    break;
                                }
                                char x = src[i];
                                code = code * 16 +
                                       static_cast<unsigned>(x <= '9'   ? x - '0'
                                                             : x <= 'F' ? x - 'A' + 10
                                                                        : x - 'a' + 10);
                                advance();
                            }
                            if (!ok) {
                                res.diagnostics.push_back(
                                    {here(begin, bline, bcol), "malformed \\u escape"});
                            } else if (code < 0x80) {
                                decoded += static_cast<char>(code);
                            } else if (code < 0x800) {
                                decoded += static_cast<char>(0xc0 | (code >> 6));
                                decoded += static_cast<char>(0x80 | (code & 0x3f));
                            } else {
                                decoded += static_cast<char>(0xe0 | (code >> 12));
                                decoded += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
                                decoded += static_cast<char>(0x80 | (code & 0x3f));
                            }
                            break;
                        }
                        default:
                            res.diagnostics.push_back(
                                {here(begin, bline, bcol),
                                 std::string("unknown escape '\\") + e + "'"});
                    }
                    continue;
                }
                decoded += d;
                advance();
            }
            if (!closed) {
                res.diagnostics.push_back({here(begin, bline, bcol), "unterminated string literal"});
                push(Tok::error, begin, bline, bcol, decoded);
            } else {
                push(Tok::string, begin, bline, bcol, std::move(decoded));
            }
            continue;
        }

        // Operators and punctuation (longest match first).
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (c == '<' && i + 2 < src.size() && src[i + 1] == '+' && src[i + 2] == '>') {
            advance(); advance(); advance();
            push(Tok::merge, begin, bline, bcol, "<+>");
            continue;
        }
        if (two('|', '|')) {
            advance(); advance();
            push(Tok::parpar, begin, bline, bcol, "||");
            continue;
        }
        if (two('+', '+')) {
            advance(); advance();
            push(Tok::concat, begin, bline, bcol, "++");
            continue;
        }
        Tok single = Tok::error;
        switch (c) {
            case '(': single = Tok::lparen; break;
            case ')': single = Tok::rparen; break;
            case '[': single = Tok::lbracket; break;
            case ']': single = Tok::rbracket; break;
            case '{': single = Tok::lbrace; break;
            case '}': single = Tok::rbrace; break;
            case ',': single = Tok::comma; break;
            case ':': single = Tok::colon; break;
            case '.': single = Tok::dot; break;
            case ';': single = Tok::semi; break;
            case '+': single = Tok::plus; break;
            case '-': single = Tok::minus; break;
            case '*': single = Tok::star; break;
            case '/': single = Tok::slash; break;
            case '=': single = Tok::equals; break;
            default: break;
        }
        advance();
        if (single == Tok::error) {
            res.diagnostics.push_back(
                {here(begin, bline, bcol), std::string("unexpected character '") + c + "'"});
        }
        push(single, begin, bline, bcol, std::string(src.substr(begin, i - begin)));
    }

    res.tokens.push_back(Token{Tok::eof, "", 0, SourceSpan{i, i, line, col}});
    return res;
}

}  // namespace egur
