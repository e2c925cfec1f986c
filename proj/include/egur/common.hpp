#pragma once

// Shared primitives: source spans, diagnostics, the runtime error type,
// portable hashing/RNG, and canonical float/string formatting.
// Everything downstream (lexer, printer, trace digests, reports) funnels
// through these so that output bytes are stable across platforms.

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace egur {

// Half-open byte range [begin, end) into the source text, plus the 1-based
// line/column of `begin` for human-facing messages.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int column = 1;
};

inline SourceSpan join_spans(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    if (b.end > s.end) s.end = b.end;
    return s;
}

struct Diagnostic {
    SourceSpan span;
    std::string message;
};

inline std::string format_diagnostic(const Diagnostic& d, std::string_view file = "<input>") {
    std::string out(file);
    out += ':';
    out += std::to_string(d.span.line);
    out += ':';
    out += std::to_string(d.span.column);
    out += ": ";
    out += d.message;
    return out;
}

// Classified runtime failures. Parsing never throws (it returns diagnostics);
// everything that can go wrong while *running* a strategy throws RunError so
// the episode layer can turn it into a failed experience instead of aborting.
enum class ErrKind {
    type_error,        // wrong value shape fed to an operator or process
    unbound_name,      // variable or process name not in scope
    fix_budget,        // recursion unrolled past the configured bound
    process_failure,   // a base process reported failure
    backend,           // LLM backend failure (queue exhausted, HTTP error)
    timeout,           // code execution exceeded its deadline or step limit
    bad_state,         // state invariant violated (e.g. closure into userState)
    config,            // invalid configuration / CLI input
    io,                // file system problems
};

inline const char* err_kind_name(ErrKind k) {
    switch (k) {
        case ErrKind::type_error: return "type_error";
        case ErrKind::unbound_name: return "unbound_name";
        case ErrKind::fix_budget: return "fix_budget";
        case ErrKind::process_failure: return "process_failure";
        case ErrKind::backend: return "backend";
        case ErrKind::timeout: return "timeout";
        case ErrKind::bad_state: return "bad_state";
        case ErrKind::config: return "config";
        case ErrKind::io: return "io";
    }
    return "unknown";
}

class RunError : public std::runtime_error {
public:
    RunError(ErrKind kind, std::string message, SourceSpan span = {})
        : std::runtime_error(std::string(err_kind_name(kind)) + ": " + message),
          kind_(kind),
          span_(span) {}

    ErrKind kind() const { return kind_; }
    const SourceSpan& span() const { return span_; }

private:
    ErrKind kind_;
    SourceSpan span_;
};

// --- Hashing -----------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// --- Portable RNG ------------------------------------------------------

// splitmix64: tiny, seedable, identical on every platform. Standard-library
// distributions are implementation-defined, so anything that must reproduce
// byte-identical output (task generation, shuffles) goes through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) without modulo bias (rejection sampling).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw RunError(ErrKind::config, "Rng::below(0)");
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double unit() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool coin() { return (next_u64() & 1) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {  // Fisher–Yates, portable
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derive a stream-specific seed from a run seed and a position; mixes both
// through splitmix so adjacent positions are uncorrelated.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t position) {
    Rng r(seed ^ (0x632be59bd9b4e019ull + position * 0x9e3779b97f4a7c15ull));
    return r.next_u64();
}

// --- Canonical scalar formatting ---------------------------------------

// Shortest representation that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string escape_string(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    static const char* digits = "0123456789abcdef";
                    out += "\\u00";
                    out += digits[(c >> 4) & 0xf];
                    out += digits[c & 0xf];
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
    return out;
}

// --- Small text helpers -------------------------------------------------

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace egur
