#pragma once

// Value: the data universe of the strategy language — null, bool, float,
// string, list, map. A Closure alternative exists at runtime only (lambdas
// evaluate to closures); closures never appear in literals, cannot be stored
// into userState, and print as the opaque token "<closure>".

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>  // vendored nlohmann single header

#include "egur/common.hpp"

namespace egur {

struct Closure;  // defined in ast.hpp (needs Expr)
using ClosurePtr = std::shared_ptr<const Closure>;

class Value;
using ValueList = std::vector<Value>;
using ValueMap = std::map<std::string, Value>;

class Value {
public:
    using Variant =
        std::variant<std::monostate, bool, double, std::string, ValueList, ValueMap, ClosurePtr>;

    Value() : v_(std::monostate{}) {}
    Value(bool b) : v_(b) {}
    Value(double d) : v_(d) {}
    Value(int i) : v_(static_cast<double>(i)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(ValueList l) : v_(std::move(l)) {}
    Value(ValueMap m) : v_(std::move(m)) {}
    Value(ClosurePtr c) : v_(std::move(c)) {}

    static Value null() { return Value(); }

    bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_list() const { return std::holds_alternative<ValueList>(v_); }
    bool is_map() const { return std::holds_alternative<ValueMap>(v_); }
    bool is_closure() const { return std::holds_alternative<ClosurePtr>(v_); }

    bool as_bool() const { return expect<bool>("bool"); }
    double as_number() const { return expect<double>("number"); }
    const std::string& as_string() const { return expect<std::string>("string"); }
    const ValueList& as_list() const { return expect<ValueList>("list"); }
    const ValueMap& as_map() const { return expect<ValueMap>("map"); }
    const ClosurePtr& as_closure() const { return expect<ClosurePtr>("closure"); }

    const char* type_name() const {
        switch (v_.index()) {
            case 0: return "null";
            case 1: return "bool";
            case 2: return "number";
            case 3: return "string";
            case 4: return "list";
            case 5: return "map";
            case 6: return "closure";
        }
        return "?";
    }

    const Variant& raw() const { return v_; }

    friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    template <typename T>
    const T& expect(const char* want) const {
        const T* p = std::get_if<T>(&v_);
        if (!p) {
            throw RunError(ErrKind::type_error,
                           std::string("expected ") + want + ", got " + type_name());
        }
        return *p;
    }

    Variant v_;
};

// Canonical literal text. Total; closures render as "<closure>" (which the
// parser deliberately does not accept back).
inline std::string to_text(const Value& v) {
    struct Printer {
        std::string out;
        void visit(const Value& v) {
            if (v.is_null()) {
                out += "null";
            } else if (v.is_bool()) {
                out += v.as_bool() ? "true" : "false";
            } else if (v.is_number()) {
                out += format_double(v.as_number());
            } else if (v.is_string()) {
                out += escape_string(v.as_string());
            } else if (v.is_list()) {
                out += '[';
                bool first = true;
                for (const Value& e : v.as_list()) {
                    if (!first) out += ", ";
                    first = false;
                    visit(e);
                }
                out += ']';
            } else if (v.is_map()) {
                out += '{';
                bool first = true;
                for (const auto& [k, e] : v.as_map()) {
                    if (!first) out += ", ";
                    first = false;
                    out += escape_string(k);
                    out += ": ";
                    visit(e);
                }
                out += '}';
            } else {
                out += "<closure>";
            }
        }
    } p;
    p.visit(v);
    return p.out;
}

// Text a strategy sees when a value is rendered into a prompt or transcript:
// bare strings stay raw, everything else uses the canonical literal form.
inline std::string to_display_text(const Value& v) {
    if (v.is_string()) return v.as_string();
    return to_text(v);
}

inline std::string digest(const Value& v) { return hex64(fnv1a64(to_text(v))); }

inline nlohmann::json to_json(const Value& v) {
    if (v.is_null()) return nullptr;
    if (v.is_bool()) return v.as_bool();
    if (v.is_number()) return v.as_number();
    if (v.is_string()) return v.as_string();
    if (v.is_list()) {
        nlohmann::json a = nlohmann::json::array();
        for (const Value& e : v.as_list()) a.push_back(to_json(e));
        return a;
    }
    if (v.is_map()) {
        nlohmann::json o = nlohmann::json::object();
        for (const auto& [k, e] : v.as_map()) o[k] = to_json(e);
        return o;
    }
    throw RunError(ErrKind::bad_state, "closure is not serializable");
}

inline Value value_from_json(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return Value::null();
        case nlohmann::json::value_t::boolean: return Value(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
        case nlohmann::json::value_t::number_unsigned:
        case nlohmann::json::value_t::number_float: return Value(j.get<double>());
        case nlohmann::json::value_t::string: return Value(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            ValueList l;
            for (const auto& e : j) l.push_back(value_from_json(e));
            return Value(std::move(l));
        }
        case nlohmann::json::value_t::object: {
            ValueMap m;
            for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = value_from_json(it.value());
            return Value(std::move(m));
        }
        default:
            throw RunError(ErrKind::type_error, "unsupported JSON value");
    }
}

}  // namespace egur
