#pragma once

// HTTP chat-completion backend. Speaks the common JSON shape (`messages`,
// `temperature`, `max_tokens`, `usage`) so it can point at most serving
// endpoints. Thinking mode is a per-model affair: a rule table keyed by
// model-name prefix decides whether the request carries a thinking
// extension field (and whether the provider forces temperature 1.0 with
// it); models with no rule ignore the flag with a logged warning.
//
// Request building and response parsing are plain functions so tests can
// pin the wire format against golden fixtures without a network.

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "egur/backend.hpp"
#include "egur/common.hpp"

namespace egur {

struct ThinkingRule {
    std::string model_prefix;
    bool supports_thinking = false;
    bool forces_temp_one = false;  // provider pins temperature at 1.0 when thinking
};

inline std::vector<ThinkingRule> default_thinking_rules() {
    return {{"claude", true, true}};
}

struct HttpBackendConfig {
    std::string endpoint_url;  // e.g. http://localhost:8000/v1/chat/completions
    std::string model;
    std::string api_key_env;  // name of the env var holding the key; "" = no auth
    int timeout_seconds = 120;
    int max_retries = 2;
    PricingTable pricing;
    std::vector<ThinkingRule> thinking_rules = default_thinking_rules();
};

namespace detail {

inline const ThinkingRule* find_rule(const std::vector<ThinkingRule>& rules,
                                     const std::string& model) {
    for (const auto& r : rules) {
        if (starts_with(model, r.model_prefix)) return &r;
    }
    return nullptr;
}

}  // namespace detail

// The request body, plus a warning when the thinking flag had to be
// dropped for lack of a rule.
inline nlohmann::ordered_json build_chat_request(const HttpBackendConfig& cfg,
                                                 const std::vector<ChatMessage>& messages,
                                                 const LlmParams& params,
                                                 std::string* warning = nullptr) {
    nlohmann::ordered_json body;
    body["model"] = cfg.model;
    nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        msgs.push_back(nlohmann::ordered_json{{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = msgs;
    double temperature = params.temperature;
    bool thinking = false;
    if (params.thinking) {
        const ThinkingRule* rule = detail::find_rule(cfg.thinking_rules, cfg.model);
        if (rule != nullptr && rule->supports_thinking) {
            thinking = true;
            if (rule->forces_temp_one) temperature = 1.0;
        } else if (warning != nullptr) {
            *warning = "model '" + cfg.model + "' has no thinking rule; flag ignored";
        }
    }
    body["temperature"] = temperature;
    body["max_tokens"] = params.max_tokens;
    if (thinking) {
        body["thinking"] = nlohmann::ordered_json{{"type", "enabled"},
                                                  {"budget_tokens", params.thinking_budget}};
    }
    return body;
}

// Accepts both usage spellings seen in the wild (prompt/completion and
// input/output); missing counts fall back to the chars/4 estimate.
inline Completion parse_chat_response(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw RunError(ErrKind::backend, std::string("malformed response body: ") + e.what());
    }
    Completion out;
    try {
        const auto& choices = j.at("choices");
        if (!choices.is_array() || choices.empty()) {
            throw RunError(ErrKind::backend, "malformed response body: empty choices");
        }
        out.text = choices.at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw RunError(ErrKind::backend, std::string("malformed response body: ") + e.what());
    }
    out.input_tokens = -1;
    out.output_tokens = -1;
    if (j.contains("usage") && j["usage"].is_object()) {
        const auto& u = j["usage"];
        auto pick = [&](const char* a, const char* b) -> std::int64_t {
            if (u.contains(a) && u[a].is_number()) return u[a].get<std::int64_t>();
            if (u.contains(b) && u[b].is_number()) return u[b].get<std::int64_t>();
            return -1;
        };
        out.input_tokens = pick("prompt_tokens", "input_tokens");
        out.output_tokens = pick("completion_tokens", "output_tokens");
    }
    if (out.output_tokens < 0) out.output_tokens = approx_tokens(out.text);
    if (out.input_tokens < 0) out.input_tokens = 0;
    return out;
}

// Splits http://host:port/path into pieces httplib understands.
struct ParsedUrl {
    std::string scheme;
    std::string host_port;  // scheme://host:port
    std::string path;
};

inline ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw RunError(ErrKind::config, "endpoint url needs a scheme: " + url);
    }
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https") {
        throw RunError(ErrKind::config, "unsupported url scheme: " + out.scheme);
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        out.host_port = url;
        out.path = "/";
    } else {
        out.host_port = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    if (out.host_port.size() == scheme_end + 3) {
        throw RunError(ErrKind::config, "endpoint url has an empty host: " + url);
    }
    return out;
}

// Transport is injectable so retry/backoff logic is testable without
// sockets: given (path, headers-as-json-ignored, body) return (status,
// body) or status 0 for a transport failure.
using HttpTransport =
    std::function<std::pair<int, std::string>(const std::string& path, const std::string& body,
                                              const std::vector<std::pair<std::string, std::string>>& headers)>;

HttpTransport make_httplib_transport(const HttpBackendConfig& cfg);  // defined in http_client.hpp

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg, HttpTransport transport,
                         std::function<void(const std::string&)> warn = {})
        : cfg_(std::move(cfg)), transport_(std::move(transport)), warn_(std::move(warn)) {
        if (cfg_.timeout_seconds <= 0) {
            throw RunError(ErrKind::config, "http timeout must be positive");
        }
        if (cfg_.max_retries < 0) {
            throw RunError(ErrKind::config, "http retries must be non-negative");
        }
    }

    Completion complete(const std::vector<ChatMessage>& messages, const LlmParams& params,
                        const std::string& /*partition*/) override {
        std::string warning;
        nlohmann::ordered_json body = build_chat_request(cfg_, messages, params, &warning);
        if (!warning.empty() && warn_) warn_(warning);

        std::vector<std::pair<std::string, std::string>> headers;
        if (!cfg_.api_key_env.empty()) {
            const char* key = std::getenv(cfg_.api_key_env.c_str());
            if (key == nullptr || *key == '\0') {
                throw RunError(ErrKind::config,
                               "environment variable " + cfg_.api_key_env + " is not set");
            }
            headers.emplace_back("Authorization", std::string("Bearer ") + key);
        }

        ParsedUrl url = parse_url(cfg_.endpoint_url);
        std::string payload = body.dump();
        int last_status = 0;
        std::string last_body;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
            }
            auto [status, reply] = transport_(url.path, payload, headers);
            last_status = status;
            last_body = reply;
            if (status >= 200 && status < 300) return parse_chat_response(reply);
            bool retryable = status == 0 || status == 429 || status >= 500;
            if (!retryable) break;
        }
        std::string detail = last_status == 0 ? "transport failure"
                                              : "HTTP status " + std::to_string(last_status);
        throw RunError(ErrKind::backend,
                       detail + " after " + std::to_string(cfg_.max_retries) + " retries" +
                           (last_body.empty() ? "" : ": " + last_body.substr(0, 200)));
    }

    const char* name() const override { return "http"; }

    // Test hook: shrink the base backoff so retry tests run fast.
    void set_backoff_ms(int ms) { backoff_ms_ = ms; }

private:
    HttpBackendConfig cfg_;
    HttpTransport transport_;
    std::function<void(const std::string&)> warn_;
    int backoff_ms_ = 250;
};

}  // namespace egur
