#pragma once

// LLM backends. `Backend` is the one seam the rest of the system sees:
// a chat completion given messages, sampling params, and a partition key.
//
// ScriptedBackend replays canned completions from a JSON/JSONL file and is
// the workhorse for tests and offline runs. Entries can target a partition
// so that deterministic runs stay deterministic even when calls from
// different tasks/slots interleave: a consumer asks for its partition's
// queue if one exists, else the default queue (key ""). An empty queue is a
// hard, classified error — never silent reuse.

#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "egur/common.hpp"
#include "egur/state.hpp"

namespace egur {

struct LlmParams {
    double temperature = 0.0;
    int max_tokens = 20'000;
    bool thinking = false;
    int thinking_budget = 10'000;
};

struct PricingTable {
    double usd_per_mtok_input = 0.0;
    double usd_per_mtok_output = 0.0;
};

inline double price(std::int64_t input_tokens, std::int64_t output_tokens,
                    const PricingTable& t) {
    return (static_cast<double>(input_tokens) * t.usd_per_mtok_input +
            static_cast<double>(output_tokens) * t.usd_per_mtok_output) /
           1e6;
}

struct Completion {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const std::vector<ChatMessage>& messages, const LlmParams& params,
                                const std::string& partition) = 0;
    virtual const char* name() const = 0;
};

// Fallback token accounting when a fixture omits counts: one token per four
// characters, rounded up, over the raw text.
inline std::int64_t approx_tokens(std::string_view text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

inline std::int64_t approx_tokens(const std::vector<ChatMessage>& messages) {
    std::int64_t total = 0;
    for (const ChatMessage& m : messages) total += approx_tokens(m.content);
    return total;
}

class ScriptedBackend : public Backend {
public:
    struct Entry {
        std::string text;
        std::int64_t input_tokens = -1;   // -1: derive from the request
        std::int64_t output_tokens = -1;  // -1: derive from the text
    };

    ScriptedBackend() = default;

    void push(const std::string& partition, Entry e) {
        std::lock_guard<std::mutex> lock(mu_);
        queues_[partition].push_back(std::move(e));
    }

    void push(const std::string& partition, std::string text) {
        push(partition, Entry{std::move(text), -1, -1});
    }

    // File format: a JSON array, or JSONL with one object per line. Each
    // object: {"text": "...", "partition"?: "...", "input_tokens"?: n,
    // "output_tokens"?: n}. A bare JSON string is shorthand for {"text": ...}.
    static std::shared_ptr<ScriptedBackend> load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw RunError(ErrKind::io, "cannot open script file: " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto backend = std::make_shared<ScriptedBackend>();
        backend->load_text(text, path);
        return backend;
    }

    void load_text(const std::string& text, const std::string& origin = "<script>") {
        std::string trimmed = trim(text);
        if (trimmed.empty()) return;
        if (trimmed.front() == '[') {
            nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, false);
            if (j.is_discarded() || !j.is_array()) {
                throw RunError(ErrKind::config, origin + ": script must be a JSON array or JSONL");
            }
            for (const auto& e : j) add_json_entry(e, origin);
        } else {
            for (const std::string& line : split_lines(text)) {
                if (trim(line).empty()) continue;
                nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded()) {
                    throw RunError(ErrKind::config,
                                   origin + ": bad JSONL line: " + line.substr(0, 80));
                }
                add_json_entry(j, origin);
            }
        }
    }

    Completion complete(const std::vector<ChatMessage>& messages, const LlmParams&,
                        const std::string& partition) override {
        Entry e;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = queues_.find(partition);
            if (it == queues_.end() || it->second.empty()) it = queues_.find("");
            if (it == queues_.end() || it->second.empty()) {
                throw RunError(ErrKind::backend,
                               "scripted backend exhausted for partition '" + partition + "'");
            }
            e = std::move(it->second.front());
            it->second.pop_front();
        }
        Completion c;
        c.text = std::move(e.text);
        c.input_tokens = e.input_tokens >= 0 ? e.input_tokens : approx_tokens(messages);
        c.output_tokens = e.output_tokens >= 0 ? e.output_tokens : approx_tokens(c.text);
        return c;
    }

    const char* name() const override { return "scripted"; }

    std::size_t remaining(const std::string& partition = "") const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = queues_.find(partition);
        return it == queues_.end() ? 0 : it->second.size();
    }

private:
    void add_json_entry(const nlohmann::json& j, const std::string& origin) {
        Entry e;
        std::string partition;
        if (j.is_string()) {
            e.text = j.get<std::string>();
        } else if (j.is_object()) {
            if (!j.contains("text") || !j["text"].is_string()) {
                throw RunError(ErrKind::config, origin + ": script entry needs a string \"text\"");
            }
            e.text = j["text"].get<std::string>();
            partition = j.value("partition", std::string());
            if (j.contains("input_tokens")) e.input_tokens = j["input_tokens"].get<std::int64_t>();
            if (j.contains("output_tokens"))
                e.output_tokens = j["output_tokens"].get<std::int64_t>();
        } else {
            throw RunError(ErrKind::config, origin + ": script entry must be string or object");
        }
        std::lock_guard<std::mutex> lock(mu_);
        queues_[partition].push_back(std::move(e));
    }

    mutable std::mutex mu_;
    std::map<std::string, std::deque<Entry>> queues_;
};

// Decorator that tees every request/response pair into a JSONL fixture file,
// so a live session can be replayed later through ScriptedBackend.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, const std::string& path)
        : inner_(std::move(inner)), out_(path, std::ios::binary | std::ios::app) {
        if (!out_) throw RunError(ErrKind::io, "cannot open fixture file for writing: " + path);
    }

    Completion complete(const std::vector<ChatMessage>& messages, const LlmParams& params,
                        const std::string& partition) override {
        Completion c = inner_->complete(messages, params, partition);
        nlohmann::json msgs = nlohmann::json::array();
        for (const ChatMessage& m : messages) {
            msgs.push_back({{"role", m.role}, {"content", m.content}});
        }
        nlohmann::json rec{{"text", c.text},
                           {"partition", partition},
                           {"input_tokens", c.input_tokens},
                           {"output_tokens", c.output_tokens},
                           {"request", {{"messages", msgs},
                                        {"temperature", params.temperature},
                                        {"max_tokens", params.max_tokens}}}};
        std::lock_guard<std::mutex> lock(mu_);
        out_ << rec.dump() << '\n';
        out_.flush();
        return c;
    }

    const char* name() const override { return "recording"; }

private:
    std::shared_ptr<Backend> inner_;
    std::ofstream out_;
    std::mutex mu_;
};

}  // namespace egur
