#pragma once

// The Guide proposes candidate strategy programs for a task, informed by
// the memory context. Every reply is parsed and validated; a bad reply
// earns a bounded number of retries and then falls back to a builtin, so
// guidance can degrade but never abort an episode.

#include <string>
#include <vector>

#include "egur/backend.hpp"
#include "egur/context.hpp"
#include "egur/printer.hpp"
#include "egur/parser.hpp"
#include "egur/prompts.hpp"
#include "egur/registry.hpp"
#include "egur/strategies.hpp"
#include "egur/tasks.hpp"
#include "egur/text_ops.hpp"
#include "egur/validate.hpp"

namespace egur {

inline constexpr std::size_t kGuideRetries = 2;
inline const char* kFallbackStrategy = "codeact";

struct CandidateStrategy {
    ProgPtr program;
    std::string text;  // canonical pretty-printed form
    std::size_t slot = 1;
    bool from_fallback = false;
    std::string source_error;  // why the fallback was taken, when it was
};

namespace detail {

// First fenced block if any, else the whole reply. Blank extraction is an
// error the caller reports back to the model.
inline std::string extract_strategy_text(const std::string& reply) {
    CodeBlocks blocks = extract_code_blocks(reply);
    if (!blocks.blocks.empty()) return trim(blocks.blocks.front());
    return trim(reply);
}

inline std::string role_hint(std::size_t slot) {
    if (slot == 1) {
        return "Exploit: if the memory's library has a strategy with a strong "
               "record on similar tasks, reuse it or adapt it minimally.";
    }
    return "Explore: propose a structure different from a plain single call "
           "(vary recursion, fan-out, or verification).";
}

// Parse + validate, returning an error message usable in a retry prompt.
inline std::string check_strategy(const std::string& text, const ProcessRegistry& reg,
                                  ProgPtr& out) {
    if (text.empty()) return "the reply contained no strategy program";
    ParseResult parsed = parse_strategy(text);
    if (!parsed.ok()) {
        if (!parsed.diagnostics.empty()) return format_diagnostic(parsed.diagnostics.front());
        return "the strategy program could not be parsed";
    }
    auto diags = validate(*parsed.program, reg.names());
    if (!diags.empty()) return format_diagnostic(diags.front());
    out = parsed.program;
    return "";
}

}  // namespace detail

// One guided candidate. LLM failures (exhausted script, transport) skip
// straight to the fallback; malformed strategies get retries first.
inline CandidateStrategy guide_one(Backend& llm, const PricingTable& pricing,
                                   const ProcessRegistry& reg, const PromptSet& prompts,
                                   const Context& ctx, const TaskInstance& task,
                                   std::size_t slot, std::size_t k,
                                   const std::string& partition, CostLedger& cost) {
    CandidateStrategy out;
    out.slot = slot;

    std::map<std::string, std::string> vars{
        {"grammar", grammar_reference()},
        {"context", serialize_context(ctx)},
        {"question", task.question},
        {"slot", std::to_string(slot)},
        {"k", std::to_string(k)},
        {"role_hint", detail::role_hint(slot)},
    };

    LlmParams params;
    std::string prompt = render_prompt(prompts.guide, vars);
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= kGuideRetries; ++attempt) {
        std::vector<ChatMessage> messages{{"user", prompt}};
        Completion reply;
        try {
            reply = llm.complete(messages, params, partition);
        } catch (const RunError& e) {
            out.source_error = e.what();
            break;  // backend trouble: retrying will not help, fall back
        }
        cost.input_tokens += reply.input_tokens;
        cost.output_tokens += reply.output_tokens;
        double usd = price(reply.input_tokens, reply.output_tokens, pricing);
        cost.usd += usd;
        cost.per_process["Guide"] += usd;

        std::string text = detail::extract_strategy_text(reply.text);
        ProgPtr program;
        last_error = detail::check_strategy(text, reg, program);
        if (last_error.empty()) {
            out.program = program;
            out.text = pretty_print(*program);
            return out;
        }
        out.source_error = last_error;
        vars["error"] = last_error;
        vars["previous"] = reply.text;
        prompt = render_prompt(prompts.guide_retry, vars);
    }

    out.program = builtin_strategy(kFallbackStrategy);
    out.text = pretty_print(*out.program);
    out.from_fallback = true;
    return out;
}

// k candidates for one task, slots 1..k, all charged to `cost`.
inline std::vector<CandidateStrategy> guide_generate(Backend& llm, const PricingTable& pricing,
                                                     const ProcessRegistry& reg,
                                                     const PromptSet& prompts, const Context& ctx,
                                                     const TaskInstance& task, std::size_t k,
                                                     const std::string& partition,
                                                     CostLedger& cost) {
    std::vector<CandidateStrategy> out;
    out.reserve(k);
    for (std::size_t slot = 1; slot <= k; ++slot) {
        out.push_back(guide_one(llm, pricing, reg, prompts, ctx, task, slot, k, partition, cost));
    }
    return out;
}

}  // namespace egur
