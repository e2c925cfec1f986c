#pragma once

// The default base-process suite:
//
//   CallLLM      append input as a user turn, return the assistant reply
//   CallOptLLM   same wire behavior, separate name/cost bucket (optimizer turn)
//   EvalLLM      ask for a VERDICT: PASS/FAIL judgment, return a bool
//   ContainsCode true iff the input text carries a fenced code block
//   ExecCode     run the fenced code block(s) in the episode's code runner
//   MajorityVote flatten the input into candidates and vote
//   ExtractAnswer the FINAL ANSWER: line if present, else the trimmed text
//
// LLM processes charge token costs through the active pricing table; every
// process may carry a flat dollar cost. Conversation state is shared: what
// CallLLM said is visible to the next EvalLLM, which is what makes
// evaluate-optimize loops converse rather than start over.

#include <memory>
#include <string>
#include <utility>

#include "egur/backend.hpp"
#include "egur/code_runner.hpp"
#include "egur/registry.hpp"
#include "egur/text_ops.hpp"

namespace egur {

struct RegistryOptions {
    LlmParams llm;
    PricingTable pricing;
    // Creates the episode's code runner on first ExecCode when the run state
    // has none yet. Defaults to the builtin sandbox.
    std::function<std::shared_ptr<CodeRunner>()> runner_factory =
        [] { return std::make_shared<SandboxRunner>(); };
    double flat_cost_exec_usd = 0.0;  // flat charge per ExecCode call
};

namespace detail {

inline Completion call_backend(Backend& backend, ProcessInvocation& inv,
                               const std::string& user_text, const LlmParams& params,
                               const PricingTable& pricing) {
    std::vector<ChatMessage> messages = inv.state.conversation;
    messages.push_back(ChatMessage{"user", user_text});
    Completion c = backend.complete(messages, params, inv.state.script_partition);
    inv.state.conversation.push_back(ChatMessage{"user", user_text});
    inv.state.conversation.push_back(ChatMessage{"assistant", c.text});
    inv.delta.input_tokens += c.input_tokens;
    inv.delta.output_tokens += c.output_tokens;
    inv.delta.usd += price(c.input_tokens, c.output_tokens, pricing);
    return c;
}

inline ProcessEntry make_llm_entry(std::string name, std::shared_ptr<Backend> backend,
                                   const RegistryOptions& opts) {
    ProcessEntry e;
    e.name = std::move(name);
    e.uses_llm = true;
    e.reads.conversation = e.writes.conversation = true;
    LlmParams params = opts.llm;
    PricingTable pricing = opts.pricing;
    e.handler = [backend, params, pricing](const Value& input, ProcessInvocation& inv) {
        Completion c = call_backend(*backend, inv, to_display_text(input), params, pricing);
        return Value(c.text);
    };
    return e;
}

}  // namespace detail

inline ProcessRegistry default_registry(std::shared_ptr<Backend> backend,
                                        const RegistryOptions& opts = {}) {
    ProcessRegistry reg;
    reg.add(detail::make_llm_entry("CallLLM", backend, opts));
    reg.add(detail::make_llm_entry("CallOptLLM", backend, opts));

    {
        ProcessEntry e;
        e.name = "EvalLLM";
        e.uses_llm = true;
        e.reads.conversation = e.writes.conversation = true;
        LlmParams params = opts.llm;
        PricingTable pricing = opts.pricing;
        e.handler = [backend, params, pricing](const Value& input, ProcessInvocation& inv) {
            std::string prompt =
                "Evaluate the candidate answer below. Reply with exactly one line: "
                "VERDICT: PASS if it is correct and complete, or VERDICT: FAIL otherwise.\n\n" +
                to_display_text(input);
            Completion c = detail::call_backend(*backend, inv, prompt, params, pricing);
            std::optional<bool> verdict;
            for (const std::string& raw : split_lines(c.text)) {
                std::string line = trim(raw);
                std::size_t at = line.find("VERDICT:");
                if (at == std::string::npos) continue;
                std::string rest = line.substr(at + 8);
                if (rest.find("PASS") != std::string::npos) verdict = true;
                else if (rest.find("FAIL") != std::string::npos) verdict = false;
            }
            if (!verdict) {
                throw RunError(ErrKind::process_failure,
                               "EvalLLM reply has no VERDICT: PASS/FAIL line");
            }
            return Value(*verdict);
        };
        reg.add(std::move(e));
    }

    {
        ProcessEntry e;
        e.name = "ContainsCode";
        e.handler = [](const Value& input, ProcessInvocation&) {
            return Value(!extract_code_blocks(to_display_text(input)).blocks.empty());
        };
        reg.add(std::move(e));
    }

    {
        ProcessEntry e;
        e.name = "ExecCode";
        e.uses_code = true;
        e.reads.exec_env = e.writes.exec_env = true;
        e.flat_cost_usd = opts.flat_cost_exec_usd;
        auto factory = opts.runner_factory;
        e.handler = [factory](const Value& input, ProcessInvocation& inv) {
            CodeBlocks blocks = extract_code_blocks(to_display_text(input));
            if (blocks.blocks.empty()) {
                throw RunError(ErrKind::process_failure, "no fenced code block to execute");
            }
            std::string code;
            for (const std::string& b : blocks.blocks) {
                code += b;
                if (!code.empty() && code.back() != '\n') code += '\n';
            }
            if (!inv.state.exec_env) inv.state.exec_env = factory();
            CodeRunner::Outcome out = inv.state.exec_env->run(code);
            return Value(out.output);
        };
        reg.add(std::move(e));
    }

    {
        ProcessEntry e;
        e.name = "MajorityVote";
        e.handler = [](const Value& input, ProcessInvocation&) {
            return Value(majority_vote(flatten_candidates(input)));
        };
        reg.add(std::move(e));
    }

    {
        ProcessEntry e;
        e.name = "ExtractAnswer";
        e.handler = [](const Value& input, ProcessInvocation&) {
            std::string text = to_display_text(input);
            std::optional<std::string> ans = extract_final_answer(text);
            return Value(ans ? *ans : trim(text));
        };
        reg.add(std::move(e));
    }

    return reg;
}

}  // namespace egur
