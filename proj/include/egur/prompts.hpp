#pragma once

// Prompt templates for the Guide and Consolidator roles. The defaults are
// embedded; a prompts directory can override any of them by dropping in
// files named guide.md, guide_retry.md, consolidator.md. Placeholders use
// {{name}} and unknown placeholders pass through untouched.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "egur/common.hpp"

namespace egur {

struct PromptSet {
    std::string guide;
    std::string guide_retry;
    std::string consolidator;
};

inline std::string render_prompt(const std::string& tmpl,
                                 const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        std::size_t open = tmpl.find("{{", i);
        if (open == std::string::npos) {
            out.append(tmpl, i, tmpl.size() - i);
            break;
        }
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, i, tmpl.size() - i);
            break;
        }
        out.append(tmpl, i, open - i);
        std::string name = tmpl.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it != vars.end()) {
            out += it->second;
        } else {
            out += "{{" + name + "}}";
        }
        i = close + 2;
    }
    return out;
}

// Compact language reference handed to the Guide so generated code stays
// inside the grammar.
inline const char* grammar_reference() {
    return R"(Strategy language reference
---------------------------
A strategy is a pipeline over one input value (the task question).

  ProcName              call a base process on the current value
  return                pass the current value through
  pure EXPR             compute from the current value (bound as `input`)
  get / put EXPR        read / replace the scratch state value
  A; B                  run A, feed its output to B
  A || B                run A and B on copies of the state; the result is
                        a map {"left": ..., "right": ...}
  if C then A else B    run C on the current value; it must produce a bool;
                        the chosen branch sees the original value
  recfun Name: BODY     recursion: inside BODY, `Name` re-enters it
                        (bounded by the engine's recursion budget)

Available processes:
  CallLLM       send the current text to the model, reply becomes the value
  CallOptLLM    like CallLLM, for optimize/improve turns
  EvalLLM       ask the model PASS/FAIL on the current value -> bool
  ContainsCode  true iff the value carries a fenced ``` code block
  ExecCode      execute the fenced code block(s), output becomes the value
  MajorityVote  pick the most common answer among the value's parts
  ExtractAnswer keep the FINAL ANSWER: line if present

Expressions (inside pure/put): numbers, strings, true/false/null, lists,
maps, + - * /, list ++ list, map <+> map, x[i], lambda x. BODY, f(x).

Examples:
  CallLLM
  (CallLLM || CallLLM || CallLLM); MajorityVote
  CallLLM; if ContainsCode then ExecCode else return
  recfun Loop: CallLLM; if ContainsCode then (ExecCode; Loop) else return)";
}

inline PromptSet default_prompts() {
    PromptSet p;
    p.guide = R"(You are the Guide of an experience-guided reasoning system. Given a task
and the system's memory of earlier episodes, design ONE strategy program
that will answer the task well at reasonable cost.

{{grammar}}

Memory:
{{context}}

Task:
{{question}}

You are proposing candidate {{slot}} of {{k}}. {{role_hint}}

Reply with exactly one fenced code block containing only the strategy
program. No prose outside the block.
)";
    p.guide_retry = R"(Your previous strategy could not be used.

Problem: {{error}}

Your previous reply was:
{{previous}}

{{grammar}}

Task:
{{question}}

Reply again with exactly one fenced code block containing a single valid
strategy program.
)";
    p.consolidator = R"(You are the Consolidator of an experience-guided reasoning system. You
maintain its memory: short notes and a library of strategies with track
records. Below are the current memory and the experiences from the most
recent episode. Decide what is worth keeping.

Memory:
{{context}}

Episode experiences:
{{experiences}}

Edit the memory by replying with directives, one per line (anything else
is treated as commentary and ignored):

  ADD NOTE: <one line worth remembering>
  DEL NOTE <id>
  ADD STRATEGY <task signature>:
  ```
  <strategy program>
  ```
  DEL STRATEGY <id>

Ids are the memory_entry numbers shown above. Add a strategy only when an
experience shows it working (or failing in a way worth recording); prefer
updating notes over hoarding them. Reply with directives only.
)";
    return p;
}

// Overrides defaults from guide.md / guide_retry.md / consolidator.md in
// `dir`, when present.
inline PromptSet load_prompts(const std::string& dir) {
    PromptSet p = default_prompts();
    auto read_if_present = [&](const char* file, std::string& into) {
        std::filesystem::path path = std::filesystem::path(dir) / file;
        std::ifstream in(path, std::ios::binary);
        if (!in) return;
        into.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    if (!dir.empty()) {
        if (!std::filesystem::is_directory(dir)) {
            throw RunError(ErrKind::config, "prompts directory not found: " + dir);
        }
        read_if_present("guide.md", p.guide);
        read_if_present("guide_retry.md", p.guide_retry);
        read_if_present("consolidator.md", p.consolidator);
    }
    return p;
}

}  // namespace egur
