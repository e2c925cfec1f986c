// Acceptance harness: every shipped guarantee checked end to end, one
// [PASS]/[FAIL] line each, exit 1 if anything fails. All checks run
// offline against scripted backends and reference implementations.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "egur/egur.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace egur;

namespace {

using Clock = std::chrono::steady_clock;

std::string fenced(const std::string& program) { return "```\n" + program + "\n```"; }

TaskInstance exact_task(const std::string& id, const std::string& question,
                        const std::string& gold) {
    TaskInstance t;
    t.id = id;
    t.task_type = "exact";
    t.question = question;
    t.gold = gold;
    return t;
}

EgurDeps scripted_deps(std::shared_ptr<ScriptedBackend> backend, std::size_t k) {
    RegistryOptions reg_opts;
    reg_opts.pricing = PricingTable{3.0, 15.0};
    return make_egur_deps(std::move(backend), make_verifier(), reg_opts, k);
}

// ---- 1. interpreter semantics against the reference evaluator --------------

std::string check_semantics_oracle() {
    auto t0 = Clock::now();
    Rng rng(0xACCE01);
    for (int i = 0; i < 1000; ++i) {
        ProgPtr prog = testgen::gen_runnable_program(rng);
        Value input = testgen::gen_value(rng, 2);
        reftest::OracleOutcome outcome = reftest::compare_one(prog, input);
        if (!outcome.ok) {
            return "program " + std::to_string(i) + " (" + pretty_print(*prog) +
                   ") diverged: " + outcome.detail;
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > 30.0) return "took " + std::to_string(secs) + "s, budget is 30s";
    return "";
}

// ---- 2. exact cost accounting ----------------------------------------------

ProcessRegistry flat_cost_registry() {
    ProcessRegistry reg;
    auto flat = [&](const char* name, double usd, Value result, bool pass_through) {
        ProcessEntry e;
        e.name = name;
        e.flat_cost_usd = usd;
        e.handler = [result, pass_through](const Value& in, ProcessInvocation&) {
            return pass_through ? in : result;
        };
        reg.add(e);
    };
    flat("ProcA", 0.125, Value(), true);
    flat("ProcB", 0.25, Value(), true);
    flat("ProcC", 0.0625, Value(), true);
    flat("Yes", 0.03125, Value(true), false);
    flat("No", 0.03125, Value(false), false);
    return reg;
}

std::string check_cost_accounting() {
    ProcessRegistry reg = flat_cost_registry();
    struct Case {
        const char* src;
        double usd;
        const char* absent;  // process that must NOT appear in the ledger
    };
    const Case cases[] = {
        {"ProcA", 0.125, ""},
        {"ProcA; ProcB", 0.375, ""},
        {"ProcA; ProcB; ProcC", 0.4375, ""},
        {"ProcA || ProcB", 0.375, ""},
        {"(ProcA || ProcB) || ProcC", 0.4375, ""},
        {"ProcA || ProcB; ProcC", 0.4375, ""},
        {"(ProcA; ProcB) || ProcC", 0.4375, ""},
        {"ProcA || (ProcB || ProcC)", 0.4375, ""},
        {"if Yes then ProcA else ProcB", 0.15625, "ProcB"},
        {"if No then ProcA else ProcB", 0.28125, "ProcA"},
        {"if Yes then ProcA else ProcB; ProcC", 0.15625, "ProcB"},
        {"(if Yes then ProcA else ProcB); ProcC", 0.21875, "ProcB"},
        {"if No then ProcA else (ProcB || ProcC)", 0.34375, "ProcA"},
        {"if Yes then (ProcA || ProcA) else ProcB", 0.28125, "ProcB"},
        {"if No then ProcA else if Yes then ProcB else ProcC", 0.3125, "ProcC"},
        {"return", 0.0, ""},
        {"pure input", 0.0, ""},
        {"get; put input; ProcA", 0.125, ""},
        {"recfun L: if No then L else ProcA", 0.15625, ""},
        {"ProcA; (ProcB || (if Yes then ProcC else ProcB))", 0.46875, ""},
    };
    for (const Case& c : cases) {
        ParseResult parsed = parse_strategy(c.src);
        if (!parsed.ok()) return std::string(c.src) + ": did not parse";
        RunState state;
        Value out = run(parsed.program, Value(std::string("in")), state, reg, RunOptions{});
        (void)out;
        if (std::fabs(state.cost.usd - c.usd) > 1e-9) {
            return std::string(c.src) + ": got $" + format_double(state.cost.usd) +
                   ", hand-computed $" + format_double(c.usd);
        }
        double per_sum = 0.0;
        for (const auto& [name, usd] : state.cost.per_process) per_sum += usd;
        if (std::fabs(per_sum - state.cost.usd) > 1e-9) {
            return std::string(c.src) + ": per-process sum $" + format_double(per_sum) +
                   " != total $" + format_double(state.cost.usd);
        }
        if (c.absent[0] != '\0' && state.cost.per_process.count(c.absent)) {
            return std::string(c.src) + ": untaken branch process '" + c.absent + "' was charged";
        }
        CostLedger from_trace = cost_of_trace(state.trace);
        if (from_trace.usd != state.cost.usd || from_trace.per_process != state.cost.per_process) {
            return std::string(c.src) + ": trace cost does not reproduce the ledger";
        }
    }
    // A recursion that exhausts its budget still accounts every iteration.
    {
        ParseResult parsed = parse_strategy("recfun L: (ProcA; L)");
        RunState state;
        RunOptions opts;
        opts.fix_max_depth = 4;
        bool threw = false;
        try {
            run(parsed.program, Value(std::string("in")), state, reg, opts);
        } catch (const RunError& e) {
            threw = e.kind() == ErrKind::fix_budget;
        }
        if (!threw) return "recursion bomb did not hit the fix budget";
        if (std::fabs(state.cost.usd - 4 * 0.125) > 1e-9) {
            return "partial ledger after fix budget: $" + format_double(state.cost.usd) +
                   ", expected $0.5";
        }
    }
    return "";
}

// ---- 3. printer/parser round-trip + CodeAct shape ---------------------------

std::string check_roundtrip() {
    Rng rng(0xACCE03);
    for (int i = 0; i < 1000; ++i) {
        ProgPtr prog = testgen::gen_full_program(rng);
        std::string text = pretty_print(*prog);
        ParseResult back = parse_strategy(text);
        if (!back.ok()) return "canonical text did not reparse: " + text;
        if (!equal(prog, back.program)) return "AST changed across print/parse: " + text;
        if (pretty_print(*back.program) != text) return "printing is not idempotent: " + text;
    }

    ProgPtr codeact = builtin_strategy("codeact");
    const Program& fix = *codeact;
    if (fix.kind != ProgKind::fix || fix.name != "CodeAct") return "codeact is not a recfun";
    const Program& body = *fix.a;
    if (body.kind != ProgKind::seq || body.a->kind != ProgKind::base_proc ||
        body.a->name != "CallLLM") {
        return "codeact body does not start with CallLLM";
    }
    const Program& branch = *body.b;
    if (branch.kind != ProgKind::if_ || branch.a->name != "ContainsCode") {
        return "codeact does not branch on ContainsCode";
    }
    if (branch.b->kind != ProgKind::seq || branch.b->a->name != "ExecCode" ||
        branch.b->b->kind != ProgKind::recur || branch.b->b->name != "CodeAct") {
        return "codeact then-branch is not ExecCode; CodeAct";
    }
    if (branch.c->kind != ProgKind::ret) return "codeact else-branch is not return";
    return "";
}

// ---- 4. structural classification table -------------------------------------

std::string check_classification_table() {
    auto backend = std::make_shared<ScriptedBackend>();
    ProcessRegistry reg = default_registry(backend);
    struct Row {
        const char* name;
        bool seq, par, if_, fix, llm, code;
    };
    const Row rows[] = {
        {"cot", false, false, false, false, true, false},
        {"self_consistency", true, true, false, false, true, false},
        {"code", true, false, true, false, true, true},
        {"eval_opt", true, false, true, true, true, false},
        {"codeact", true, false, true, true, true, true},
    };
    for (const Row& row : rows) {
        StrategyTraits t = classify(*builtin_strategy(row.name), reg);
        if (t.uses_seq != row.seq || t.uses_par != row.par || t.uses_if != row.if_ ||
            t.uses_fix != row.fix || t.uses_llm != row.llm || t.uses_code != row.code) {
            std::ostringstream os;
            os << row.name << ": got seq=" << t.uses_seq << " par=" << t.uses_par
               << " if=" << t.uses_if << " fix=" << t.uses_fix << " llm=" << t.uses_llm
               << " code=" << t.uses_code;
            return os.str();
        }
    }
    return "";
}

// ---- 5. 3-SAT verifier against exhaustive ground truth -----------------------

std::string check_sat_verifier() {
    auto t0 = Clock::now();
    Rng rng(0xACCE05);
    for (int round = 0; round < 200; ++round) {
        int n = static_cast<int>(rng.range(4, 12));
        double ratio = 1.5 + rng.unit() * 2.7;  // stays under small-n capacity
        CnfFormula f = gen_3sat(n, ratio, rng);

        bool any_sat = false;
        std::vector<bool> assignment(static_cast<std::size_t>(n));
        for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
            std::string answer;
            for (int v = 0; v < n; ++v) {
                assignment[static_cast<std::size_t>(v)] = (bits >> v) & 1;
                if (v) answer += ',';
                answer += "x" + std::to_string(v + 1) + "=" +
                          (assignment[static_cast<std::size_t>(v)] ? "T" : "F");
            }
            bool truth = eval_assignment(f, assignment);
            any_sat = any_sat || truth;
            if (verify_3sat(f, answer).correct != truth) {
                return "formula " + std::to_string(round) + ": verifier disagrees with direct " +
                       "evaluation on " + answer;
            }
        }

        auto brute = brute_force_sat(f);
        if (brute.has_value() != any_sat) return "brute_force_sat disagrees with enumeration";
        DpllResult dpll = dpll_sat(f);
        if (dpll.status == SatStatus::unknown ||
            (dpll.status == SatStatus::sat) != any_sat) {
            return "dpll disagrees with enumeration on formula " + std::to_string(round);
        }
        // The UNSAT claim is accepted exactly when unsatisfiability is established.
        if (verify_3sat(f, "UNSAT", !any_sat ? std::optional<bool>(false)
                                             : std::optional<bool>(true))
                .correct != !any_sat) {
            return "UNSAT rule wrong on formula " + std::to_string(round);
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > 60.0) return "took " + std::to_string(secs) + "s, budget is 60s";
    return "";
}

// ---- 6. episode conformance under fault injection ----------------------------

std::string check_episode_conformance() {
    // Happy path: guide -> k runs -> slot-1 answer -> consolidation.
    {
        auto backend = std::make_shared<ScriptedBackend>();
        TaskInstance task = exact_task("t1", "What is 6 times 7?", "42");
        backend->push("guide:t1", fenced("CallLLM"));
        backend->push("guide:t1", fenced("return"));
        backend->push("guide:t1", fenced("CallLLM; ExtractAnswer"));
        backend->push("exec:t1:1", "FINAL ANSWER: 42");
        backend->push("exec:t1:3", "the answer is probably wrong");
        backend->push("consolidator:t1", "ADD NOTE: arithmetic needs one call");
        EgurDeps deps = scripted_deps(backend, 3);

        Context ctx;
        EpisodeResult result = egur_episode(deps, task, ctx);
        if (result.answer.experiences.size() != 3) return "expected 3 experiences";
        if (result.answer.answer != "42") return "slot-1 answer not chosen";
        if (!result.answer.verdict.correct) return "verdict should be correct";
        if (result.answer.experiences[1].answer != task.question) {
            return "slot-2 `return` should echo the question";
        }
        if (ctx.episode_count != 1 || ctx.notes.size() != 1) return "consolidation did not land";
        for (const Experience& exp : result.answer.experiences) {
            CostLedger from_trace = cost_of_trace(exp.trace);
            if (from_trace.usd != exp.cost.usd) return "experience cost != trace cost";
        }
    }

    // Fault injection: malformed guide replies, failing strategies, and
    // exhausted backends must degrade into evidence, never abort.
    Rng rng(0xACCE06);
    const char* hostile_guides[] = {
        "no code at all",
        "```\nNoSuchProcess\n```",
        "```\nif CallLLM then\n```",
        "```\n(recfun L: L); L\n```",
        "```\nExecCode\n```",          // valid, fails at runtime (no code block)
        "```\nrecfun L: L\n```",       // valid, recursion bomb
        "```\npure input / 0\n```",    // valid, type error
        "```\nCallLLM\n```",           // valid, but exec queue may be empty
        "",
    };
    const char* hostile_consolidators[] = {
        "DEL NOTE 999999\nADD NOTE: never applied",
        "ADD STRATEGY broken:\n```\nif then else\n```",
        "ADD STRATEGY unclosed:\n```\nCallLLM",
        "ADD NOTE no colon",
        "plain commentary, no directives",
    };
    for (int episode = 0; episode < 30; ++episode) {
        auto backend = std::make_shared<ScriptedBackend>();
        std::string id = "f" + std::to_string(episode);
        TaskInstance task = exact_task(id, "question " + id, "42");
        for (int slot = 1; slot <= 3; ++slot) {
            std::size_t pick = rng.below(sizeof(hostile_guides) / sizeof(hostile_guides[0]));
            // Each attempt (initial + retries) may consume a guide reply.
            for (std::size_t r = 0; r <= kGuideRetries; ++r) {
                backend->push("guide:" + id, hostile_guides[pick]);
            }
            if (rng.below(2) == 0) {
                backend->push("exec:" + id + ":" + std::to_string(slot), "FINAL ANSWER: 7");
            }
        }
        if (rng.below(2) == 0) {
            std::size_t pick =
                rng.below(sizeof(hostile_consolidators) / sizeof(hostile_consolidators[0]));
            backend->push("consolidator:" + id, hostile_consolidators[pick]);
        }  // else: the consolidator's own call fails on an exhausted queue

        EgurDeps deps = scripted_deps(backend, 3);
        Context ctx;
        try {
            EpisodeResult result = egur_episode(deps, task, ctx);
            if (result.answer.experiences.size() != 3) {
                return "hostile episode " + std::to_string(episode) + " lost experiences";
            }
            for (const Experience& exp : result.answer.experiences) {
                if (exp.failed && exp.error.empty()) {
                    return "failed candidate carries no error text";
                }
            }
            if (ctx.episode_count != 1) return "hostile episode did not advance memory";
        } catch (const std::exception& e) {
            return "episode " + std::to_string(episode) + " aborted: " + e.what();
        }
    }
    return "";
}

// ---- 7. continual conformance -------------------------------------------------

struct StreamFixture {
    std::vector<TaskInstance> tasks;
    std::shared_ptr<ScriptedBackend> backend;
};

StreamFixture echo_stream(int count, const std::set<int>& wrong) {
    StreamFixture fx;
    fx.backend = std::make_shared<ScriptedBackend>();
    for (int i = 1; i <= count; ++i) {
        std::string id = "t" + std::to_string(i);
        std::string question = "question " + std::to_string(i);
        fx.tasks.push_back(
            exact_task(id, question, wrong.count(i) ? "something else" : question));
        fx.backend->push("guide:" + id, ScriptedBackend::Entry{fenced("return"), 200, 20});
        fx.backend->push("consolidator:" + id,
                         ScriptedBackend::Entry{"nothing worth keeping", 300, 10});
    }
    return fx;
}

std::string run_stream(int count, const std::set<int>& wrong, std::size_t batch_size,
                       std::size_t jobs, ContinualResult& out) {
    StreamFixture fx = echo_stream(count, wrong);
    EgurDeps deps = scripted_deps(fx.backend, 1);
    ContinualOptions opts;
    opts.batch_size = batch_size;
    opts.jobs = jobs;
    out = run_continual(deps, fx.tasks, Context{}, opts);
    return report_to_json(out.report, context_to_json(out.context)).dump(2) + "\n" +
           costs_csv(out.report.samples);
}

std::string check_continual_conformance() {
    ContinualResult result;
    std::string bytes1 = run_stream(4, {3}, 2, 1, result);
    if (prequential_accuracy(result.report.samples) != 0.75) {
        return "3-of-4 fixture: prequential accuracy != 0.75";
    }
    std::vector<double> batches = per_batch_accuracy(result.report.samples, 2);
    if (batches.size() != 2 || batches[0] != 1.0 || batches[1] != 0.5) {
        return "3-of-4 fixture: per-batch accuracies wrong";
    }

    // Reruns and the jobs setting leave the artifacts byte-identical.
    ContinualResult again;
    if (run_stream(4, {3}, 2, 1, again) != bytes1) return "rerun changed the report bytes";
    if (run_stream(4, {3}, 2, 4, again) != bytes1) return "jobs=4 changed the report bytes";

    // Twenty samples at batch size ten: exactly two learning phases, one
    // consolidation per sample.
    ContinualResult twenty;
    run_stream(20, {}, 10, 1, twenty);
    if (twenty.report.samples.size() != 20) return "expected 20 samples";
    if (per_batch_accuracy(twenty.report.samples, twenty.report.batch_size).size() != 2) {
        return "expected exactly 2 batches of 10";
    }
    if (twenty.context.episode_count != 20) return "expected 20 consolidation episodes";
    return "";
}

// ---- 8. the learning effect -----------------------------------------------------

std::string check_learning_effect() {
    std::vector<TaskInstance> tasks;
    auto backend = std::make_shared<ScriptedBackend>();
    for (int i = 1; i <= 8; ++i) {
        std::string id = "t" + std::to_string(i);
        tasks.push_back(exact_task(id, "Q" + std::to_string(i) + ": what is six times seven?",
                                   "42"));
        bool first_half = i <= 4;
        std::string strategy = first_half ? "CallLLM || CallLLM; MajorityVote" : "CallLLM";
        backend->push("guide:" + id, ScriptedBackend::Entry{fenced(strategy), 1000, 100});
        int calls = first_half ? 2 : 1;
        for (int c = 0; c < calls; ++c) {
            backend->push("exec:" + id + ":1",
                          ScriptedBackend::Entry{
                              first_half ? "FINAL ANSWER: 7" : "FINAL ANSWER: 42", 500, 300});
        }
        std::string consolidation =
            i == 4 ? "ADD NOTE: one call is enough here\n"
                     "ADD STRATEGY arithmetic [exact]:\n" + fenced("CallLLM") + "\n"
                   : "nothing worth keeping";
        backend->push("consolidator:" + id, ScriptedBackend::Entry{consolidation, 800, 20});
    }

    EgurDeps deps = scripted_deps(backend, 1);
    ContinualOptions opts;
    opts.batch_size = 4;
    ContinualResult result = run_continual(deps, tasks, Context{}, opts);

    std::vector<double> batches = per_batch_accuracy(result.report.samples, 4);
    if (batches.size() != 2 || batches[0] != 0.0 || batches[1] != 1.0) {
        return "accuracy did not move from 0 to 1 across the halves";
    }
    double first_usd = 0.0, second_usd = 0.0;
    for (int i = 0; i < 4; ++i) first_usd += result.report.samples[i].answer_cost.usd;
    for (int i = 4; i < 8; ++i) second_usd += result.report.samples[i].answer_cost.usd;
    if (!(second_usd < first_usd)) {
        return "mean answering cost did not drop ($" + format_double(first_usd / 4) + " -> $" +
               format_double(second_usd / 4) + ")";
    }
    if (result.context.library.size() != 1 ||
        result.context.library[0].strategy_text != "CallLLM") {
        return "the consolidated strategy is not in the library";
    }
    if (result.context.library[0].wins != 5 || result.context.library[0].losses != 0) {
        return "library record not updated by the second half";
    }
    return "";
}

// ---- 9. retention bounds under adversarial consolidation -------------------------

std::string check_retention_bounds() {
    auto backend = std::make_shared<ScriptedBackend>();
    ProcessRegistry reg = default_registry(backend);
    PromptSet prompts = default_prompts();
    PricingTable pricing{3.0, 15.0};
    RetentionPolicy policy;  // defaults: 64 notes, 32 strategies

    std::string huge_note(10'000, 'x');
    std::string huge_program = "CallLLM";
    for (int i = 0; i < 700; ++i) huge_program += "; CallLLM";
    const std::string replies[] = {
        "ADD NOTE: " + huge_note,
        "ADD NOTE: a\nADD NOTE: b\nADD NOTE: c\nADD NOTE: d\nADD NOTE: e",
        "ADD STRATEGY oversize:\n" + fenced(huge_program),
        "ADD STRATEGY fine {n}:\n" + fenced("CallLLM || CallLLM; MajorityVote"),
        "ADD STRATEGY recursive {n}:\n" +
            fenced("recfun R: CallLLM; if ContainsCode then ExecCode; R else return"),
        "DEL NOTE 1\nDEL STRATEGY 999999",
        "ADD STRATEGY broken {n}:\n" + fenced("pure lambda x."),
        std::string(9'000, 'y'),
        "ADD NOTE: sig flood " + std::string(600, 's') + "\nADD STRATEGY " +
            std::string(600, 's') + " {n}:\n" + fenced("CallLLM"),
    };

    Rng rng(0xACCE09);
    Context ctx;
    TaskInstance task = exact_task("adv", "adversarial", "42");
    std::vector<Experience> no_experiences;
    CostLedger cost;
    for (int round = 0; round < 100; ++round) {
        std::string reply = replies[rng.below(sizeof(replies) / sizeof(replies[0]))];
        // Unique signatures so ADD STRATEGY keeps pushing on the cap.
        std::size_t n;
        while ((n = reply.find("{n}")) != std::string::npos) {
            reply.replace(n, 3, std::to_string(round));
        }
        backend->push("adv", reply);
        consolidate(*backend, pricing, reg, prompts, ctx, task, no_experiences,
                    rng.below(2) == 0, "adv", cost, policy);

        if (ctx.notes.size() > static_cast<std::size_t>(policy.max_notes)) {
            return "note count " + std::to_string(ctx.notes.size()) + " exceeds the cap";
        }
        if (ctx.library.size() > static_cast<std::size_t>(policy.max_strategies)) {
            return "library size " + std::to_string(ctx.library.size()) + " exceeds the cap";
        }
        std::string text = serialize_context(ctx);
        if (text.size() > policy.max_context_bytes()) {
            return "serialized context " + std::to_string(text.size()) + " bytes exceeds " +
                   std::to_string(policy.max_context_bytes());
        }
        for (const Note& note : ctx.notes) {
            if (note.text.size() > policy.max_note_chars) return "a note escaped clipping";
        }
        for (const LibraryEntry& entry : ctx.library) {
            if (entry.strategy_text.size() > policy.max_strategy_chars) {
                return "an oversize strategy survived retention";
            }
            ParseResult parsed = parse_strategy(entry.strategy_text);
            if (!parsed.ok()) return "a stored strategy no longer parses";
            if (!validate(*parsed.program, reg.names()).empty()) {
                return "a stored strategy no longer validates";
            }
            if (pretty_print(*parsed.program) != entry.strategy_text) {
                return "a stored strategy is not canonical";
            }
        }
    }
    if (ctx.episode_count != 100) return "episode count did not track consolidations";
    if (ctx.library.empty()) return "no strategy ever survived (fixture too hostile)";
    return "";
}

struct Criterion {
    int id;
    const char* title;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "interpreter matches the reference evaluator on 1000 programs", check_semantics_oracle},
        {2, "cost ledgers are exact, additive, and charge only taken branches",
         check_cost_accounting},
        {3, "print/parse round-trips 1000 ASTs and pins the CodeAct shape", check_roundtrip},
        {4, "builtin strategies classify row-for-row", check_classification_table},
        {5, "3-SAT verifier agrees with exhaustive ground truth on 200 formulas",
         check_sat_verifier},
        {6, "episodes run k candidates and survive fault injection", check_episode_conformance},
        {7, "continual runs are prequential, batched, and byte-reproducible",
         check_continual_conformance},
        {8, "a consolidated strategy lifts accuracy and cuts cost", check_learning_effect},
        {9, "memory stays bounded and valid under adversarial consolidation",
         check_retention_bounds},
    };

    bool all_passed = true;
    for (const Criterion& c : criteria) {
        auto t0 = Clock::now();
        std::string err;
        try {
            err = c.run();
        } catch (const std::exception& e) {
            err = std::string("unexpected exception: ") + e.what();
        }
        long ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
        if (err.empty()) {
            std::printf("[PASS] criterion %d: %s (%ld ms)\n", c.id, c.title, ms);
        } else {
            std::printf("[FAIL] criterion %d: %s: %s\n", c.id, c.title, err.c_str());
            all_passed = false;
        }
    }
    return all_passed ? 0 : 1;
}
