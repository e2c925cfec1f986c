// Text utilities, the process registry, the default process suite, and both
// code runners.

#include <gtest/gtest.h>

#include "egur/backend.hpp"
#include "egur/code_runner.hpp"
#include "egur/interp.hpp"
#include "egur/parser.hpp"
#include "egur/processes.hpp"
#include "egur/text_ops.hpp"

namespace egur {
namespace {

// --- text_ops --------------------------------------------------------------

TEST(TextOps, ExtractCodeBlocks) {
    CodeBlocks b = extract_code_blocks("before\n```py\nx = 1\ny = 2\n```\nafter");
    ASSERT_EQ(b.blocks.size(), 1u);
    EXPECT_EQ(b.blocks[0], "x = 1\ny = 2\n");
    EXPECT_FALSE(b.unterminated);
}

TEST(TextOps, MultipleAndIndentedBlocks) {
    CodeBlocks b = extract_code_blocks("```\na\n```\ntext\n  ```lang\nb\n  ```\n");
    ASSERT_EQ(b.blocks.size(), 2u);
    EXPECT_EQ(b.blocks[0], "a\n");
    EXPECT_EQ(b.blocks[1], "b\n");
}

TEST(TextOps, UnterminatedFence) {
    CodeBlocks b = extract_code_blocks("```\ndangling");
    EXPECT_TRUE(b.blocks.empty());
    EXPECT_TRUE(b.unterminated);
}

TEST(TextOps, InlineBackticksDoNotCount) {
    EXPECT_TRUE(extract_code_blocks("use `x` here").blocks.empty());
}

TEST(TextOps, ExtractFinalAnswer) {
    EXPECT_EQ(extract_final_answer("FINAL ANSWER: 42").value(), "42");
    EXPECT_EQ(extract_final_answer("a\n  FINAL ANSWER:  spaced  \nb").value(), "spaced");
    // The last marker wins.
    EXPECT_EQ(extract_final_answer("FINAL ANSWER: 1\nFINAL ANSWER: 2").value(), "2");
    EXPECT_FALSE(extract_final_answer("no marker").has_value());
    EXPECT_EQ(extract_final_answer("FINAL ANSWER:").value(), "");
}

TEST(TextOps, NormalizeAnswer) {
    EXPECT_EQ(normalize_answer("  Hello   WORLD \n"), "hello world");
    EXPECT_EQ(normalize_answer("a\tb"), "a b");
    EXPECT_EQ(normalize_answer(""), "");
}

TEST(TextOps, MajorityVote) {
    EXPECT_EQ(majority_vote({"a", "b", "a"}), "a");
    // Normalized comparison, original spelling of the first occurrence wins.
    EXPECT_EQ(majority_vote({"YES ", "no", "yes"}), "YES ");
    // Tie: earliest first occurrence.
    EXPECT_EQ(majority_vote({"b", "a"}), "b");
    EXPECT_THROW(majority_vote({}), RunError);
}

TEST(TextOps, FlattenCandidates) {
    ValueMap m;
    m["left"] = Value("L");
    m["right"] = Value(ValueList{Value(1.0), Value(2.0)});
    auto c = flatten_candidates(Value(m));
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], "L");
    EXPECT_EQ(c[1], "1");
    EXPECT_EQ(c[2], "2");
}

// --- registry ----------------------------------------------------------------

TEST(Registry, DuplicateAddThrows) {
    ProcessRegistry reg;
    ProcessEntry e;
    e.name = "P";
    e.handler = [](const Value& v, ProcessInvocation&) { return v; };
    reg.add(e);
    EXPECT_THROW(reg.add(e), RunError);
    reg.add_or_replace(e);  // replacement is fine
    EXPECT_TRUE(reg.contains("P"));
}

TEST(Registry, FlatCostChargedBeforeHandler) {
    ProcessRegistry reg;
    ProcessEntry e;
    e.name = "P";
    e.flat_cost_usd = 0.5;
    e.handler = [](const Value&, ProcessInvocation& inv) { return Value(inv.delta.usd); };
    reg.add(e);
    RunState st;
    ProcessInvocation inv{st, 0, {}};
    Value out = reg.invoke("P", Value::null(), inv);
    EXPECT_DOUBLE_EQ(out.as_number(), 0.5);
}

// --- default process suite ---------------------------------------------------

struct Fixture {
    std::shared_ptr<ScriptedBackend> backend = std::make_shared<ScriptedBackend>();
    RegistryOptions opts;

    ProcessRegistry registry() {
        opts.pricing.usd_per_mtok_input = 3.0;
        opts.pricing.usd_per_mtok_output = 15.0;
        return default_registry(backend, opts);
    }
};

Value run_with(Fixture& fx, std::string_view src, Value input, RunState& st) {
    ParseResult r = parse_strategy(src);
    EXPECT_TRUE(r.ok()) << src;
    return run(r.program, input, st, fx.registry());
}

TEST(Processes, CallLLMAppendsConversationAndCharges) {
    Fixture fx;
    fx.backend->push("", ScriptedBackend::Entry{"reply text", 100, 50});
    RunState st;
    Value out = run_with(fx, "CallLLM", Value("the question"), st);
    EXPECT_EQ(out.as_string(), "reply text");
    ASSERT_EQ(st.conversation.size(), 2u);
    EXPECT_EQ(st.conversation[0].role, "user");
    EXPECT_EQ(st.conversation[0].content, "the question");
    EXPECT_EQ(st.conversation[1].role, "assistant");
    EXPECT_EQ(st.conversation[1].content, "reply text");
    EXPECT_EQ(st.cost.input_tokens, 100);
    EXPECT_EQ(st.cost.output_tokens, 50);
    // 100 tokens at $3/M plus 50 at $15/M.
    EXPECT_NEAR(st.cost.usd, 0.00105, 1e-12);
    EXPECT_NEAR(st.cost.per_process.at("CallLLM"), 0.00105, 1e-12);
}

TEST(Processes, ConversationIsSharedAcrossCalls) {
    Fixture fx;
    fx.backend->push("", std::string("first"));
    fx.backend->push("", std::string("second"));
    RunState st;
    run_with(fx, "CallLLM; CallLLM", Value("q"), st);
    // user q, assistant first, user "first" (the piped output), assistant second.
    ASSERT_EQ(st.conversation.size(), 4u);
    EXPECT_EQ(st.conversation[2].role, "user");
    EXPECT_EQ(st.conversation[2].content, "first");
    EXPECT_EQ(st.conversation[3].content, "second");
}

TEST(Processes, CallOptLLMIsSeparateCostBucket) {
    Fixture fx;
    fx.backend->push("", std::string("a"));
    fx.backend->push("", std::string("b"));
    RunState st;
    run_with(fx, "CallLLM; CallOptLLM", Value("q"), st);
    EXPECT_TRUE(st.cost.per_process.count("CallLLM"));
    EXPECT_TRUE(st.cost.per_process.count("CallOptLLM"));
}

TEST(Processes, EvalLLMParsesVerdicts) {
    Fixture fx;
    fx.backend->push("", std::string("Thinking...\nVERDICT: PASS"));
    RunState st;
    EXPECT_TRUE(run_with(fx, "EvalLLM", Value("claim"), st).as_bool());

    Fixture fx2;
    fx2.backend->push("", std::string("VERDICT: FAIL, sadly"));
    RunState st2;
    EXPECT_FALSE(run_with(fx2, "EvalLLM", Value("claim"), st2).as_bool());
}

TEST(Processes, EvalLLMLastVerdictWins) {
    Fixture fx;
    fx.backend->push("", std::string("VERDICT: PASS\nwait\nVERDICT: FAIL"));
    RunState st;
    EXPECT_FALSE(run_with(fx, "EvalLLM", Value("x"), st).as_bool());
}

TEST(Processes, EvalLLMWithoutVerdictFails) {
    Fixture fx;
    fx.backend->push("", std::string("I cannot decide."));
    RunState st;
    try {
        run_with(fx, "EvalLLM", Value("x"), st);
        FAIL();
    } catch (const RunError& e) {
        EXPECT_EQ(e.kind(), ErrKind::process_failure);
    }
}

TEST(Processes, ContainsCode) {
    Fixture fx;
    RunState st;
    EXPECT_TRUE(run_with(fx, "ContainsCode", Value("x\n```\ny\n```"), st).as_bool());
    RunState st2;
    EXPECT_FALSE(run_with(fx, "ContainsCode", Value("plain"), st2).as_bool());
}

TEST(Processes, ExecCodeRunsSandboxAndPersists) {
    Fixture fx;
    RunState st;
    Value out = run_with(fx, "ExecCode", Value("```\nx = 6 * 7\nx\n```"), st);
    EXPECT_EQ(out.as_string(), "42\n");
    // The binding persists in the episode's runner.
    RunOptions ro;
    Value again = run(parse_strategy("ExecCode").program, Value("```\nx + 1\n```"), st,
                      fx.registry(), ro);
    EXPECT_EQ(again.as_string(), "43\n");
}

TEST(Processes, ExecCodeWithoutBlockFails) {
    Fixture fx;
    RunState st;
    try {
        run_with(fx, "ExecCode", Value("no code here"), st);
        FAIL();
    } catch (const RunError& e) {
        EXPECT_EQ(e.kind(), ErrKind::process_failure);
    }
}

TEST(Processes, ExecCodeJoinsMultipleBlocks) {
    Fixture fx;
    RunState st;
    Value out = run_with(fx, "ExecCode", Value("```\na = 1\n```\nand\n```\na + 1\n```"), st);
    EXPECT_EQ(out.as_string(), "2\n");
}

TEST(Processes, ExecCodeFlatCost) {
    Fixture fx;
    fx.opts.flat_cost_exec_usd = 0.002;
    RunState st;
    run_with(fx, "ExecCode", Value("```\n1\n```"), st);
    EXPECT_DOUBLE_EQ(st.cost.usd, 0.002);
    EXPECT_DOUBLE_EQ(st.cost.per_process.at("ExecCode"), 0.002);
}

TEST(Processes, MajorityVoteOverParJoin) {
    Fixture fx;
    fx.backend->push("", std::string("B"));
    fx.backend->push("", std::string("A"));
    fx.backend->push("", std::string("A"));
    RunState st;
    Value out = run_with(fx, "(CallLLM || (CallLLM || CallLLM)); MajorityVote",
                         Value("q"), st);
    EXPECT_EQ(out.as_string(), "A");
}

TEST(Processes, ExtractAnswerProcess) {
    Fixture fx;
    RunState st;
    EXPECT_EQ(run_with(fx, "ExtractAnswer", Value("blah\nFINAL ANSWER: 7"), st).as_string(),
              "7");
    RunState st2;
    EXPECT_EQ(run_with(fx, "ExtractAnswer", Value("  just text  "), st2).as_string(),
              "just text");
}

// --- sandbox runner ------------------------------------------------------------

TEST(SandboxRunnerTest, BindsAndPrints) {
    SandboxRunner r;
    CodeRunner::Outcome o = r.run("x = [1, 2] ++ [3]\nx[2]\n# comment\n\nx\n");
    EXPECT_TRUE(o.ok);
    EXPECT_EQ(o.output, "3\n[1, 2, 3]\n");
}

TEST(SandboxRunnerTest, ErrorsAreObservationsAndDoNotCommit) {
    SandboxRunner r;
    ASSERT_TRUE(r.run("x = 5").ok);
    CodeRunner::Outcome o = r.run("x = 99\ny = undefined_name");
    EXPECT_FALSE(o.ok);
    EXPECT_NE(o.output.find("error:"), std::string::npos);
    // The failed block did not commit: x is still 5.
    CodeRunner::Outcome check = r.run("x");
    EXPECT_EQ(check.output, "5\n");
}

TEST(SandboxRunnerTest, ForkIsolates) {
    SandboxRunner r;
    r.run("x = 1");
    auto forked = r.fork();
    forked->run("x = 2");
    EXPECT_EQ(r.run("x").output, "1\n");
    EXPECT_EQ(forked->run("x").output, "2\n");
}

TEST(SandboxRunnerTest, DivergenceIsATimeout) {
    SandboxRunner r;
    EXPECT_THROW(r.run("f = lambda g. g(g)\nf(f)"), RunError);
}

TEST(SandboxRunnerTest, ClosuresMayLiveInTheEnvironment) {
    SandboxRunner r;
    ASSERT_TRUE(r.run("inc = lambda x. x + 1").ok);
    EXPECT_EQ(r.run("inc(41)").output, "42\n");
}

// --- command runner -------------------------------------------------------------

TEST(CommandRunnerTest, RunsShell) {
    CommandRunner r(CommandRunnerConfig{});
    CodeRunner::Outcome o = r.run("echo hello\n");
    EXPECT_TRUE(o.ok);
    EXPECT_EQ(o.output, "hello\n");
}

TEST(CommandRunnerTest, EnvironmentAccumulates) {
    CommandRunner r(CommandRunnerConfig{});
    ASSERT_TRUE(r.run("X=41\n").ok);
    CodeRunner::Outcome o = r.run("echo $((X + 1))\n");
    EXPECT_TRUE(o.ok);
    EXPECT_EQ(o.output, "42\n");
}

TEST(CommandRunnerTest, FailureReportsExitStatusAndDoesNotCommit) {
    CommandRunner r(CommandRunnerConfig{});
    ASSERT_TRUE(r.run("Y=1\n").ok);
    CodeRunner::Outcome o = r.run("echo pre; exit 3\n");
    EXPECT_FALSE(o.ok);
    EXPECT_NE(o.output.find("[exit status 3]"), std::string::npos);
    // Y survives, the failed line is gone.
    EXPECT_EQ(r.run("echo $Y\n").output, "1\n");
}

TEST(CommandRunnerTest, TimeoutKills) {
    CommandRunnerConfig cfg;
    cfg.timeout_ms = 300;
    CommandRunner r(cfg);
    auto t0 = std::chrono::steady_clock::now();
    try {
        r.run("sleep 10\n");
        FAIL() << "sleep outlived the deadline";
    } catch (const RunError& e) {
        EXPECT_EQ(e.kind(), ErrKind::timeout);
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    EXPECT_LT(ms, 5000);
}

TEST(CommandRunnerTest, OutputTruncated) {
    CommandRunnerConfig cfg;
    cfg.max_output_bytes = 100;
    CommandRunner r(cfg);
    CodeRunner::Outcome o = r.run("yes trunc | head -n 500\n");
    EXPECT_LE(o.output.size(), 200u);  // cap plus the truncation marker
    EXPECT_NE(o.output.find("truncated"), std::string::npos);
}

TEST(CommandRunnerTest, ForkCopiesAccumulatedSource) {
    CommandRunner r(CommandRunnerConfig{});
    r.run("Z=7\n");
    auto forked = r.fork();
    EXPECT_EQ(forked->run("echo $Z\n").output, "7\n");
}

}  // namespace
}  // namespace egur
