// End-to-end tests of the egur binary: every subcommand through a real
// subprocess, exit codes per the documented contract (0 ok, 1 runtime,
// 2 config), and byte-stable outputs across reruns.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int status = -1;
    std::string output;  // stdout and stderr merged
};

CmdResult run_cli(const std::string& args) {
    std::string cmd = std::string(EGUR_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {};
    CmdResult result;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
    int rc = pclose(pipe);
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return result;
}

std::string shq(const std::string& s) { return "'" + s + "'"; }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    ASSERT_TRUE(out.is_open()) << path;
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.is_open()) << path;
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory per test.
fs::path scratch(const std::string& name) {
    fs::path dir = fs::path(testing::TempDir()) / ("cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string jsonl_entry(const std::string& partition, const std::string& text,
                        std::int64_t in_tokens = -1, std::int64_t out_tokens = -1) {
    nlohmann::json j{{"text", text}};
    if (!partition.empty()) j["partition"] = partition;
    if (in_tokens >= 0) j["input_tokens"] = in_tokens;
    if (out_tokens >= 0) j["output_tokens"] = out_tokens;
    return j.dump() + "\n";
}

std::string exact_task_line(const std::string& id, const std::string& question,
                            const std::string& gold) {
    return nlohmann::json{{"id", id}, {"taskType", "exact"}, {"question", question},
                          {"gold", gold}}
               .dump() +
           "\n";
}

TEST(RunStrategy, BuiltinAgainstScriptedBackend) {
    fs::path dir = scratch("cot");
    write_file(dir / "script.jsonl", jsonl_entry("", "FINAL ANSWER: 42", 100, 10));
    CmdResult r = run_cli("run-strategy --builtin cot --input 'what is 6*7?' --backend scripted:" +
                          shq((dir / "script.jsonl").string()) + " --price-in 3 --price-out 15");
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("answer: FINAL ANSWER: 42"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("cost: $0.00045 (tokens in=100 out=10)"), std::string::npos)
        << r.output;
    EXPECT_NE(r.output.find("CallLLM: $0.00045"), std::string::npos) << r.output;
}

TEST(RunStrategy, ClassifyPrintsTraitsWithoutRunning) {
    CmdResult r = run_cli("run-strategy --builtin codeact --classify --input x");
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("recfun CodeAct:"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("par=0 if=1 fix=1 llm=1 tools=1"), std::string::npos) << r.output;

    CmdResult sc = run_cli("run-strategy --builtin self_consistency --classify --input x");
    EXPECT_NE(sc.output.find("par=1 if=0 fix=0 llm=1 tools=0"), std::string::npos) << sc.output;
}

TEST(RunStrategy, TraceOutThenReplay) {
    fs::path dir = scratch("trace");
    write_file(dir / "script.jsonl", jsonl_entry("", "the reply", 8, 2));
    fs::path trace = dir / "run.jsonl";
    CmdResult r = run_cli("run-strategy --builtin cot --input hello --backend scripted:" +
                          shq((dir / "script.jsonl").string()) + " --trace-out " +
                          shq(trace.string()));
    EXPECT_EQ(r.status, 0) << r.output;
    ASSERT_TRUE(fs::exists(trace));
    EXPECT_NE(r.output.find("trace: "), std::string::npos);

    CmdResult replay = run_cli("replay --trace " + shq(trace.string()));
    EXPECT_EQ(replay.status, 0) << replay.output;
    EXPECT_NE(replay.output.find("CallLLM("), std::string::npos) << replay.output;
    EXPECT_NE(replay.output.find("-> "), std::string::npos);
    EXPECT_NE(replay.output.find("total: $"), std::string::npos);
}

TEST(RunStrategy, ExactlyOneProgramSource) {
    CmdResult r = run_cli("run-strategy --builtin cot --text return --input x");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("exactly one of"), std::string::npos) << r.output;

    CmdResult none = run_cli("run-strategy --input x");
    EXPECT_EQ(none.status, 2);
}

TEST(RunStrategy, UnknownBuiltinIsConfigError) {
    CmdResult r = run_cli("run-strategy --builtin nope --input x");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("nope"), std::string::npos) << r.output;
}

TEST(RunStrategy, BadBackendSpecIsConfigError) {
    CmdResult r = run_cli("run-strategy --builtin cot --input x --backend bogus");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("unknown backend"), std::string::npos) << r.output;

    CmdResult missing = run_cli("run-strategy --builtin cot --input x");
    EXPECT_EQ(missing.status, 2);
    EXPECT_NE(missing.output.find("no backend selected"), std::string::npos) << missing.output;
}

TEST(RunStrategy, ExhaustedScriptIsRuntimeError) {
    fs::path dir = scratch("exhausted");
    write_file(dir / "empty.jsonl", "");
    CmdResult r = run_cli("run-strategy --builtin cot --input x --backend scripted:" +
                          shq((dir / "empty.jsonl").string()));
    EXPECT_EQ(r.status, 1) << r.output;
    EXPECT_NE(r.output.find("exhausted"), std::string::npos) << r.output;
}

TEST(RunStrategy, ConfigFileMergesAndFlagsWin) {
    fs::path dir = scratch("config");
    write_file(dir / "script.jsonl", jsonl_entry("", "ok", 10, 0));
    write_file(dir / "egur.conf",
               "# pricing for the scripted run\n"
               "pricing.input_usd_per_mtok = 1000000\n"
               "backend = scripted:" + (dir / "script.jsonl").string() + "\n");
    // File supplies backend and pricing: 10 tokens at $1e6/mtok = $10.
    CmdResult from_file = run_cli("run-strategy --builtin cot --input x --config " +
                                  shq((dir / "egur.conf").string()));
    EXPECT_EQ(from_file.status, 0) << from_file.output;
    EXPECT_NE(from_file.output.find("cost: $10 "), std::string::npos) << from_file.output;

    // An explicit flag beats the file.
    write_file(dir / "script.jsonl", jsonl_entry("", "ok", 10, 0));
    CmdResult overridden = run_cli("run-strategy --builtin cot --input x --config " +
                                   shq((dir / "egur.conf").string()) + " --price-in 2000000");
    EXPECT_EQ(overridden.status, 0) << overridden.output;
    EXPECT_NE(overridden.output.find("cost: $20 "), std::string::npos) << overridden.output;
}

TEST(RunStrategy, RecordFixturesReplayIdentically) {
    fs::path dir = scratch("record");
    write_file(dir / "script.jsonl", jsonl_entry("", "recorded reply", 64, 16));
    fs::path recorded = dir / "recorded.jsonl";
    CmdResult first = run_cli("run-strategy --builtin cot --input x --backend scripted:" +
                              shq((dir / "script.jsonl").string()) + " --record-fixtures " +
                              shq(recorded.string()));
    EXPECT_EQ(first.status, 0) << first.output;
    ASSERT_TRUE(fs::exists(recorded));

    CmdResult second = run_cli("run-strategy --builtin cot --input x --backend scripted:" +
                               shq(recorded.string()));
    EXPECT_EQ(second.status, 0) << second.output;
    EXPECT_NE(second.output.find("answer: recorded reply"), std::string::npos) << second.output;
}

TEST(GenTasks, DeterministicFilesAndLabels) {
    fs::path dir = scratch("gentasks");
    std::string common = " --count 5 --vars-min 5 --vars-max 8 --seed 3";
    CmdResult a = run_cli("gen-tasks --out " + shq((dir / "a.jsonl").string()) + common);
    CmdResult b = run_cli("gen-tasks --out " + shq((dir / "b.jsonl").string()) + common);
    EXPECT_EQ(a.status, 0) << a.output;
    EXPECT_NE(a.output.find("wrote 5 tasks"), std::string::npos) << a.output;
    EXPECT_EQ(read_file(dir / "a.jsonl"), read_file(dir / "b.jsonl"));

    // Every line is a loadable sat3 task with a cnf payload.
    std::string text = read_file(dir / "a.jsonl");
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = text.find('\n', pos)) != std::string::npos; ++pos) ++lines;
    EXPECT_EQ(lines, 5u);
    nlohmann::json first = nlohmann::json::parse(text.substr(0, text.find('\n')));
    EXPECT_EQ(first["taskType"], "sat3");
    EXPECT_TRUE(first.contains("cnf"));
    EXPECT_EQ(first["id"], "sat3-3-0");

    CmdResult bad = run_cli("gen-tasks --out " + shq((dir / "c.jsonl").string()) +
                            " --type riddle");
    EXPECT_EQ(bad.status, 2);
}

TEST(Continual, MissingTasksFlagIsUsageError) {
    CmdResult r = run_cli("continual");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("--tasks"), std::string::npos) << r.output;
}

TEST(Continual, DryRunValidatesWithoutOutputs) {
    fs::path dir = scratch("dryrun");
    write_file(dir / "tasks.jsonl", exact_task_line("t1", "alpha", "alpha"));
    write_file(dir / "script.jsonl", "");
    CmdResult r = run_cli("continual --tasks " + shq((dir / "tasks.jsonl").string()) +
                          " --backend scripted:" + shq((dir / "script.jsonl").string()) +
                          " --out " + shq((dir / "out").string()) + " --dry-run");
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("dry run ok: 1 tasks"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir / "out"));

    // Dry run still validates what it is given.
    CmdResult bad = run_cli("continual --tasks " + shq((dir / "tasks.jsonl").string()) +
                            " --backend http --dry-run");
    EXPECT_EQ(bad.status, 2);
    EXPECT_NE(bad.output.find("--endpoint"), std::string::npos) << bad.output;
}

// Shared fixture: two exact tasks answered by `return` (gold == question),
// partition-routed guide and consolidator replies.
void write_continual_fixture(const fs::path& dir) {
    write_file(dir / "tasks.jsonl",
               exact_task_line("t1", "alpha", "alpha") + exact_task_line("t2", "beta", "beta"));
    std::string script;
    script += jsonl_entry("guide:t1", "```\nreturn\n```", 200, 20);
    script += jsonl_entry("guide:t2", "```\nreturn\n```", 200, 20);
    script += jsonl_entry("consolidator:t1", "ADD NOTE: echo tasks answer themselves", 300, 10);
    script += jsonl_entry("consolidator:t2", "nothing new", 300, 10);
    write_file(dir / "script.jsonl", script);
}

std::string continual_cmd(const fs::path& dir, const std::string& out, int jobs) {
    return "continual --tasks " + shq((dir / "tasks.jsonl").string()) + " --backend scripted:" +
           shq((dir / "script.jsonl").string()) + " --out " + shq((dir / out).string()) +
           " --k 1 --batch-size 1 --jobs " + std::to_string(jobs) +
           " --price-in 3 --price-out 15";
}

TEST(Continual, EndToEndProducesEveryArtifact) {
    fs::path dir = scratch("endtoend");
    write_continual_fixture(dir);
    CmdResult r = run_cli(continual_cmd(dir, "out", 1));
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("samples: 2  prequential accuracy: 1"), std::string::npos)
        << r.output;

    fs::path out = dir / "out";
    for (const char* f : {"report.json", "costs.csv", "context.txt", "context.json",
                          "episodes.jsonl"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    EXPECT_TRUE(fs::exists(out / "traces" / "e1_s1.jsonl"));
    EXPECT_TRUE(fs::exists(out / "traces" / "e2_s1.jsonl"));

    nlohmann::json report = nlohmann::json::parse(read_file(out / "report.json"));
    EXPECT_EQ(report["samples"], 2);
    EXPECT_DOUBLE_EQ(report["prequentialAccuracy"].get<double>(), 1.0);
    EXPECT_EQ(report["config"]["k"], "1");
    EXPECT_EQ(report["config"]["backend"], "scripted");
    EXPECT_FALSE(report["config"].contains("jobs"));  // jobs must not affect results
    EXPECT_TRUE(report.contains("finalContext"));

    // The consolidated note made it into the context artifacts.
    EXPECT_NE(read_file(out / "context.txt").find("echo tasks answer themselves"),
              std::string::npos);
    nlohmann::json ctx = nlohmann::json::parse(read_file(out / "context.json"));
    EXPECT_EQ(ctx["episode_count"], 2);

    // episodes.jsonl: one line per sample with candidate detail.
    std::string episodes = read_file(out / "episodes.jsonl");
    std::size_t newline = episodes.find('\n');
    nlohmann::json first = nlohmann::json::parse(episodes.substr(0, newline));
    EXPECT_EQ(first["taskId"], "t1");
    EXPECT_EQ(first["correct"], true);
    ASSERT_EQ(first["candidatesDetail"].size(), 1u);
    EXPECT_EQ(first["candidatesDetail"][0]["strategy"], "return");
    EXPECT_EQ(first["candidatesDetail"][0]["trace"], "traces/e1_s1.jsonl");
    EXPECT_EQ(first["consolidation"]["opsApplied"], 1);

    // costs.csv ends with the totals row.
    std::string csv = read_file(out / "costs.csv");
    EXPECT_NE(csv.find("\ntotal,,2,"), std::string::npos) << csv;
}

TEST(Continual, RerunsAndJobsAreByteIdentical) {
    fs::path dir = scratch("identical");
    write_continual_fixture(dir);
    ASSERT_EQ(run_cli(continual_cmd(dir, "out1", 1)).status, 0);
    ASSERT_EQ(run_cli(continual_cmd(dir, "out2", 1)).status, 0);
    ASSERT_EQ(run_cli(continual_cmd(dir, "out4", 4)).status, 0);
    std::string report1 = read_file(dir / "out1" / "report.json");
    EXPECT_EQ(report1, read_file(dir / "out2" / "report.json"));
    EXPECT_EQ(report1, read_file(dir / "out4" / "report.json"));
    std::string csv1 = read_file(dir / "out1" / "costs.csv");
    EXPECT_EQ(csv1, read_file(dir / "out2" / "costs.csv"));
    EXPECT_EQ(csv1, read_file(dir / "out4" / "costs.csv"));
    EXPECT_EQ(read_file(dir / "out1" / "context.json"),
              read_file(dir / "out4" / "context.json"));
}

TEST(Continual, HoldoutCheckpointsAppearInReport) {
    fs::path dir = scratch("holdout");
    write_continual_fixture(dir);
    write_file(dir / "holdout.jsonl", exact_task_line("h1", "held", "held"));
    // Targets over 2 samples at {0, 1/3, 2/3, 1}: 0, 1, 1, 2 -> {0, 1, 2}.
    std::string script = read_file(dir / "script.jsonl");
    for (int i = 0; i < 3; ++i) script += jsonl_entry("guide:h1", "```\nreturn\n```", 200, 20);
    write_file(dir / "script.jsonl", script);

    CmdResult r = run_cli(continual_cmd(dir, "out", 1) + " --holdout " +
                          shq((dir / "holdout.jsonl").string()));
    EXPECT_EQ(r.status, 0) << r.output;
    nlohmann::json report = nlohmann::json::parse(read_file(dir / "out" / "report.json"));
    ASSERT_EQ(report["holdout"].size(), 3u);
    EXPECT_EQ(report["holdout"][0]["atSample"], 0);
    EXPECT_EQ(report["holdout"][1]["atSample"], 1);
    EXPECT_EQ(report["holdout"][2]["atSample"], 2);
    EXPECT_DOUBLE_EQ(report["holdout"][2]["accuracy"].get<double>(), 1.0);
    EXPECT_EQ(report["config"]["holdout_size"], "1");
}

TEST(Report, SummarizesAReportFile) {
    fs::path dir = scratch("report");
    write_continual_fixture(dir);
    ASSERT_EQ(run_cli(continual_cmd(dir, "out", 1)).status, 0);
    CmdResult r = run_cli("report --report " + shq((dir / "out" / "report.json").string()));
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("samples: 2"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("prequential accuracy: 1"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("per-batch: 1 1"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("cost: $"), std::string::npos) << r.output;

    CmdResult missing = run_cli("report --report /no/such/report.json");
    EXPECT_EQ(missing.status, 2);
}

TEST(Replay, RejectsTraceWithoutPayloads) {
    // Export a payload-free trace through the library's own writer so the
    // subprocess sees a structurally valid file that lacks payloads.
    fs::path dir = scratch("replaybad");
    write_file(dir / "bare.jsonl",
               R"({"v":1,"process":"CallLLM","input_digest":"x","output_digest":"y","cost":{"input_tokens":0,"output_tokens":0,"usd":0.0,"per_process":{}}})"
               "\n"
               R"({"v":1,"total":{"input_tokens":0,"output_tokens":0,"usd":0.0,"per_process":{}}})"
               "\n");
    CmdResult r = run_cli("replay --trace " + shq((dir / "bare.jsonl").string()));
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_NE(r.output.find("payload"), std::string::npos) << r.output;
}

TEST(Replay, MissingFileIsIoError) {
    CmdResult r = run_cli("replay --trace /no/such/trace.jsonl");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("cannot open"), std::string::npos) << r.output;
}

}  // namespace
