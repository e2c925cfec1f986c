// egur: strategy-language runner and experience-guided reasoning harness.
//
// Subcommands:
//   run-strategy   execute one strategy program and print answer + ledger
//   continual      prequential run over a task stream with learning
//   gen-tasks      generate a 3-SAT task file
//   replay         render a saved trace as a transcript
//   report         summarize a report.json
//
// Exit codes: 0 success, 1 task/runtime errors, 2 configuration errors.
// Settings resolve as flags > config file > defaults; the only secret
// (API key) is read from the environment variable the config names.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "egur/egur.hpp"
#include "egur/http_client.hpp"

namespace fs = std::filesystem;
using namespace egur;

namespace {

struct Settings {
    std::string config_path;
    std::string backend_spec;
    std::string endpoint;
    std::string model;
    std::string api_key_env;
    int http_timeout_s = 120;
    int http_retries = 2;
    double price_in = 0.0;
    double price_out = 0.0;
    std::string exec_kind = "sandbox";  // sandbox | command
    std::string exec_command = "/bin/sh {file}";
    std::string exec_extension = ".sh";
    int exec_timeout_ms = 10'000;
    double exec_flat_usd = 0.0;
    std::string record_fixtures;
    std::string prompts_dir;
    int k = 3;
    int batch_size = 10;
    int fix_depth = 25;
    std::uint64_t seed = 0;
    int jobs = 0;  // 0: use hardware_concurrency
    bool retain_payloads = false;
};

// A flag wins over the file; the file wins over the built-in default.
void merge_config(Settings& s, const KeyValueConfig& cfg, const CLI::App* cmd) {
    auto flag_given = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    auto str = [&](const char* key, const char* flag, std::string& into) {
        if (!flag_given(flag) && cfg.has(key)) into = cfg.get_string(key);
    };
    auto num = [&](const char* key, const char* flag, auto& into) {
        using T = std::decay_t<decltype(into)>;
        if (!flag_given(flag) && cfg.has(key)) {
            into = static_cast<T>(cfg.get_int(key, static_cast<std::int64_t>(into)));
        }
    };
    auto dbl = [&](const char* key, const char* flag, double& into) {
        if (!flag_given(flag) && cfg.has(key)) into = cfg.get_double(key, into);
    };
    str("backend", "--backend", s.backend_spec);
    str("http.endpoint", "--endpoint", s.endpoint);
    str("http.model", "--model", s.model);
    str("http.api_key_env", "--api-key-env", s.api_key_env);
    num("http.timeout_seconds", "--http-timeout", s.http_timeout_s);
    num("http.max_retries", "--http-retries", s.http_retries);
    dbl("pricing.input_usd_per_mtok", "--price-in", s.price_in);
    dbl("pricing.output_usd_per_mtok", "--price-out", s.price_out);
    str("exec.kind", "--exec-kind", s.exec_kind);
    str("exec.command", "--exec-command", s.exec_command);
    str("exec.extension", "--exec-extension", s.exec_extension);
    num("exec.timeout_ms", "--exec-timeout-ms", s.exec_timeout_ms);
    dbl("exec.flat_usd", "--exec-flat-usd", s.exec_flat_usd);
    str("prompts", "--prompts", s.prompts_dir);
    num("k", "--k", s.k);
    num("batch_size", "--batch-size", s.batch_size);
    num("fix_depth", "--fix-depth", s.fix_depth);
    num("seed", "--seed", s.seed);
    num("jobs", "--jobs", s.jobs);
}

void load_and_merge(Settings& s, const CLI::App* cmd) {
    if (s.config_path.empty()) return;
    merge_config(s, load_config_file(s.config_path), cmd);
}

std::shared_ptr<Backend> make_backend(const Settings& s) {
    std::shared_ptr<Backend> backend;
    if (starts_with(s.backend_spec, "scripted:")) {
        backend = ScriptedBackend::load(s.backend_spec.substr(9));
    } else if (s.backend_spec == "http") {
        HttpBackendConfig cfg;
        cfg.endpoint_url = s.endpoint;
        cfg.model = s.model;
        cfg.api_key_env = s.api_key_env;
        cfg.timeout_seconds = s.http_timeout_s;
        cfg.max_retries = s.http_retries;
        cfg.pricing = PricingTable{s.price_in, s.price_out};
        if (cfg.endpoint_url.empty() || cfg.model.empty()) {
            throw RunError(ErrKind::config,
                           "http backend needs --endpoint and --model (or config keys)");
        }
        backend = std::make_shared<HttpBackend>(
            cfg, make_httplib_transport(cfg),
            [](const std::string& w) { std::cerr << "warning: " << w << "\n"; });
    } else if (s.backend_spec.empty()) {
        throw RunError(ErrKind::config, "no backend selected (use --backend scripted:FILE|http)");
    } else {
        throw RunError(ErrKind::config, "unknown backend '" + s.backend_spec +
                                            "' (use scripted:FILE or http)");
    }
    if (!s.record_fixtures.empty()) {
        backend = std::make_shared<RecordingBackend>(backend, s.record_fixtures);
    }
    return backend;
}

RegistryOptions make_registry_options(const Settings& s) {
    RegistryOptions opts;
    opts.pricing = PricingTable{s.price_in, s.price_out};
    opts.flat_cost_exec_usd = s.exec_flat_usd;
    if (s.exec_kind == "sandbox") {
        opts.runner_factory = [] { return std::make_shared<SandboxRunner>(); };
    } else if (s.exec_kind == "command") {
        CommandRunnerConfig cfg;
        cfg.command = s.exec_command;
        cfg.file_extension = s.exec_extension;
        cfg.timeout_ms = s.exec_timeout_ms;
        opts.runner_factory = [cfg] { return std::make_shared<CommandRunner>(cfg); };
    } else {
        throw RunError(ErrKind::config,
                       "unknown exec.kind '" + s.exec_kind + "' (use sandbox or command)");
    }
    return opts;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError(ErrKind::io, "cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError(ErrKind::io, "cannot write file: " + path.string());
    out << content;
}

std::string ledger_line(const CostLedger& c) {
    return "$" + format_double(c.usd) + " (tokens in=" + std::to_string(c.input_tokens) +
           " out=" + std::to_string(c.output_tokens) + ")";
}

// ---- run-strategy -------------------------------------------------------

struct RunStrategyArgs {
    Settings s;
    std::string strat_file;
    std::string builtin;
    std::string text;
    std::string input;
    std::string trace_out;
    bool classify_only = false;
};

int cmd_run_strategy(const RunStrategyArgs& a) {
    int sources = (!a.strat_file.empty()) + (!a.builtin.empty()) + (!a.text.empty());
    if (sources != 1) {
        throw RunError(ErrKind::config, "give exactly one of --strat, --builtin, --text");
    }
    ProgPtr program;
    if (!a.builtin.empty()) {
        program = builtin_strategy(a.builtin);
    } else {
        std::string src = !a.text.empty() ? a.text : read_file(a.strat_file);
        ParseResult parsed = parse_strategy(src);
        if (!parsed.ok()) {
            std::string why = parsed.diagnostics.empty()
                                  ? "parse failed"
                                  : format_diagnostic(parsed.diagnostics.front());
            throw RunError(ErrKind::config, why);
        }
        program = parsed.program;
    }

    if (a.classify_only) {
        auto backend = std::make_shared<ScriptedBackend>();
        ProcessRegistry reg = default_registry(backend, RegistryOptions{});
        auto diags = validate(*program, reg.names());
        for (const auto& d : diags) std::cerr << format_diagnostic(d) << "\n";
        if (!diags.empty()) return 1;
        StrategyTraits t = classify(*program, reg);
        std::cout << pretty_print(*program) << "\n"
                  << "par=" << t.uses_par << " if=" << t.uses_if << " fix=" << t.uses_fix
                  << " llm=" << t.uses_llm << " tools=" << t.uses_code << "\n";
        return 0;
    }

    std::shared_ptr<Backend> backend = make_backend(a.s);
    ProcessRegistry reg = default_registry(backend, make_registry_options(a.s));
    auto diags = validate(*program, reg.names());
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << format_diagnostic(d) << "\n";
        throw RunError(ErrKind::config, "strategy failed validation");
    }

    RunState state;
    RunOptions opts;
    opts.fix_max_depth = a.s.fix_depth;
    opts.seed = a.s.seed;
    opts.retain_payloads = a.s.retain_payloads || !a.trace_out.empty();
    Value out = run(program, Value(a.input), state, reg, opts);

    std::cout << "answer: " << to_display_text(out) << "\n";
    std::cout << "cost: " << ledger_line(state.cost) << "\n";
    for (const auto& [name, usd] : state.cost.per_process) {
        std::cout << "  " << name << ": $" << format_double(usd) << "\n";
    }
    if (!a.trace_out.empty()) {
        write_file(a.trace_out, export_trace_jsonl(state.trace, state.cost));
        std::cout << "trace: " << a.trace_out << " (" << state.trace.size() << " events)\n";
    }
    return 0;
}

// ---- continual ----------------------------------------------------------

struct ContinualArgs {
    Settings s;
    std::string tasks_file;
    std::string holdout_file;
    std::string context_file;
    std::string out_dir = "out";
    bool shuffle = false;
    bool dry_run = false;
};

int cmd_continual(const ContinualArgs& a) {
    std::vector<TaskInstance> tasks = load_tasks(a.tasks_file);
    std::vector<TaskInstance> holdout;
    if (!a.holdout_file.empty()) holdout = load_tasks(a.holdout_file);
    Context initial;
    if (!a.context_file.empty()) {
        initial = context_from_json(nlohmann::json::parse(read_file(a.context_file)));
    }
    PromptSet prompts = load_prompts(a.s.prompts_dir);
    if (a.s.k < 1) throw RunError(ErrKind::config, "--k must be at least 1");
    if (a.s.batch_size < 1) throw RunError(ErrKind::config, "--batch-size must be at least 1");

    if (a.shuffle) {
        Rng rng(mix_seed(a.s.seed, fnv1a64("shuffle")));
        rng.shuffle(tasks);
    }

    if (a.dry_run) {
        // Validate the backend spec shape without touching the network.
        if (starts_with(a.s.backend_spec, "scripted:")) {
            ScriptedBackend::load(a.s.backend_spec.substr(9));
        } else if (a.s.backend_spec == "http") {
            if (a.s.endpoint.empty() || a.s.model.empty()) {
                throw RunError(ErrKind::config,
                               "http backend needs --endpoint and --model (or config keys)");
            }
            parse_url(a.s.endpoint);
        } else if (!a.s.backend_spec.empty()) {
            throw RunError(ErrKind::config, "unknown backend '" + a.s.backend_spec + "'");
        }
        make_registry_options(a.s);
        std::cout << "dry run ok: " << tasks.size() << " tasks, " << holdout.size()
                  << " holdout, k=" << a.s.k << ", batch-size=" << a.s.batch_size
                  << ", prompts=" << (a.s.prompts_dir.empty() ? "builtin" : a.s.prompts_dir)
                  << "\n";
        return 0;
    }

    std::shared_ptr<Backend> backend = make_backend(a.s);
    EgurDeps deps = make_egur_deps(backend, make_verifier(), make_registry_options(a.s),
                                   static_cast<std::size_t>(a.s.k));
    deps.prompts = prompts;
    deps.run_options.fix_max_depth = a.s.fix_depth;
    deps.run_options.seed = a.s.seed;
    deps.run_options.retain_payloads = a.s.retain_payloads;

    fs::path out_dir(a.out_dir);
    fs::create_directories(out_dir / "traces");
    std::ofstream episodes(out_dir / "episodes.jsonl", std::ios::binary);
    if (!episodes) throw RunError(ErrKind::io, "cannot write " + (out_dir / "episodes.jsonl").string());

    ContinualOptions copts;
    copts.batch_size = static_cast<std::size_t>(a.s.batch_size);
    unsigned hw = std::thread::hardware_concurrency();
    copts.jobs = a.s.jobs > 0 ? static_cast<std::size_t>(a.s.jobs) : (hw == 0 ? 1 : hw);
    copts.holdout = holdout;
    copts.on_episode = [&](const SampleRecord& rec, const AnswerPhase& phase,
                           const ConsolidateResult& cons) {
        nlohmann::ordered_json j = sample_to_json(rec);
        nlohmann::ordered_json cands = nlohmann::ordered_json::array();
        for (const Experience& exp : phase.experiences) {
            std::string trace_name =
                "e" + std::to_string(rec.index + 1) + "_s" + std::to_string(exp.slot) + ".jsonl";
            write_file(out_dir / "traces" / trace_name,
                       export_trace_jsonl(exp.trace, exp.cost));
            nlohmann::ordered_json c;
            c["slot"] = exp.slot;
            c["strategy"] = exp.strategy_text;
            c["fromFallback"] =
                phase.candidates[static_cast<std::size_t>(exp.slot) - 1].from_fallback;
            c["failed"] = exp.failed;
            if (exp.failed) c["error"] = exp.error;
            c["answer"] = exp.answer;
            c["correct"] = exp.feedback.correct;
            c["usd"] = exp.cost.usd;
            c["trace"] = "traces/" + trace_name;
            cands.push_back(std::move(c));
        }
        j["candidatesDetail"] = cands;
        j["consolidation"] =
            nlohmann::ordered_json{{"opsApplied", cons.ops_applied},
                                   {"llmFailed", cons.llm_failed},
                                   {"rejected", !cons.llm_failed && !cons.errors.empty()},
                                   {"errors", cons.errors}};
        episodes << j.dump() << "\n";
    };

    ContinualResult result = run_continual(deps, tasks, std::move(initial), copts);
    episodes.close();

    result.report.config["tasks"] = a.tasks_file;
    result.report.config["backend"] =
        starts_with(a.s.backend_spec, "scripted:") ? "scripted" : a.s.backend_spec;
    result.report.config["shuffle"] = a.shuffle ? "true" : "false";
    write_file(out_dir / "report.json",
               report_to_json(result.report, context_to_json(result.context)).dump(2) + "\n");
    write_file(out_dir / "costs.csv", costs_csv(result.report.samples));
    write_file(out_dir / "context.txt", serialize_context(result.context));
    write_file(out_dir / "context.json", context_to_json(result.context).dump(2) + "\n");

    CostLedger total = total_cost(result.report.samples);
    std::cout << "samples: " << result.report.samples.size()
              << "  prequential accuracy: " << format_double(prequential_accuracy(result.report.samples))
              << "\n";
    std::cout << "cost: " << ledger_line(total) << "\n";
    std::cout << "outputs: " << (out_dir / "report.json").string() << "\n";
    return 0;
}

// ---- gen-tasks ----------------------------------------------------------

struct GenTasksArgs {
    std::string type = "sat3";
    std::string out_file;
    SatTaskOptions sat;
};

int cmd_gen_tasks(const GenTasksArgs& a) {
    if (a.type != "sat3") {
        throw RunError(ErrKind::config, "unknown task type '" + a.type + "' (only sat3)");
    }
    std::vector<TaskInstance> tasks = gen_sat_tasks(a.sat);
    save_tasks(a.out_file, tasks);
    std::size_t sat = 0, unsat = 0, unknown = 0;
    for (const auto& t : tasks) {
        if (!t.satisfiable.has_value()) ++unknown;
        else if (*t.satisfiable) ++sat;
        else ++unsat;
    }
    std::cout << "wrote " << tasks.size() << " tasks to " << a.out_file << " (" << sat
              << " satisfiable, " << unsat << " unsatisfiable, " << unknown << " unknown)\n";
    return 0;
}

// ---- replay -------------------------------------------------------------

int cmd_replay(const std::string& trace_file) {
    ImportedTrace t = import_trace_jsonl(read_file(trace_file));
    std::cout << replay_trace(t.events);
    std::cout << "total: " << ledger_line(t.total) << "\n";
    return 0;
}

// ---- report -------------------------------------------------------------

int cmd_report(const std::string& report_file) {
    nlohmann::json j = nlohmann::json::parse(read_file(report_file), nullptr, false);
    if (j.is_discarded()) throw RunError(ErrKind::io, "not valid JSON: " + report_file);
    std::cout << "samples: " << j.value("samples", 0)
              << "  prequential accuracy: " << j.value("prequentialAccuracy", 0.0) << "\n";
    if (j.contains("perBatchAccuracy")) {
        std::cout << "per-batch:";
        for (const auto& b : j["perBatchAccuracy"]) std::cout << " " << b.get<double>();
        std::cout << "\n";
    }
    if (j.contains("cost") && j["cost"].contains("total")) {
        CostLedger total = ledger_from_json(j["cost"]["total"]);
        std::cout << "cost: " << ledger_line(total) << "\n";
    }
    if (j.contains("holdout")) {
        for (const auto& h : j["holdout"]) {
            std::cout << "holdout at " << h.value("atSample", 0) << ": "
                      << h.value("accuracy", 0.0) << " (" << h.value("correct", 0) << "/"
                      << h.value("total", 0) << ")\n";
        }
    }
    return 0;
}

void add_settings_flags(CLI::App* cmd, Settings& s, bool with_loop_opts) {
    cmd->add_option("--config", s.config_path, "key = value config file");
    cmd->add_option("--backend", s.backend_spec, "scripted:FILE or http");
    cmd->add_option("--endpoint", s.endpoint, "http endpoint url");
    cmd->add_option("--model", s.model, "http model name");
    cmd->add_option("--api-key-env", s.api_key_env, "env var holding the API key");
    cmd->add_option("--http-timeout", s.http_timeout_s, "http timeout seconds");
    cmd->add_option("--http-retries", s.http_retries, "http retry count");
    cmd->add_option("--price-in", s.price_in, "usd per million input tokens");
    cmd->add_option("--price-out", s.price_out, "usd per million output tokens");
    cmd->add_option("--exec-kind", s.exec_kind, "code runner: sandbox or command");
    cmd->add_option("--exec-command", s.exec_command, "command template, {file} = source");
    cmd->add_option("--exec-extension", s.exec_extension, "source file extension");
    cmd->add_option("--exec-timeout-ms", s.exec_timeout_ms, "code execution timeout");
    cmd->add_option("--exec-flat-usd", s.exec_flat_usd, "flat charge per ExecCode call");
    cmd->add_option("--fix-depth", s.fix_depth, "recursion budget per recfun activation");
    cmd->add_option("--seed", s.seed, "deterministic seed");
    cmd->add_flag("--retain-payloads", s.retain_payloads, "keep values in traces (for replay)");
    cmd->add_option("--record-fixtures", s.record_fixtures, "tee backend traffic to JSONL");
    if (with_loop_opts) {
        cmd->add_option("--k", s.k, "candidate strategies per episode");
        cmd->add_option("--batch-size", s.batch_size, "samples answered per learning batch");
        cmd->add_option("--jobs", s.jobs, "parallel answer phases (0 = logical cores)");
        cmd->add_option("--prompts", s.prompts_dir, "prompt template directory");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strategy-language runner and experience-guided reasoning harness"};
    app.require_subcommand(1);

    RunStrategyArgs rs;
    CLI::App* run_cmd = app.add_subcommand("run-strategy", "execute one strategy program");
    run_cmd->add_option("--strat", rs.strat_file, "strategy program file");
    run_cmd->add_option("--builtin", rs.builtin, "builtin strategy name");
    run_cmd->add_option("--text", rs.text, "strategy program text");
    run_cmd->add_option("--input", rs.input, "input question")->required();
    run_cmd->add_option("--trace-out", rs.trace_out, "write the trace JSONL here");
    run_cmd->add_flag("--classify", rs.classify_only, "print structure traits, do not run");
    add_settings_flags(run_cmd, rs.s, false);

    ContinualArgs ca;
    CLI::App* cont_cmd = app.add_subcommand("continual", "prequential learning over a stream");
    cont_cmd->add_option("--tasks", ca.tasks_file, "task JSONL stream")->required();
    cont_cmd->add_option("--holdout", ca.holdout_file, "held-out task JSONL");
    cont_cmd->add_option("--context", ca.context_file, "initial context JSON");
    cont_cmd->add_option("--out", ca.out_dir, "output directory");
    cont_cmd->add_flag("--shuffle", ca.shuffle, "shuffle the stream by --seed");
    cont_cmd->add_flag("--dry-run", ca.dry_run, "validate inputs, no backend calls");
    add_settings_flags(cont_cmd, ca.s, true);

    GenTasksArgs ga;
    CLI::App* gen_cmd = app.add_subcommand("gen-tasks", "generate a 3-SAT task file");
    gen_cmd->add_option("--type", ga.type, "task type (sat3)");
    gen_cmd->add_option("--out", ga.out_file, "output JSONL path")->required();
    gen_cmd->add_option("--count", ga.sat.count, "instances to generate");
    gen_cmd->add_option("--vars-min", ga.sat.vars_min, "minimum variable count");
    gen_cmd->add_option("--vars-max", ga.sat.vars_max, "maximum variable count");
    gen_cmd->add_option("--ratio", ga.sat.ratio, "clause/variable ratio");
    gen_cmd->add_option("--seed", ga.sat.seed, "generator seed");
    gen_cmd->add_flag("--satisfiable-only", ga.sat.satisfiable_only,
                      "keep only provably satisfiable instances");

    std::string trace_file;
    CLI::App* replay_cmd = app.add_subcommand("replay", "render a saved trace");
    replay_cmd->add_option("--trace", trace_file, "trace JSONL file")->required();

    std::string report_file = "report.json";
    CLI::App* report_cmd = app.add_subcommand("report", "summarize a report.json");
    report_cmd->add_option("--report", report_file, "report JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) {
            load_and_merge(rs.s, run_cmd);
            return cmd_run_strategy(rs);
        }
        if (*cont_cmd) {
            load_and_merge(ca.s, cont_cmd);
            return cmd_continual(ca);
        }
        if (*gen_cmd) return cmd_gen_tasks(ga);
        if (*replay_cmd) return cmd_replay(trace_file);
        if (*report_cmd) return cmd_report(report_file);
    } catch (const RunError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return (e.kind() == ErrKind::config || e.kind() == ErrKind::io) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
