#pragma once

// Code execution environments behind the ExecCode process.
//
// SandboxRunner (the default) interprets the expression sublanguage itself:
// each line of a submitted block is either `name = expr` (binds into the
// persistent environment) or a bare expression (its value is printed).
// Errors in submitted code come back as observation text — the calling
// strategy is supposed to *see* its mistakes — while the step/recursion
// budget maps runaway code to a classified timeout error.
//
// CommandRunner shells out to a configured interpreter with a hard deadline
// and an output cap. The episode environment persists by accumulating
// accepted source and re-executing it on every call; when the previous
// output is a prefix of the new output (true for deterministic scripts) only
// the new suffix is reported.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "egur/ast.hpp"
#include "egur/common.hpp"
#include "egur/eval.hpp"
#include "egur/lexer.hpp"
#include "egur/parser.hpp"
#include "egur/state.hpp"
#include "egur/value.hpp"

namespace egur {

class SandboxRunner : public CodeRunner {
public:
    SandboxRunner() = default;
    explicit SandboxRunner(Env env) : env_(std::move(env)) {}

    Outcome run(const std::string& code) override {
        EvalBudget budget;  // shared across the lines of one submission
        std::string emitted;
        Env scratch = env_;  // commit only if the whole block succeeds
        for (const std::string& raw : split_lines(code)) {
            std::string line = trim(raw);
            if (line.empty() || line[0] == '#') continue;
            try {
                run_line(line, scratch, budget, emitted);
            } catch (const RunError& e) {
                if (e.kind() == ErrKind::timeout) throw;  // hard failure, not an observation
                return Outcome{false, std::string("error: ") + e.what()};
            }
        }
        env_ = std::move(scratch);
        return Outcome{true, emitted};
    }

    std::shared_ptr<CodeRunner> fork() const override {
        return std::make_shared<SandboxRunner>(env_);
    }

    const Env& environment() const { return env_; }

private:
    void run_line(const std::string& line, Env& env, EvalBudget& budget, std::string& emitted) {
        // `name = expr` binds; anything else evaluates and prints.
        LexResult lexed = lex(line);
        if (lexed.ok() && lexed.tokens.size() >= 3 && lexed.tokens[0].type == Tok::ident &&
            lexed.tokens[1].type == Tok::equals) {
            std::string rhs = line.substr(lexed.tokens[1].span.end);
            ExprParseResult pr = parse_expression(rhs);
            if (!pr.ok()) {
                throw RunError(ErrKind::type_error,
                               "bad expression: " + pr.diagnostics.front().message);
            }
            env.bindings[lexed.tokens[0].text] = eval_expr(*pr.expr, env, budget);
            return;
        }
        ExprParseResult pr = parse_expression(line);
        if (!pr.ok()) {
            throw RunError(ErrKind::type_error,
                           "bad expression: " + pr.diagnostics.front().message);
        }
        Value v = eval_expr(*pr.expr, env, budget);
        emitted += to_display_text(v);
        emitted += '\n';
    }

    Env env_;
};

struct CommandRunnerConfig {
    // Space-separated command; "{file}" is replaced by the source path.
    std::string command = "/bin/sh {file}";
    std::string file_extension = ".sh";
    int timeout_ms = 10'000;
    std::size_t max_output_bytes = 65'536;
};

class CommandRunner : public CodeRunner {
public:
    explicit CommandRunner(CommandRunnerConfig config) : config_(std::move(config)) {}

    Outcome run(const std::string& code) override {
        std::string full_source = accumulated_ + code;
        if (!full_source.empty() && full_source.back() != '\n') full_source += '\n';

        ExecResult r = execute(full_source);
        if (r.timed_out) {
            throw RunError(ErrKind::timeout, "code execution exceeded " +
                                                 std::to_string(config_.timeout_ms) + "ms");
        }
        std::string visible = r.output;
        if (!last_output_.empty() && starts_with(visible, last_output_)) {
            visible = visible.substr(last_output_.size());
        }
        if (r.exit_code != 0) {
            // Failed code is observed but not committed to the environment.
            return Outcome{false,
                           visible + "\n[exit status " + std::to_string(r.exit_code) + "]"};
        }
        accumulated_ = full_source;
        last_output_ = r.output;
        return Outcome{true, visible};
    }

    std::shared_ptr<CodeRunner> fork() const override {
        auto copy = std::make_shared<CommandRunner>(config_);
        copy->accumulated_ = accumulated_;
        copy->last_output_ = last_output_;
        return copy;
    }

private:
    struct ExecResult {
        std::string output;  // stdout + stderr, interleaved
        int exit_code = 0;
        bool timed_out = false;
    };

    ExecResult execute(const std::string& source) {
        char path[] = "/tmp/egur_exec_XXXXXX";
        int src_fd = ::mkstemp(path);
        if (src_fd < 0) throw RunError(ErrKind::io, "mkstemp failed");
        std::string final_path = std::string(path) + config_.file_extension;
        if (::rename(path, final_path.c_str()) != 0) {
            ::close(src_fd);
            ::unlink(path);
            throw RunError(ErrKind::io, "cannot place source file");
        }
        ssize_t written = ::write(src_fd, source.data(), source.size());
        ::close(src_fd);
        if (written != static_cast<ssize_t>(source.size())) {
            ::unlink(final_path.c_str());
            throw RunError(ErrKind::io, "short write to source file");
        }

        std::vector<std::string> argv_s = build_argv(final_path);
        std::vector<char*> argv;
        argv.reserve(argv_s.size() + 1);
        for (std::string& a : argv_s) argv.push_back(a.data());
        argv.push_back(nullptr);

        int fds[2];
        if (::pipe(fds) != 0) {
            ::unlink(final_path.c_str());
            throw RunError(ErrKind::io, "pipe failed");
        }

        pid_t pid = ::fork();
        if (pid < 0) {
            ::close(fds[0]);
            ::close(fds[1]);
            ::unlink(final_path.c_str());
            throw RunError(ErrKind::io, "fork failed");
        }
        if (pid == 0) {
            ::dup2(fds[1], STDOUT_FILENO);
            ::dup2(fds[1], STDERR_FILENO);
            ::close(fds[0]);
            ::close(fds[1]);
            ::execvp(argv[0], argv.data());
            std::perror("execvp");
            ::_exit(127);
        }
        ::close(fds[1]);

        ExecResult result;
        std::string& out = result.output;
        bool truncated = false;
        auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(config_.timeout_ms);
        char buf[4096];
        for (;;) {
            if (std::chrono::steady_clock::now() >= deadline) {
                ::kill(pid, SIGKILL);
                result.timed_out = true;
                break;
            }
            struct pollfd pf{fds[0], POLLIN, 0};
            int rc = ::poll(&pf, 1, 50);
            if (rc > 0) {
                ssize_t n = ::read(fds[0], buf, sizeof(buf));
                if (n <= 0) break;  // EOF (or error): child is done writing
                if (!truncated) {
                    std::size_t room = config_.max_output_bytes > out.size()
                                           ? config_.max_output_bytes - out.size()
                                           : 0;
                    std::size_t take = std::min(static_cast<std::size_t>(n), room);
                    out.append(buf, take);
                    if (take < static_cast<std::size_t>(n)) {
                        out += "\n[output truncated]\n";
                        truncated = true;
                    }
                }
                continue;
            }
            if (rc < 0 && errno == EINTR) continue;
        }
        ::close(fds[0]);
        int status = 0;
        while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {}
        ::unlink(final_path.c_str());
        if (!result.timed_out) {
            result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
        }
        return result;
    }

    std::vector<std::string> build_argv(const std::string& file) const {
        std::vector<std::string> argv;
        std::string current;
        for (char c : config_.command) {
            if (c == ' ') {
                if (!current.empty()) argv.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) argv.push_back(current);
        if (argv.empty()) throw RunError(ErrKind::config, "empty runner command");
        for (std::string& a : argv) {
            std::size_t at = a.find("{file}");
            if (at != std::string::npos) a.replace(at, 6, file);
        }
        return argv;
    }

    CommandRunnerConfig config_;
    std::string accumulated_;
    std::string last_output_;
};

}  // namespace egur
