#pragma once

// The strategy interpreter: a state-threading evaluator over RunState.
//
//   return      output := input
//   pure e      evaluate e (with `input` bound); closures apply to the input
//   get / put   read / replace userState (put passes its input through)
//   a ; b       feed a's output to b
//   a || b      run both on isolated copies of the state, join
//   if c then t else e   run c on the live state; the taken branch sees the
//                        *original* input; only the taken branch is charged
//   recfun f: body       bounded unrolling; each re-entry via `f` counts
//                        against the fix budget for that activation
//
// Par join: userState becomes {"left": sL, "right": sR}, the conversation is
// base + left-delta + right-delta, the code environment reverts to the base
// handle (branch forks are discarded), costs add. Branches run deterministic
// left-then-right; concurrency is an allowed implementation, not a promise.
//
// Tracing: return/pure/get/put and every base-process call append exactly one
// event; par appends one event with two wrapper children holding the branch
// traces; seq/if/fix add nothing of their own. If an error is thrown, the
// events completed so far stay in the state (partial trace).

#include <chrono>
#include <string>
#include <vector>

#include "egur/ast.hpp"
#include "egur/common.hpp"
#include "egur/eval.hpp"
#include "egur/registry.hpp"
#include "egur/state.hpp"
#include "egur/trace.hpp"
#include "egur/validate.hpp"
#include "egur/value.hpp"

namespace egur {

struct RunOptions {
    int fix_max_depth = 25;       // body entries allowed per recfun activation
    bool retain_payloads = false; // keep canonical input/output texts in events
    std::uint64_t seed = 0;       // per-invocation seeds derive from this
};

namespace detail {

class Interp {
public:
    Interp(const ProcessRegistry& reg, const RunOptions& opts) : reg_(reg), opts_(opts) {}

    Value exec(const Program& p, const Value& input, RunState& st) {
        switch (p.kind) {
            case ProgKind::ret: {
                position_++;
                append_event(st, "return", input, input, CostLedger{}, 0);
                return input;
            }
            case ProgKind::get: {
                position_++;
                Value out = st.user_state;
                append_event(st, "get", input, out, CostLedger{}, 0);
                return out;
            }
            case ProgKind::pure: {
                position_++;
                auto t0 = now();
                Env env;
                env.bindings[kInputBinding] = input;
                EvalBudget budget;
                Value v = eval_expr(*p.expr, env, budget);
                Value out = v.is_closure() ? apply_closure(v.as_closure(), input) : v;
                append_event(st, "pure", input, out, CostLedger{}, since(t0));
                return out;
            }
            case ProgKind::put: {
                position_++;
                auto t0 = now();
                Env env;
                env.bindings[kInputBinding] = input;
                EvalBudget budget;
                Value v = eval_expr(*p.expr, env, budget);
                if (contains_closure(v)) {
                    throw RunError(ErrKind::bad_state, "userState cannot hold a closure", p.span);
                }
                st.user_state = std::move(v);
                append_event(st, "put", input, input, CostLedger{}, since(t0));
                return input;
            }
            case ProgKind::base_proc: {
                std::uint64_t pos = position_++;
                auto t0 = now();
                ProcessInvocation inv{st, mix_seed(opts_.seed, pos), CostLedger{}};
                Value out = reg_.invoke(p.name, input, inv);
                inv.delta.per_process[p.name] = inv.delta.usd;
                st.cost += inv.delta;
                append_event(st, p.name, input, out, std::move(inv.delta), since(t0));
                return out;
            }
            case ProgKind::seq: {
                Value mid = exec(*p.a, input, st);
                return exec(*p.b, mid, st);
            }
            case ProgKind::if_: {
                Value cond = exec(*p.a, input, st);
                if (!cond.is_bool()) {
                    throw RunError(ErrKind::type_error,
                                   std::string("if condition must produce a bool, got ") +
                                       cond.type_name(),
                                   p.a->span);
                }
                return exec(cond.as_bool() ? *p.b : *p.c, input, st);
            }
            case ProgKind::par: {
                position_++;
                auto t0 = now();
                RunState left = branch_of(st);
                RunState right = branch_of(st);
                Value left_out = exec(*p.a, input, left);
                Value right_out = exec(*p.b, input, right);

                std::size_t base_len = st.conversation.size();
                for (std::size_t i = base_len; i < left.conversation.size(); ++i) {
                    st.conversation.push_back(left.conversation[i]);
                }
                for (std::size_t i = base_len; i < right.conversation.size(); ++i) {
                    st.conversation.push_back(right.conversation[i]);
                }
                st.cost += left.cost;
                st.cost += right.cost;
                ValueMap joined_state;
                joined_state["left"] = left.user_state;
                joined_state["right"] = right.user_state;
                st.user_state = Value(std::move(joined_state));
                ValueMap out_map;
                out_map["left"] = left_out;
                out_map["right"] = right_out;
                Value out(std::move(out_map));

                TraceEvent ev = make_event("par", input, out, CostLedger{}, since(t0));
                TraceEvent lw = make_event("par.left", input, left_out, CostLedger{}, 0);
                lw.children = std::move(left.trace);
                TraceEvent rw = make_event("par.right", input, right_out, CostLedger{}, 0);
                rw.children = std::move(right.trace);
                ev.children.push_back(std::move(lw));
                ev.children.push_back(std::move(rw));
                st.trace.push_back(std::move(ev));
                return out;
            }
            case ProgKind::fix: {
                if (opts_.fix_max_depth < 1) {
                    throw RunError(ErrKind::fix_budget,
                                   "fix budget of " + std::to_string(opts_.fix_max_depth) +
                                       " forbids entering 'recfun " + p.name + "'",
                                   p.span);
                }
                frames_.push_back(FixFrame{p.name, &p, 1});
                struct Pop {
                    std::vector<FixFrame>& frames;
                    ~Pop() { frames.pop_back(); }
                } pop{frames_};
                return exec(*p.a, input, st);
            }
            case ProgKind::recur: {
                std::size_t idx = frames_.size();
                for (std::size_t i = frames_.size(); i-- > 0;) {
                    if (frames_[i].name == p.name) {
                        idx = i;
                        break;
                    }
                }
                if (idx == frames_.size()) {
                    throw RunError(ErrKind::unbound_name,
                                   "recursion name '" + p.name + "' is not active", p.span);
                }
                int depth = ++frames_[idx].depth;
                if (depth > opts_.fix_max_depth) {
                    throw RunError(ErrKind::fix_budget,
                                   "fix budget exhausted: 'recfun " + p.name + "' entered " +
                                       std::to_string(depth) + " times (max " +
                                       std::to_string(opts_.fix_max_depth) + ")",
                                   p.span);
                }
                const Program* body = frames_[idx].node->a.get();
                return exec(*body, input, st);
            }
        }
        throw RunError(ErrKind::type_error, "unreachable program kind", p.span);
    }

private:
    struct FixFrame {
        std::string name;
        const Program* node;
        int depth;
    };

    static std::chrono::steady_clock::time_point now() { return std::chrono::steady_clock::now(); }
    static std::int64_t since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(now() - t0).count();
    }

    RunState branch_of(const RunState& base) {
        RunState b;
        b.conversation = base.conversation;
        b.exec_env = base.exec_env ? base.exec_env->fork() : nullptr;
        b.user_state = base.user_state;
        b.script_partition = base.script_partition;
        return b;
    }

    TraceEvent make_event(const std::string& label, const Value& in, const Value& out,
                          CostLedger delta, std::int64_t wall) {
        TraceEvent e;
        e.process = label;
        e.input_digest = digest(in);
        e.output_digest = digest(out);
        if (opts_.retain_payloads) {
            e.input_payload = to_text(in);
            e.output_payload = to_text(out);
        }
        e.cost_delta = std::move(delta);
        e.wall_ns = wall;
        return e;
    }

    void append_event(RunState& st, const std::string& label, const Value& in, const Value& out,
                      CostLedger delta, std::int64_t wall) {
        st.trace.push_back(make_event(label, in, out, std::move(delta), wall));
    }

    const ProcessRegistry& reg_;
    const RunOptions& opts_;
    std::vector<FixFrame> frames_;
    std::uint64_t position_ = 0;
};

}  // namespace detail

inline Value run(const ProgPtr& p, const Value& input, RunState& state,
                 const ProcessRegistry& registry, const RunOptions& opts = {}) {
    if (!p) throw RunError(ErrKind::config, "cannot run a null program");
    detail::Interp interp(registry, opts);
    return interp.exec(*p, input, state);
}

}  // namespace egur
