#include "autonoma/supervisor/supervisor.hpp"

#include "autonoma/agents/direct_context.hpp"
#include "autonoma/agents/invoke.hpp"
#include "autonoma/builtin/reporter.hpp"
#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/model/events.hpp"
#include "autonoma/model/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace autonoma::supervisor {

namespace {

enum TimerKind : std::uint64_t { ack_timer = 0, runtime_timer = 1, stall_timer = 2, retry_timer = 3 };

std::uint64_t tag(std::uint64_t run, TimerKind k) { return run * 4 + k; }

Json payload_json(const agents::TaskPayload& p) {
    return Json{{"conversation_id", p.conversation_id},
                {"step_id", p.step_id},
                {"description", p.description},
                {"required_capability", p.required_capability},
                {"attempt", p.attempt},
                {"lang", model::to_string(p.lang)},
                {"inputs", p.inputs},
                {"args", p.args}};
}

std::string digest_of(const Json& j) { return sha256_hex(canonical_dump(j)); }

}  // namespace

// ---- policy ----------------------------------------------------------------

void validate_policy(const ExecutionPolicy& p) {
    if (p.backoff_initial_ms < 0 || p.backoff_multiplier < 0 || p.ack_timeout_ms < 0 || p.heartbeat_interval_ms < 0) {
        throw Error(Errc::config_error, "execution policy values must be non-negative");
    }
    if (p.max_concurrency < 1) throw Error(Errc::config_error, "max_concurrency must be at least 1");
    if (p.per_agent_concurrency < 1) throw Error(Errc::config_error, "per_agent_concurrency must be at least 1");
}

Json policy_to_json(const ExecutionPolicy& p) {
    return Json{{"retry_limit", p.retry_limit},
                {"backoff_initial_ms", p.backoff_initial_ms},
                {"backoff_multiplier", p.backoff_multiplier},
                {"backoff_jitter", p.backoff_jitter},
                {"jitter_seed", p.jitter_seed},
                {"ack_timeout_ms", p.ack_timeout_ms},
                {"heartbeat_interval_ms", p.heartbeat_interval_ms},
                {"missed_heartbeats_to_stall", p.missed_heartbeats_to_stall},
                {"max_concurrency", p.max_concurrency},
                {"per_agent_concurrency", p.per_agent_concurrency}};
}

ExecutionPolicy policy_from_json(const Json& j, ExecutionPolicy p) {
    if (!j.is_object()) throw Error(Errc::config_error, "execution policy must be an object");
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "retry_limit") {
                if (v.get<std::int64_t>() < 0) throw Error(Errc::config_error, "retry_limit must be non-negative");
                p.retry_limit = v.get<std::uint32_t>();
            } else if (k == "backoff_initial_ms") {
                p.backoff_initial_ms = v.get<std::int64_t>();
            } else if (k == "backoff_multiplier") {
                p.backoff_multiplier = v.get<double>();
            } else if (k == "backoff_jitter") {
                p.backoff_jitter = v.get<bool>();
            } else if (k == "jitter_seed") {
                p.jitter_seed = v.get<std::uint64_t>();
            } else if (k == "ack_timeout_ms") {
                p.ack_timeout_ms = v.get<std::int64_t>();
            } else if (k == "heartbeat_interval_ms") {
                p.heartbeat_interval_ms = v.get<std::int64_t>();
            } else if (k == "missed_heartbeats_to_stall") {
                if (v.get<std::int64_t>() < 0) throw Error(Errc::config_error, "missed_heartbeats_to_stall < 0");
                p.missed_heartbeats_to_stall = v.get<std::uint32_t>();
            } else if (k == "max_concurrency") {
                if (v.get<std::int64_t>() < 1) throw Error(Errc::config_error, "max_concurrency must be at least 1");
                p.max_concurrency = v.get<std::uint32_t>();
            } else if (k == "per_agent_concurrency") {
                if (v.get<std::int64_t>() < 1) throw Error(Errc::config_error, "per_agent_concurrency < 1");
                p.per_agent_concurrency = v.get<std::uint32_t>();
            } else {
                throw Error(Errc::config_error, "unknown execution policy field '" + k + "'");
            }
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::config_error, std::string("execution policy: ") + e.what());
    }
    validate_policy(p);
    return p;
}

std::int64_t backoff_ms(const ExecutionPolicy& p, std::uint32_t failed_attempt) {
    const double base =
        static_cast<double>(p.backoff_initial_ms) * std::pow(p.backoff_multiplier, failed_attempt > 0 ? failed_attempt - 1 : 0);
    if (!p.backoff_jitter) return static_cast<std::int64_t>(std::llround(base));
    std::mt19937_64 rng(p.jitter_seed * 1000003u + failed_attempt);
    std::uniform_real_distribution<double> d(0.5, 1.5);
    return static_cast<std::int64_t>(std::llround(base * d(rng)));
}

Health health_check(const model::TaskStatus& task, TimestampMs now, const ExecutionPolicy& p,
                    TimestampMs dispatched_at) {
    const auto last = task.last_heartbeat.value_or(dispatched_at);
    return now - last > p.stall_threshold_ms() ? Health::Stalled : Health::Healthy;
}

// ---- supervisor ------------------------------------------------------------

struct Supervisor::StepRun {
    enum class Phase { pending, in_flight, awaiting_approval, retry_wait, succeeded, failed, skipped };

    const model::PlanStep* step = nullptr;
    Phase phase = Phase::pending;
    std::uint32_t attempts = 0;
    std::uint64_t run = 0;
    std::shared_ptr<const agents::RegisteredAgent> agent;
    std::string agent_id;
    TimestampMs first_dispatch = -1;
    TimestampMs started_at = 0;
    TimestampMs last_heartbeat = 0;
    TimestampMs retry_at = 0;
    bool acked = false;
    bool heard = false;
    std::string approval_digest;
    agents::TaskPayload payload;
    std::string payload_digest;
    std::optional<model::TaskResult> result;

    bool terminal() const { return phase == Phase::succeeded || phase == Phase::failed || phase == Phase::skipped; }
    bool holds_slot() const { return phase == Phase::in_flight || phase == Phase::awaiting_approval; }
};

class Supervisor::Run {
public:
    Run(Supervisor& sv, const model::ValidatedPlan& plan) : sv_(sv), plan_(plan), policy_(sv.options_.policy) {
        for (const auto& s : plan.plan().steps) {
            StepRun r;
            r.step = &s;
            steps_.emplace(s.id, std::move(r));
        }
    }

    WorkflowResult execute() {
        emit(model::EventKind::PlanProposed, model::payload::plan_proposed(plan_, policy_.retry_limit));
        sv_.record_handoff(model::Role::planner, model::Role::supervisor, digest_of(Json(plan_.plan())), true);

        pump();
        while (!all_terminal()) {
            auto occ = sv_.runtime_.wait_next();
            if (!occ) return abort_run("failed", "no progress possible", "Stuck");
            if (occ->kind == Occurrence::Kind::cancel) return abort_run("cancelled", occ->cause, "Cancelled");
            handle(*occ);
            pump();
        }
        return report_and_close();
    }

private:
    TimestampMs now() const { return sv_.runtime_.now(); }

    void emit(model::EventKind kind, Json payload) { sv_.sink_.emit(kind, std::move(payload), now()); }

    bool all_terminal() const {
        return std::all_of(steps_.begin(), steps_.end(), [](const auto& kv) { return kv.second.terminal(); });
    }

    std::size_t running_total() const {
        return static_cast<std::size_t>(
            std::count_if(steps_.begin(), steps_.end(), [](const auto& kv) { return kv.second.holds_slot(); }));
    }

    std::size_t running_for(const std::string& agent_id) const {
        return static_cast<std::size_t>(std::count_if(steps_.begin(), steps_.end(), [&](const auto& kv) {
            return kv.second.holds_slot() && kv.second.agent_id == agent_id;
        }));
    }

    StepRun* by_run(std::uint64_t run) {
        auto it = run_to_step_.find(run);
        if (it == run_to_step_.end()) return nullptr;
        auto& s = steps_.at(it->second);
        return s.run == run ? &s : nullptr;
    }

    bool deps_succeeded(const StepRun& s) const {
        return std::all_of(s.step->depends_on.begin(), s.step->depends_on.end(),
                           [&](const std::string& d) { return steps_.at(d).phase == StepRun::Phase::succeeded; });
    }

    Json results_json() const {
        Json arr = Json::array();
        for (const auto& s : plan_.plan().steps) {
            const auto& r = steps_.at(s.id);
            if (r.result) arr.push_back(*r.result);
        }
        return arr;
    }

    void pump() {
        std::vector<std::string> ready;
        for (const auto& s : plan_.plan().steps) {
            const auto& r = steps_.at(s.id);
            if ((r.phase == StepRun::Phase::pending && deps_succeeded(r)) ||
                (r.phase == StepRun::Phase::retry_wait && r.retry_at <= now())) {
                ready.push_back(s.id);
            }
        }
        if (sv_.options_.strategy) {
            sv_.options_.strategy(plan_, ready);
        } else {
            std::stable_sort(ready.begin(), ready.end(), [&](const std::string& a, const std::string& b) {
                const auto la = plan_.level_of(a), lb = plan_.level_of(b);
                return la != lb ? la < lb : plan_.index_of(a) < plan_.index_of(b);
            });
        }
        for (const auto& id : ready) {
            if (running_total() >= policy_.max_concurrency) break;
            dispatch(steps_.at(id));
        }
    }

    void dispatch(StepRun& s) {
        std::string agent_id;
        try {
            agent_id = agents::select_agent(*s.step, sv_.registry_);
        } catch (const Error& e) {
            if (e.code() != Errc::no_capable_agent) throw;
            fail_final(s, "NoCapableAgent", false);
            return;
        }
        if (running_for(agent_id) >= policy_.per_agent_concurrency) return;
        auto agent = sv_.registry_.find(agent_id);

        agents::TaskPayload p;
        p.conversation_id = sv_.options_.env.conversation_id;
        p.step_id = s.step->id;
        p.description = s.step->description;
        p.required_capability = s.step->required_capability;
        p.attempt = s.attempts + 1;
        p.lang = sv_.options_.lang;
        for (const auto& d : s.step->depends_on) {
            const auto& dr = steps_.at(d).result;
            if (dr && dr->succeeded()) {
                const auto& ok = std::get<model::StepSucceeded>(dr->outcome);
                p.inputs[d] = Json{{"summary", ok.summary}, {"data", ok.data}, {"artifacts", ok.artifacts}};
            }
        }
        p.context = Json{{"plan", plan_.plan()}, {"results", results_json()}};

        if (sv_.options_.hooks) {
            Json j = payload_json(p);
            if (auto abort = sv_.options_.hooks->run(agents::HookStage::pre_task, j)) {
                s.agent_id = agent_id;
                fail_final(s, "HookRejected: " + abort->reason, false);
                return;
            }
            p.description = j.value("description", p.description);
            if (j.contains("args")) p.args = j["args"];
            if (j.contains("inputs")) p.inputs = j["inputs"];
        }

        ++s.attempts;
        s.agent = agent;
        s.agent_id = agent_id;
        s.payload = p;
        s.payload_digest = digest_of(payload_json(p));
        s.acked = false;
        if (s.first_dispatch < 0) s.first_dispatch = now();
        emit(model::EventKind::TaskDispatched,
             model::payload::task_dispatched(s.step->id, agent_id, s.attempts, s.step->description));
        launch(s, true);
    }

    // Starts a run of the current attempt: a fresh dispatch, or the re-invoke
    // after an approval.
    void launch(StepRun& s, bool fresh) {
        s.phase = StepRun::Phase::in_flight;
        s.run = next_run_++;
        run_to_step_[s.run] = s.step->id;
        s.started_at = now();
        s.last_heartbeat = now();
        s.heard = false;
        const auto run = s.run;
        auto& rt = sv_.runtime_;
        if (fresh) rt.set_timer(now() + policy_.ack_timeout_ms, tag(run, ack_timer));
        rt.set_timer(now() + s.agent->manifest.grants.max_runtime_ms + 1, tag(run, runtime_timer));
        if (s.agent->manifest.heartbeat_capable) {
            rt.set_timer(now() + policy_.stall_threshold_ms() + 1, tag(run, stall_timer));
        }
        rt.start(run, s.agent, s.payload, sv_.options_.env);
    }

    void handle(const Occurrence& o) {
        using K = Occurrence::Kind;
        switch (o.kind) {
            case K::acked:
                if (auto* s = by_run(o.run); s && s->phase == StepRun::Phase::in_flight) accept_ack(*s);
                break;
            case K::heartbeat:
                if (auto* s = by_run(o.run); s && s->phase == StepRun::Phase::in_flight) {
                    emit(model::EventKind::Heartbeat, model::payload::heartbeat(s->step->id, s->attempts, o.note));
                    s->last_heartbeat = o.at;
                    s->heard = true;
                    if (s->agent->manifest.heartbeat_capable) {
                        sv_.runtime_.set_timer(o.at + policy_.stall_threshold_ms() + 1, tag(o.run, stall_timer));
                    }
                }
                break;
            case K::finished:
                if (auto* s = by_run(o.run); s && s->phase == StepRun::Phase::in_flight && o.outcome) {
                    finished(*s, *o.outcome);
                }
                break;
            case K::timer:
                on_timer(o.run / 4, static_cast<TimerKind>(o.run % 4));
                break;
            case K::approval:
                on_approval(o.digest, o.approved);
                break;
            case K::cancel:
                break;
        }
    }

    void accept_ack(StepRun& s) {
        if (s.acked) return;
        s.acked = true;
        sv_.record_handoff(model::Role::supervisor, model::Role::agent, s.payload_digest, true);
    }

    void finished(StepRun& s, const agents::AgentOutcome& outcome) {
        accept_ack(s);
        if (const auto* out = std::get_if<agents::AgentOutput>(&outcome)) {
            succeed(s, *out);
        } else if (const auto* f = std::get_if<agents::AgentFailure>(&outcome)) {
            attempt_failed(s, f->cause, f->retryable, true);
        } else {
            const auto& need = std::get<agents::ApprovalNeeded>(outcome);
            s.phase = StepRun::Phase::awaiting_approval;
            s.approval_digest = need.action_digest;
            {
                std::lock_guard lock(sv_.pending_mu_);
                sv_.pending_.insert(need.action_digest);
            }
            emit(model::EventKind::ApprovalRequested,
                 model::payload::approval_requested(s.step->id, need.action_digest, need.description));
            if (sv_.options_.approval_responder) {
                if (auto d = sv_.options_.approval_responder(s.step->id, need.action_digest)) {
                    {
                        std::lock_guard lock(sv_.pending_mu_);
                        sv_.pending_.erase(need.action_digest);
                    }
                    Occurrence o{Occurrence::Kind::approval, 0, now() + d->delay_ms};
                    o.digest = need.action_digest;
                    o.approved = d->approved;
                    sv_.runtime_.post(std::move(o));
                }
            }
        }
    }

    void on_timer(std::uint64_t run, TimerKind kind) {
        if (kind == retry_timer) return;  // pump() picks the step up
        auto* s = by_run(run);
        if (!s || s->phase != StepRun::Phase::in_flight) return;
        switch (kind) {
            case ack_timer:
                if (s->acked) return;
                sv_.record_handoff(model::Role::supervisor, model::Role::agent, s->payload_digest, false);
                sv_.runtime_.cancel(run);
                attempt_failed(*s, "AckTimeout", true, false);
                break;
            case runtime_timer:
                if (now() - s->started_at <= s->agent->manifest.grants.max_runtime_ms) return;
                sv_.runtime_.cancel(run);
                attempt_failed(*s, "Timeout", true, false);
                break;
            case stall_timer: {
                model::TaskStatus ts;
                if (s->heard) ts.last_heartbeat = s->last_heartbeat;
                if (health_check(ts, now(), policy_, s->started_at) == Health::Healthy) return;
                sv_.runtime_.cancel(run);
                attempt_failed(*s, "Stalled", true, false);
                break;
            }
            default:
                break;
        }
    }

    void on_approval(const std::string& digest, bool approved) {
        StepRun* s = nullptr;
        for (auto& [id, r] : steps_) {
            if (r.phase == StepRun::Phase::awaiting_approval && r.approval_digest == digest) s = &r;
        }
        if (!s) return;
        {
            std::lock_guard lock(sv_.pending_mu_);
            sv_.pending_.erase(digest);
        }
        if (approved && sv_.options_.env.approvals) {
            sv_.options_.env.approvals->issue(sv_.options_.env.conversation_id, digest, now());
        }
        emit(model::EventKind::ApprovalResolved, model::payload::approval_resolved(s->step->id, digest, approved));
        s->approval_digest.clear();
        if (approved) {
            launch(*s, false);
        } else {
            s->phase = StepRun::Phase::in_flight;
            attempt_failed(*s, "ApprovalDenied", false, true);
        }
    }

    void succeed(StepRun& s, const agents::AgentOutput& out) {
        model::TaskResult r;
        r.step_id = s.step->id;
        r.agent_id = s.agent_id;
        r.duration_ms = now() - s.first_dispatch;
        r.outcome = model::StepSucceeded{out.artifacts, out.summary, out.data};
        sv_.record_handoff(model::Role::agent, model::Role::supervisor, digest_of(Json(r)), true);
        s.phase = StepRun::Phase::succeeded;
        s.run = 0;
        s.result = r;
        emit(model::EventKind::TaskSucceeded,
             model::payload::task_succeeded(r.step_id, r.agent_id, s.attempts, out.summary, out.artifacts,
                                            r.duration_ms));
        notify_post_task(r);
    }

    // `returned`: the agent itself produced this outcome.
    void attempt_failed(StepRun& s, const std::string& cause, bool retryable, bool returned) {
        s.run = 0;
        if (retryable && s.attempts < policy_.retry_limit + 1) {
            const auto b = backoff_ms(policy_, s.attempts);
            s.phase = StepRun::Phase::retry_wait;
            s.retry_at = now() + b;
            emit(model::EventKind::TaskRetried, model::payload::task_retried(s.step->id, s.attempts, cause, b));
            sv_.runtime_.set_timer(s.retry_at, tag(next_run_++, retry_timer));
            return;
        }
        if (s.acked) {
            model::TaskResult r;
            r.step_id = s.step->id;
            r.agent_id = s.agent_id;
            r.outcome = model::StepFailed{cause, s.attempts};
            sv_.record_handoff(model::Role::agent, model::Role::supervisor, digest_of(Json(r)), returned);
        }
        fail_final(s, cause, true);
    }

    void fail_final(StepRun& s, const std::string& cause, bool dispatched) {
        model::TaskResult r;
        r.step_id = s.step->id;
        r.agent_id = s.agent_id;
        r.duration_ms = dispatched && s.first_dispatch >= 0 ? now() - s.first_dispatch : 0;
        r.outcome = model::StepFailed{cause, s.attempts};
        s.phase = StepRun::Phase::failed;
        s.run = 0;
        s.result = r;
        emit(model::EventKind::TaskFailed,
             model::payload::task_failed(r.step_id, r.agent_id, s.attempts, cause, r.duration_ms));
        for (const auto& d : plan_.descendants(s.step->id)) {
            auto& ds = steps_.at(d);
            if (ds.phase != StepRun::Phase::pending) continue;
            ds.phase = StepRun::Phase::skipped;
            model::TaskResult sr;
            sr.step_id = d;
            sr.outcome = model::StepSkipped{s.step->id};
            ds.result = sr;
        }
        notify_post_task(r);
    }

    void notify_post_task(const model::TaskResult& r) {
        if (!sv_.options_.hooks) return;
        Json j = r;
        sv_.options_.hooks->run(agents::HookStage::post_task, j);
    }

    std::vector<model::TaskResult> collect() const {
        std::vector<model::TaskResult> out;
        for (const auto& s : plan_.plan().steps) {
            const auto& r = steps_.at(s.id);
            if (r.result) {
                out.push_back(*r.result);
            } else {
                model::TaskResult f;
                f.step_id = s.id;
                f.agent_id = r.agent_id;
                f.outcome = model::StepFailed{"Cancelled", r.attempts};
                out.push_back(f);
            }
        }
        return out;
    }

    WorkflowResult abort_run(const std::string& reason, const std::string& cause, const std::string& task_cause) {
        for (auto& [id, s] : steps_) {
            if (s.run) sv_.runtime_.cancel(s.run);
            if (!s.terminal()) {
                model::TaskResult f;
                f.step_id = id;
                f.agent_id = s.agent_id;
                f.outcome = model::StepFailed{task_cause, s.attempts};
                s.result = f;
                s.phase = StepRun::Phase::failed;
            }
        }
        {
            std::lock_guard lock(sv_.pending_mu_);
            sv_.pending_.clear();
        }
        emit(model::EventKind::WorkflowClosed, model::payload::workflow_closed(reason, cause));
        WorkflowResult out;
        out.status = sv_.sink_.state().status;
        out.results = collect();
        out.report = nullptr;
        out.close_reason = reason;
        return out;
    }

    WorkflowResult report_and_close() {
        WorkflowResult out;
        out.results = collect();
        out.report = nullptr;

        std::shared_ptr<const agents::RegisteredAgent> reporter;
        for (const auto& a : sv_.registry_.agents()) {
            if (a->manifest.capabilities.count(agents::cap::report)) {
                reporter = a;
                break;
            }
        }
        if (!reporter) {
            reporter = std::make_shared<agents::RegisteredAgent>(
                agents::RegisteredAgent{builtin::reporter_manifest(), std::make_shared<builtin::ReporterAgent>()});
        }

        agents::TaskPayload p;
        p.conversation_id = sv_.options_.env.conversation_id;
        p.step_id = "report";
        p.description = "Compile the workflow report";
        p.required_capability = agents::cap::report;
        p.lang = sv_.options_.lang;
        Json results = Json::array();
        for (const auto& r : out.results) results.push_back(r);
        p.context = Json{{"plan", plan_.plan()}, {"results", results}};

        std::optional<agents::HookAbort> abort;
        if (sv_.options_.hooks) {
            abort = sv_.options_.hooks->run(agents::HookStage::pre_report, p.context);
        }
        std::optional<agents::AgentOutput> report;
        if (!abort) {
            const auto& env = sv_.options_.env;
            agents::DirectContext ctx(now(), env.artifacts, env.approvals, env.conversation_id, env.provider);
            auto outcome = agents::invoke(*reporter, p, ctx);
            if (auto* o = std::get_if<agents::AgentOutput>(&outcome)) report = *o;
        }
        sv_.record_handoff(model::Role::supervisor, model::Role::reporter, digest_of(p.context), report.has_value());
        if (report) {
            Json r = report->data;
            r["artifacts"] = report->artifacts;
            if (sv_.options_.hooks) {
                Json copy = r;
                sv_.options_.hooks->run(agents::HookStage::post_report, copy);
            }
            emit(model::EventKind::ReportReady, model::payload::report_ready(r));
            out.report = r;
        }
        emit(model::EventKind::WorkflowClosed, model::payload::workflow_closed("completed", ""));
        out.status = sv_.sink_.state().status;
        out.close_reason = "completed";
        return out;
    }

    Supervisor& sv_;
    const model::ValidatedPlan& plan_;
    ExecutionPolicy policy_;
    std::map<std::string, StepRun> steps_;
    std::map<std::uint64_t, std::string> run_to_step_;
    std::uint64_t next_run_ = 1;
};

Supervisor::Supervisor(model::EventSink& sink, agents::RegistryView registry, ExecutionRuntime& runtime,
                       SupervisorOptions options)
    : sink_(sink), registry_(std::move(registry)), runtime_(runtime), options_(std::move(options)) {
    validate_policy(options_.policy);
}

WorkflowResult Supervisor::run_workflow(const model::ValidatedPlan& plan) {
    {
        std::lock_guard lock(pending_mu_);
        running_ = true;
    }
    Run run(*this, plan);
    auto result = run.execute();
    std::lock_guard lock(pending_mu_);
    running_ = false;
    pending_.clear();
    return result;
}

ResolveStatus Supervisor::resolve_approval(const std::string& action_digest, bool approved) {
    {
        std::lock_guard lock(pending_mu_);
        if (pending_.empty()) return ResolveStatus::no_pending_approval;
        if (!pending_.erase(action_digest)) return ResolveStatus::digest_mismatch;
    }
    Occurrence o{Occurrence::Kind::approval, 0, runtime_.now()};
    o.digest = action_digest;
    o.approved = approved;
    runtime_.post(std::move(o));
    return ResolveStatus::resolved;
}

void Supervisor::cancel(const std::string& cause) {
    Occurrence o{Occurrence::Kind::cancel, 0, runtime_.now()};
    o.cause = cause;
    runtime_.post(std::move(o));
}

model::HandoffRecord Supervisor::record_handoff(model::Role from, model::Role to, const std::string& payload_digest,
                                                bool accepted) {
    model::HandoffRecord r;
    r.from_role = from;
    r.to_role = to;
    r.payload_digest = payload_digest;
    r.accepted = accepted;
    r.timestamp = runtime_.now();
    sink_.emit(model::EventKind::HandoffRecorded, model::payload::handoff_recorded(r), r.timestamp);
    return r;
}

}  // namespace autonoma::supervisor
