#include "autonoma/engine/engine.hpp"

#include "autonoma/builtin/reporter.hpp"
#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"
#include "autonoma/model/events.hpp"
#include "autonoma/model/serialization.hpp"
#include "autonoma/model/state_machine.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <iostream>

namespace autonoma::engine {

namespace {

class StoreArtifactSink final : public agents::ArtifactSink {
public:
    StoreArtifactSink(store::ConversationStore& store, std::string id) : store_(store), id_(std::move(id)) {}

    std::string write_artifact(const std::string& name, std::string_view bytes) override {
        return store_.write_artifact(id_, name, bytes);
    }
    std::string write_screenshot(const std::string& name, std::string_view bytes) override {
        return store_.write_screenshot(id_, name, bytes);
    }
    void append_line(const std::string& name, std::string_view line) override {
        store_.append_artifact_line(id_, name, line);
    }

private:
    store::ConversationStore& store_;
    std::string id_;
};

std::string actor_of(const model::WorkflowEvent& e) {
    using K = model::EventKind;
    switch (e.kind) {
        case K::PromptReceived:
        case K::ApprovalResolved:
            return "user";
        case K::IntentClassified:
        case K::HandoffToPlanner:
            return "coordinator";
        case K::PlanProposed:
            return "planner";
        case K::TaskSucceeded:
        case K::TaskFailed:
        case K::Heartbeat:
            return e.payload.value("agent_id", std::string("agent"));
        case K::ReportReady:
            return "reporter";
        default:
            return "supervisor";
    }
}

model::Lang reply_lang(model::Lang l) { return l == model::Lang::und ? model::Lang::en : l; }

}  // namespace

IdGenerator sequential_ids(std::uint64_t seed) {
    auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
    return [seed, counter] {
        const auto n = ++*counter;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%08" PRIx32 "-0000-4000-8000-%012" PRIx64,
                      static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint64_t>(n & 0xffffffffffffULL));
        return std::string(buf);
    };
}

// ---- Session ---------------------------------------------------------------

Session::Session(std::string id, std::string title, TimestampMs created_at, std::vector<model::Message> messages,
                 std::vector<model::WorkflowEvent> events)
    : id_(std::move(id)),
      title_(std::move(title)),
      created_at_(created_at),
      messages_(std::move(messages)),
      log_(std::move(events)) {}

std::vector<model::Message> Session::messages() const {
    std::lock_guard lock(mu_);
    return messages_;
}

store::Conversation Session::snapshot() const {
    store::Conversation c;
    {
        std::lock_guard lock(mu_);
        c.messages = messages_;
        c.record.id = id_;
        c.record.title = title_;
        c.record.created_at = created_at_;
    }
    c.events = log_.events();
    c.record.state = model::replay(c.events);
    return c;
}

bool Session::busy() const {
    std::lock_guard lock(mu_);
    return busy_;
}

// ---- Engine ----------------------------------------------------------------

Engine::Engine(agents::Registry& registry, provider::Router& router, coordinator::RuleSet rules, EngineConfig config,
               std::shared_ptr<store::ConversationStore> store, std::shared_ptr<store::AuditLog> audit,
               std::shared_ptr<Clock> clock, IdGenerator ids)
    : registry_(registry),
      router_(router),
      config_(std::move(config)),
      store_(std::move(store)),
      audit_(std::move(audit)),
      clock_(std::move(clock)),
      ids_(ids ? std::move(ids) : IdGenerator(random_uuid)),
      coordinator_(std::move(rules), router.has(provider::RoleContext::coordinator) ? &router : nullptr,
                   config_.coordinator) {
    supervisor::validate_policy(config_.policy);
    if (!config_.planner_ack) config_.planner_ack = [](const coordinator::HandoffContext&, std::int64_t) { return true; };
}

Engine::~Engine() { shutdown(); }

void Engine::shutdown() {
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mu_);
        shutting_down_ = true;
        for (auto& [id, s] : sessions_) all.push_back(s);
    }
    for (auto& s : all) {
        {
            std::lock_guard lock(s->mu_);
            s->cancel_requested_ = true;
            if (s->supervisor_) s->supervisor_->cancel("service shutting down");
        }
        if (s->worker_.joinable()) s->worker_.join();
    }
}

std::shared_ptr<Session> Engine::open_session(const std::optional<std::string>& id, const std::string& text) {
    std::lock_guard lock(mu_);
    if (shutting_down_) throw Error(Errc::busy, "service shutting down");
    if (id) {
        if (auto it = sessions_.find(*id); it != sessions_.end()) return it->second;
        if (!store_ || !is_lowercase_uuid(*id) || !store_->exists(*id)) {
            throw Error(Errc::not_found, "unknown conversation " + *id);
        }
        auto c = store_->load_conversation(*id);
        auto s = std::make_shared<Session>(c.record.id, c.record.title, c.record.created_at, std::move(c.messages),
                                           std::move(c.events));
        sessions_.emplace(*id, s);
        attach(s);
        // A workflow interrupted by a restart cannot resume; close it.
        const auto st = s->log_.state();
        if (model::is_active(st.status)) {
            s->log_.emit(model::EventKind::WorkflowClosed,
                         model::payload::workflow_closed("failed", "interrupted by restart"), now());
        }
        return s;
    }
    const auto new_id = ids_();
    auto s = std::make_shared<Session>(new_id, utf8::truncate(text, 80), now(), std::vector<model::Message>{},
                                       std::vector<model::WorkflowEvent>{});
    sessions_.emplace(new_id, s);
    attach(s);
    return s;
}

void Engine::attach(const std::shared_ptr<Session>& s) {
    std::weak_ptr<Session> weak = s;
    const auto id = s->id_;
    s->log_.subscribe([this, weak, id](const model::WorkflowEvent& e, const model::WorkflowState&) {
        if (auto sp = weak.lock()) persist(*sp);
        audit_event(id, e);
    });
}

void Engine::persist(Session& s) {
    if (!store_) return;
    try {
        store_->persist_conversation(s.snapshot());
    } catch (const std::exception& e) {
        std::cerr << "autonoma: persisting conversation " << s.id_ << " failed: " << e.what() << "\n";
    }
}

void Engine::audit_event(const std::string& conversation_id, const model::WorkflowEvent& e) {
    if (!audit_) return;
    store::AuditEntry a;
    a.timestamp = e.timestamp;
    a.actor = actor_of(e);
    a.action = std::string(model::to_string(e.kind)) + " " + conversation_id + "#" + std::to_string(e.seq);
    a.input_digest = sha256_hex(canonical_dump(e.payload));
    if (e.kind == model::EventKind::TaskSucceeded || e.kind == model::EventKind::ReportReady) {
        const auto& p = e.kind == model::EventKind::ReportReady ? e.payload["report"] : e.payload;
        a.output_digest = sha256_hex(canonical_dump(p.value("artifacts", Json::array())));
    }
    try {
        audit_->append(a);
    } catch (const std::exception& ex) {
        std::cerr << "autonoma: audit append failed: " << ex.what() << "\n";
    }
}

void Engine::add_message(Session& s, model::Message m) {
    std::lock_guard lock(s.mu_);
    s.messages_.push_back(std::move(m));
}

SubmitResult Engine::submit(const SubmitRequest& req) {
    auto s = open_session(req.conversation_id, req.text);
    model::Message prompt;
    {
        std::unique_lock lock(s->mu_);
        const auto st = s->log_.state();
        if (s->busy_ || model::is_active(st.status)) {
            throw Error(Errc::busy, "conversation " + s->id_ + " has an active workflow");
        }
        if (s->worker_.joinable()) s->worker_.join();
        s->busy_ = true;
        s->cancel_requested_ = false;
        prompt.id = ids_();
        prompt.role = model::Role::user;
        prompt.content = req.text;
        prompt.lang = coordinator::detect_language(req.text);
        prompt.attachments = req.attachments;
        prompt.timestamp = now();
        s->messages_.push_back(prompt);
    }
    SubmitResult out;
    out.conversation_id = s->id_;
    try {
        out.seq = s->log_.emit(model::EventKind::PromptReceived, model::payload::prompt_received(prompt), now()).seq;
    } catch (...) {
        std::lock_guard lock(s->mu_);
        s->busy_ = false;
        s->messages_.pop_back();
        throw;
    }
    out.accepted = true;
    const auto policy = req.policy.value_or(config_.policy);
    if (config_.asynchronous) {
        std::lock_guard lock(s->mu_);
        s->worker_ = std::thread([this, s, prompt, policy] { pipeline(s, prompt, policy); });
    } else {
        pipeline(s, prompt, policy);
    }
    return out;
}

void Engine::close_failed(Session& s, const std::string& cause, const std::string& text, model::Lang lang) {
    if (!text.empty()) {
        model::Message m;
        m.id = ids_();
        m.role = model::Role::planner;
        m.content = text;
        m.lang = lang;
        m.timestamp = now();
        add_message(s, std::move(m));
    }
    const auto st = s.log_.state();
    if (model::is_active(st.status) || st.status == model::WorkflowStatus::AwaitingClarification) {
        s.log_.emit(model::EventKind::WorkflowClosed, model::payload::workflow_closed("failed", cause), now());
    } else {
        persist(s);
    }
}

void Engine::pipeline(const std::shared_ptr<Session>& sp, model::Message prompt, supervisor::ExecutionPolicy policy) {
    auto& s = *sp;
    const auto lang = prompt.lang;
    try {
        auto history = s.messages();
        history.pop_back();  // the prompt itself
        if (history.size() > config_.history_limit) {
            history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(config_.history_limit));
        }

        // Coordinator.
        const auto prior = s.log_.state().clarifications;
        const auto intent = coordinator_.classify(prompt, history, prior);
        auto reply = coordinator_.reply_for(intent, prompt, now());
        if (reply) add_message(s, *reply);
        s.log_.emit(model::EventKind::IntentClassified,
                    model::payload::intent_classified(intent.cls, intent.confidence, intent.cues, lang, reply), now());

        if (intent.cls == model::IntentClass::Task) {
            // Handoff to the planner, retried on AckTimeout.
            coordinator::HandoffContext hctx{s.id_, history};
            hctx.context.push_back(prompt);
            bool accepted = false;
            for (std::uint32_t i = 0; i < std::max<std::uint32_t>(1, config_.handoff_attempts) && !accepted; ++i) {
                const auto rec = coordinator::handoff_to_planner(hctx, config_.planner_ack,
                                                                 config_.handoff_ack_timeout_ms, now());
                s.log_.emit(model::EventKind::HandoffToPlanner, model::payload::handoff_to_planner(rec), now());
                accepted = rec.accepted;
            }
            if (!accepted) {
                close_failed(s, "AckTimeout", "The planner did not acknowledge the request.", reply_lang(lang));
            } else {
                run_planned(sp, prompt, history, policy);
            }
        }
    } catch (const std::exception& e) {
        try {
            close_failed(s, std::string("InternalError: ") + e.what(), "", reply_lang(lang));
        } catch (const std::exception& inner) {
            std::cerr << "autonoma: closing conversation " << s.id_ << " failed: " << inner.what() << "\n";
        }
    }
    persist(s);
    {
        std::lock_guard lock(s.mu_);
        s.busy_ = false;
        s.supervisor_ = nullptr;
    }
    s.idle_cv_.notify_all();
}

void Engine::run_planned(const std::shared_ptr<Session>& sp, const model::Message& prompt,
                         const std::vector<model::Message>& history, const supervisor::ExecutionPolicy& policy) {
    auto& s = *sp;
    const auto lang = reply_lang(prompt.lang);

    planner::PlanRequest req;
    req.request_text = prompt.content;
    req.context = history;
    const auto view = registry_.view();
    req.capability_vocabulary = view.capabilities();

    Json pre{{"request_text", req.request_text}};
    if (auto abort = hooks_.run(agents::HookStage::pre_plan, pre)) {
        close_failed(s, "HookRejected: " + abort->reason, "Planning was stopped by a hook: " + abort->reason, lang);
        return;
    }
    req.request_text = pre.value("request_text", req.request_text);
    if (config_.pregather_budget > 0 && !config_.pregather_tools.empty()) {
        agents::PrivilegeGrants grants;
        grants.allow_network = true;
        grants.network_allowlist = {"*"};
        req.pregathered = planner::pregather(req.request_text, config_.pregather_tools, config_.pregather_budget,
                                             grants, now());
    }

    std::optional<model::ValidatedPlan> plan;
    try {
        plan = planner::make_plan(req, router_, config_.planner);
        Json pj = plan->plan();
        if (auto abort = hooks_.run(agents::HookStage::post_plan, pj)) {
            close_failed(s, "HookRejected: " + abort->reason, "The plan was rejected by a hook: " + abort->reason,
                         lang);
            return;
        }
        auto rewritten = pj.get<model::Plan>();
        if (rewritten != plan->plan()) plan = model::validate_plan(rewritten, req.capability_vocabulary);
    } catch (const Error& e) {
        std::string cause(to_string(e.code()));
        if (!e.path().empty()) cause += " at " + e.path();
        close_failed(s, cause, "I could not build a plan: " + std::string(e.what()), lang);
        return;
    }

    std::unique_ptr<supervisor::ExecutionRuntime> runtime;
    if (config_.simulated) {
        runtime = std::make_unique<supervisor::SimRuntime>(now());
    } else {
        runtime = std::make_unique<supervisor::ThreadRuntime>(clock_, policy.heartbeat_interval_ms);
    }
    std::unique_ptr<agents::ArtifactSink> sink;
    if (store_) {
        sink = std::make_unique<StoreArtifactSink>(*store_, s.id_);
    } else {
        sink = std::make_unique<agents::MemoryArtifactSink>();
    }
    supervisor::SupervisorOptions opts;
    opts.policy = policy;
    opts.env.conversation_id = s.id_;
    opts.env.artifacts = sink.get();
    opts.env.approvals = &approvals_;
    opts.env.provider = &router_;
    opts.lang = lang;
    opts.hooks = &hooks_;

    supervisor::Supervisor sv(s.log_, view, *runtime, opts);
    {
        std::lock_guard lock(s.mu_);
        s.supervisor_ = &sv;
        if (s.cancel_requested_) sv.cancel();
    }
    const auto result = sv.run_workflow(*plan);
    {
        std::lock_guard lock(s.mu_);
        s.supervisor_ = nullptr;
    }
    if (config_.simulated) {
        if (auto* manual = dynamic_cast<ManualClock*>(clock_.get())) manual->set(runtime->now());
    }

    model::Message m;
    m.id = ids_();
    m.role = model::Role::reporter;
    m.lang = lang;
    m.timestamp = now();
    if (result.report.is_object() && result.report.contains("executive_summary")) {
        try {
            m.content = builtin::render_markdown(builtin::report_from_json(result.report));
        } catch (const std::exception&) {
            m.content = result.report.value("executive_summary", std::string{});
        }
        for (const auto& a : result.report.value("artifacts", Json::array())) m.attachments.push_back(a);
    } else {
        m.content = result.close_reason == "cancelled" ? "The workflow was cancelled." : "The workflow finished.";
    }
    add_message(s, std::move(m));
}

std::shared_ptr<Session> Engine::session(const std::string& id) {
    {
        std::lock_guard lock(mu_);
        if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    }
    if (!store_ || !is_lowercase_uuid(id) || !store_->exists(id)) return nullptr;
    try {
        return open_session(id, {});
    } catch (const Error&) {
        return nullptr;
    }
}

std::vector<store::ConversationRecord> Engine::list() {
    std::map<std::string, store::ConversationRecord> out;
    if (store_) {
        for (auto& r : store_->list_conversations()) out[r.id] = r;
    }
    std::vector<std::shared_ptr<Session>> live;
    {
        std::lock_guard lock(mu_);
        for (auto& [id, s] : sessions_) live.push_back(s);
    }
    for (auto& s : live) out[s->id_] = s->snapshot().record;
    std::vector<store::ConversationRecord> v;
    for (auto& [id, r] : out) v.push_back(std::move(r));
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    return v;
}

supervisor::ResolveStatus Engine::resolve_approval(const std::string& conversation_id, const std::string& digest,
                                                   bool approved) {
    auto s = session(conversation_id);
    if (!s) throw Error(Errc::not_found, "unknown conversation " + conversation_id);
    std::lock_guard lock(s->mu_);
    if (!s->supervisor_) return supervisor::ResolveStatus::no_pending_approval;
    return s->supervisor_->resolve_approval(digest, approved);
}

bool Engine::cancel(const std::string& conversation_id, const std::string& cause) {
    auto s = session(conversation_id);
    if (!s) throw Error(Errc::not_found, "unknown conversation " + conversation_id);
    std::lock_guard lock(s->mu_);
    if (!s->busy_) return false;
    s->cancel_requested_ = true;
    if (s->supervisor_) s->supervisor_->cancel(cause);
    return true;
}

void Engine::wait_idle(const std::string& conversation_id) {
    auto s = session(conversation_id);
    if (!s) return;
    std::unique_lock lock(s->mu_);
    s->idle_cv_.wait(lock, [&] { return !s->busy_; });
}

}  // namespace autonoma::engine
