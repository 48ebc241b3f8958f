#pragma once

#include "autonoma/agents/approvals.hpp"
#include "autonoma/agents/hooks.hpp"
#include "autonoma/agents/registry.hpp"
#include "autonoma/builtin/researcher.hpp"
#include "autonoma/common/clock.hpp"
#include "autonoma/coordinator/coordinator.hpp"
#include "autonoma/model/event_log.hpp"
#include "autonoma/planner/planner.hpp"
#include "autonoma/provider/provider.hpp"
#include "autonoma/store/audit.hpp"
#include "autonoma/store/store.hpp"
#include "autonoma/supervisor/supervisor.hpp"

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace autonoma::engine {

struct EngineConfig {
    supervisor::ExecutionPolicy policy;
    coordinator::CoordinatorOptions coordinator;
    planner::PlannerOptions planner;
    // Logical-clock execution: attempts run on a SimRuntime and the engine
    // clock follows logical time. Meant for tests and the benchmark.
    bool simulated = false;
    // Workflows run on a background thread per conversation. When false
    // submit() returns after the workflow closed.
    bool asynchronous = true;
    std::int64_t handoff_ack_timeout_ms = 2000;
    std::uint32_t handoff_attempts = 3;
    std::size_t history_limit = 20;
    // Pre-gathering through search tools before planning; 0 disables it.
    std::size_t pregather_budget = 0;
    std::vector<std::shared_ptr<builtin::SearchTool>> pregather_tools;
    // The planner's acknowledgement of a handoff; the default always acks.
    coordinator::PlannerAck planner_ack;
};

struct SubmitRequest {
    std::optional<std::string> conversation_id;
    std::string text;
    std::vector<std::string> attachments;
    std::optional<supervisor::ExecutionPolicy> policy;  // per-request override
};

struct SubmitResult {
    std::string conversation_id;
    bool accepted = false;
    std::uint64_t seq = 0;  // seq of the PromptReceived event
};

// One conversation's live state: its event log, transcript and the
// supervisor of the running workflow, if any.
class Session {
public:
    Session(std::string id, std::string title, TimestampMs created_at, std::vector<model::Message> messages,
            std::vector<model::WorkflowEvent> events);

    const std::string& id() const { return id_; }
    model::EventLog& log() { return log_; }
    std::vector<model::Message> messages() const;
    store::Conversation snapshot() const;
    bool busy() const;

private:
    friend class Engine;

    std::string id_;
    std::string title_;
    TimestampMs created_at_;
    mutable std::mutex mu_;
    std::condition_variable idle_cv_;
    std::vector<model::Message> messages_;
    model::EventLog log_;
    bool busy_ = false;
    supervisor::Supervisor* supervisor_ = nullptr;
    bool cancel_requested_ = false;
    std::thread worker_;
};

using IdGenerator = std::function<std::string()>;

// Lowercase UUID-shaped ids from a counter; deterministic runs use this.
IdGenerator sequential_ids(std::uint64_t seed);

class Engine {
public:
    Engine(agents::Registry& registry, provider::Router& router, coordinator::RuleSet rules, EngineConfig config,
           std::shared_ptr<store::ConversationStore> store = nullptr, std::shared_ptr<store::AuditLog> audit = nullptr,
           std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(), IdGenerator ids = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Appends PromptReceived and starts the pipeline. Throws NotFound for an
    // unknown conversation and Busy while a workflow is active.
    SubmitResult submit(const SubmitRequest& req);

    std::shared_ptr<Session> session(const std::string& id);
    std::vector<store::ConversationRecord> list();

    supervisor::ResolveStatus resolve_approval(const std::string& conversation_id, const std::string& digest,
                                               bool approved);
    // True when a running workflow was asked to stop.
    bool cancel(const std::string& conversation_id, const std::string& cause = "cancelled by user");

    // Blocks until the conversation has no active workflow.
    void wait_idle(const std::string& conversation_id);
    void shutdown();

    agents::HookPipeline& hooks() { return hooks_; }
    agents::ApprovalAuthority& approvals() { return approvals_; }
    coordinator::Coordinator& coordinator() { return coordinator_; }
    const EngineConfig& config() const { return config_; }

private:
    std::shared_ptr<Session> open_session(const std::optional<std::string>& id, const std::string& text);
    void attach(const std::shared_ptr<Session>& s);
    void pipeline(const std::shared_ptr<Session>& s, model::Message prompt, supervisor::ExecutionPolicy policy);
    void run_planned(const std::shared_ptr<Session>& s, const model::Message& prompt,
                     const std::vector<model::Message>& history, const supervisor::ExecutionPolicy& policy);
    void persist(Session& s);
    void audit_event(const std::string& conversation_id, const model::WorkflowEvent& e);
    void close_failed(Session& s, const std::string& cause, const std::string& text, model::Lang lang);
    void add_message(Session& s, model::Message m);
    TimestampMs now() const { return clock_->now_ms(); }

    agents::Registry& registry_;
    provider::Router& router_;
    EngineConfig config_;
    std::shared_ptr<store::ConversationStore> store_;
    std::shared_ptr<store::AuditLog> audit_;
    std::shared_ptr<Clock> clock_;
    IdGenerator ids_;
    coordinator::Coordinator coordinator_;
    agents::HookPipeline hooks_;
    agents::ApprovalAuthority approvals_;

    std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    bool shutting_down_ = false;
};

}  // namespace autonoma::engine
