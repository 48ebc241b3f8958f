#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/approvals.hpp"
#include "autonoma/agents/hooks.hpp"
#include "autonoma/agents/registry.hpp"
#include "autonoma/common/clock.hpp"
#include "autonoma/model/event_log.hpp"
#include "autonoma/model/plan.hpp"
#include "autonoma/model/task_result.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace autonoma::supervisor {

struct ExecutionPolicy {
    std::uint32_t retry_limit = 2;
    std::int64_t backoff_initial_ms = 250;
    double backoff_multiplier = 2.0;
    bool backoff_jitter = false;
    std::uint64_t jitter_seed = 0;
    std::int64_t ack_timeout_ms = 2000;
    std::int64_t heartbeat_interval_ms = 5000;
    std::uint32_t missed_heartbeats_to_stall = 3;
    std::uint32_t max_concurrency = 4;
    std::uint32_t per_agent_concurrency = 1;

    std::int64_t stall_threshold_ms() const {
        return static_cast<std::int64_t>(missed_heartbeats_to_stall) * heartbeat_interval_ms;
    }
    bool operator==(const ExecutionPolicy&) const = default;
};

// Throws ConfigError on negative values or max_concurrency 0.
void validate_policy(const ExecutionPolicy& p);
Json policy_to_json(const ExecutionPolicy& p);
// Missing fields keep the values already in `base`.
ExecutionPolicy policy_from_json(const Json& j, ExecutionPolicy base = {});

// Delay before the attempt after `failed_attempt` (1-based). Deterministic
// unless jitter is enabled.
std::int64_t backoff_ms(const ExecutionPolicy& p, std::uint32_t failed_attempt);

enum class Health { Healthy, Stalled };

// Stalled iff now - last_heartbeat > missed x interval. A task that has not
// sent a heartbeat yet is measured from `dispatched_at`.
Health health_check(const model::TaskStatus& task, TimestampMs now, const ExecutionPolicy& p,
                    TimestampMs dispatched_at = 0);

// Something that happened to an attempt, or an input from outside.
struct Occurrence {
    enum class Kind { acked, heartbeat, finished, timer, approval, cancel };
    Kind kind = Kind::timer;
    std::uint64_t run = 0;  // attempt run id, or timer tag
    TimestampMs at = 0;
    std::string note;
    std::optional<agents::AgentOutcome> outcome;
    std::string digest;
    bool approved = false;
    std::string cause;
};

// Services handed to every attempt of one workflow.
struct AttemptEnv {
    std::string conversation_id;
    agents::ArtifactSink* artifacts = nullptr;
    agents::ApprovalAuthority* approvals = nullptr;
    provider::Router* provider = nullptr;
};

// Executes attempts and delivers what happens to them in time order.
class ExecutionRuntime {
public:
    virtual ~ExecutionRuntime() = default;
    virtual TimestampMs now() const = 0;
    virtual void start(std::uint64_t run, std::shared_ptr<const agents::RegisteredAgent> agent,
                       agents::TaskPayload payload, const AttemptEnv& env) = 0;
    virtual void cancel(std::uint64_t run) = 0;
    virtual void set_timer(TimestampMs at, std::uint64_t tag) = 0;
    // Thread-safe. Delivered at the current time.
    virtual void post(Occurrence o) = 0;
    // Blocks for the next occurrence. nullopt means nothing can happen any more.
    virtual std::optional<Occurrence> wait_next() = 0;
};

// Logical clock. Attempts run to completion inside start(), with sleep_for
// advancing a private clock; their acknowledgement, heartbeats and result
// are then queued at the logical times they happened. Ties keep insertion
// order, so runs are reproducible.
class SimRuntime final : public ExecutionRuntime {
public:
    explicit SimRuntime(TimestampMs start = 0) : now_(start) {}

    TimestampMs now() const override { return now_; }
    void start(std::uint64_t run, std::shared_ptr<const agents::RegisteredAgent> agent, agents::TaskPayload payload,
               const AttemptEnv& env) override;
    void cancel(std::uint64_t run) override;
    void set_timer(TimestampMs at, std::uint64_t tag) override;
    void post(Occurrence o) override;
    std::optional<Occurrence> wait_next() override;

private:
    struct Entry {
        TimestampMs at;
        std::uint64_t seq;
        Occurrence occ;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };
    void push(Occurrence o);

    std::mutex mu_;
    TimestampMs now_;
    std::uint64_t seq_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::set<std::uint64_t> cancelled_;
};

// Wall clock. Each attempt runs on its own thread; cancelled attempts that
// do not stop within `grace_ms` are abandoned.
class ThreadRuntime final : public ExecutionRuntime {
public:
    explicit ThreadRuntime(std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
                           std::int64_t grace_ms = 5000);
    ~ThreadRuntime() override;

    TimestampMs now() const override { return clock_->now_ms(); }
    void start(std::uint64_t run, std::shared_ptr<const agents::RegisteredAgent> agent, agents::TaskPayload payload,
               const AttemptEnv& env) override;
    void cancel(std::uint64_t run) override;
    void set_timer(TimestampMs at, std::uint64_t tag) override;
    void post(Occurrence o) override;
    std::optional<Occurrence> wait_next() override;

    struct Shared;

private:
    std::shared_ptr<Clock> clock_;
    std::int64_t grace_ms_;
    std::shared_ptr<Shared> shared_;
    struct Worker {
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };
    std::vector<Worker> workers_;
};

// Decides an approval request in unattended runs: nullopt leaves it to an
// outside caller of Supervisor::resolve_approval.
struct ApprovalDecision {
    bool approved = false;
    std::int64_t delay_ms = 0;
};
using ApprovalResponder =
    std::function<std::optional<ApprovalDecision>(const std::string& step_id, const std::string& digest)>;

// Orders the ready steps. The default is FIFO: level, then declaration.
using SchedulingStrategy =
    std::function<void(const model::ValidatedPlan& plan, std::vector<std::string>& ready)>;

struct SupervisorOptions {
    ExecutionPolicy policy;
    AttemptEnv env;
    model::Lang lang = model::Lang::en;
    const agents::HookPipeline* hooks = nullptr;
    ApprovalResponder approval_responder;
    SchedulingStrategy strategy;
};

struct WorkflowResult {
    model::WorkflowStatus status = model::WorkflowStatus::Failed;
    std::vector<model::TaskResult> results;  // plan order
    Json report;                             // null when none was produced
    std::string close_reason;
};

enum class ResolveStatus { resolved, no_pending_approval, digest_mismatch };

// Drives one workflow from an accepted plan to WorkflowClosed. The single
// writer of that workflow's events.
class Supervisor {
public:
    Supervisor(model::EventSink& sink, agents::RegistryView registry, ExecutionRuntime& runtime,
               SupervisorOptions options);

    // Emits PlanProposed and everything after it. Failures are recorded
    // outcomes, never exceptions.
    WorkflowResult run_workflow(const model::ValidatedPlan& plan);

    // Thread-safe inputs while run_workflow is running.
    ResolveStatus resolve_approval(const std::string& action_digest, bool approved);
    void cancel(const std::string& cause = "cancelled by user");

    model::HandoffRecord record_handoff(model::Role from, model::Role to, const std::string& payload_digest,
                                        bool accepted);

private:
    struct StepRun;
    class Run;

    model::EventSink& sink_;
    agents::RegistryView registry_;
    ExecutionRuntime& runtime_;
    SupervisorOptions options_;

    std::mutex pending_mu_;
    std::set<std::string> pending_;
    bool running_ = false;
};

}  // namespace autonoma::supervisor
