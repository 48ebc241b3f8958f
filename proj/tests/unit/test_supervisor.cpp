#include "autonoma/common/error.hpp"
#include "autonoma/model/serialization.hpp"
#include "autonoma/model/state_machine.hpp"
#include "autonoma/supervisor/supervisor.hpp"
#include "support/dag_oracle.hpp"
#include "support/generators.hpp"
#include "support/workflow_fixtures.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

namespace ag = autonoma::agents;
namespace m = autonoma::model;
namespace sv = autonoma::supervisor;
using autonoma::Errc;
using autonoma::Error;
using autonoma::Json;
using namespace testing_support;

namespace {

m::PlanStep step(const std::string& id, std::vector<std::string> deps = {}, const std::string& cap = "web_search") {
    return m::PlanStep{id, "step " + id, cap, std::nullopt, std::move(deps)};
}

m::ValidatedPlan plan_of(std::vector<m::PlanStep> steps, std::set<std::string> caps = {"web_search"}) {
    return m::validate_plan(m::Plan{"thought", std::move(steps), "test"}, caps);
}

struct Harness {
    ag::Registry registry;
    m::EventLog log;
    sv::SimRuntime runtime;
    ag::MemoryArtifactSink sink;
    ag::ApprovalAuthority approvals;
    sv::SupervisorOptions options;

    Harness() {
        prime_log(log);
        options.env.conversation_id = "c1";
        options.env.artifacts = &sink;
        options.env.approvals = &approvals;
    }

    void add(const std::string& id, AgentFn fn, const std::string& cap = "web_search", bool hb = false,
             std::int64_t max_runtime = 30000, bool self_ack = false) {
        registry.register_agent(synthetic_manifest(id, cap, hb, max_runtime),
                                std::make_shared<FnAgent>(std::move(fn), self_ack));
    }

    sv::WorkflowResult run(const m::ValidatedPlan& plan) {
        sv::Supervisor s(log, registry.view(), runtime, options);
        return s.run_workflow(plan);
    }

    std::vector<m::WorkflowEvent> of(m::EventKind k) const {
        std::vector<m::WorkflowEvent> out;
        for (const auto& e : log.events()) {
            if (e.kind == k) out.push_back(e);
        }
        return out;
    }
};

// Agent that follows a per-step script of outcomes, one entry per attempt.
AgentFn scripted(std::map<std::string, std::vector<bool>> script) {
    auto calls = std::make_shared<std::map<std::string, std::size_t>>();
    return [script, calls](const ag::TaskPayload& p, ag::TaskContext&) -> ag::AgentOutcome {
        const auto n = (*calls)[p.step_id]++;
        auto it = script.find(p.step_id);
        if (it == script.end() || n >= it->second.size() || it->second[n]) return ok("ok " + p.step_id);
        return fail("UpstreamDown");
    };
}

std::size_t handoff_count(const std::vector<m::WorkflowEvent>& events, bool accepted_only = false) {
    std::size_t n = 0;
    for (const auto& e : events) {
        if (e.kind == m::EventKind::HandoffToPlanner || e.kind == m::EventKind::HandoffRecorded) {
            if (!accepted_only || e.payload["record"]["accepted"].get<bool>()) ++n;
        }
    }
    return n;
}

}  // namespace

TEST(ExecutionPolicyTest, DefaultsAndThreshold) {
    sv::ExecutionPolicy p;
    EXPECT_EQ(p.retry_limit, 2u);
    EXPECT_EQ(p.backoff_initial_ms, 250);
    EXPECT_EQ(p.ack_timeout_ms, 2000);
    EXPECT_EQ(p.heartbeat_interval_ms, 5000);
    EXPECT_EQ(p.missed_heartbeats_to_stall, 3u);
    EXPECT_EQ(p.max_concurrency, 4u);
    EXPECT_EQ(p.per_agent_concurrency, 1u);
    EXPECT_EQ(p.stall_threshold_ms(), 15000);
}

TEST(ExecutionPolicyTest, BackoffIsExponentialWithoutJitter) {
    sv::ExecutionPolicy p;
    EXPECT_EQ(sv::backoff_ms(p, 1), 250);
    EXPECT_EQ(sv::backoff_ms(p, 2), 500);
    EXPECT_EQ(sv::backoff_ms(p, 3), 1000);
    p.backoff_jitter = true;
    p.jitter_seed = 9;
    const auto a = sv::backoff_ms(p, 2);
    EXPECT_EQ(a, sv::backoff_ms(p, 2));
    EXPECT_GE(a, 250);
    EXPECT_LE(a, 750);
}

TEST(ExecutionPolicyTest, JsonRoundTripAndValidation) {
    sv::ExecutionPolicy p;
    p.retry_limit = 5;
    p.max_concurrency = 7;
    EXPECT_EQ(sv::policy_from_json(sv::policy_to_json(p)), p);
    EXPECT_EQ(sv::policy_from_json(Json{{"retry_limit", 0}}).retry_limit, 0u);
    for (const auto& bad : {Json{{"max_concurrency", 0}}, Json{{"retry_limit", -1}}, Json{{"ack_timeout_ms", -5}},
                            Json{{"bogus", 1}}, Json{{"retry_limit", "two"}}, Json::array()}) {
        try {
            sv::policy_from_json(bad);
            FAIL() << bad.dump();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::config_error) << bad.dump();
        }
    }
}

TEST(HealthCheckTest, Boundaries) {
    sv::ExecutionPolicy p;
    m::TaskStatus t;
    t.phase = m::TaskPhase::Running;
    t.last_heartbeat = 100000;
    EXPECT_EQ(sv::health_check(t, 101000, p), sv::Health::Healthy);
    EXPECT_EQ(sv::health_check(t, 116000, p), sv::Health::Stalled);
    EXPECT_EQ(sv::health_check(t, 115000, p), sv::Health::Healthy);
    EXPECT_EQ(sv::health_check(t, 115001, p), sv::Health::Stalled);
    m::TaskStatus fresh;
    EXPECT_EQ(sv::health_check(fresh, 5000, p, 0), sv::Health::Healthy);
    EXPECT_EQ(sv::health_check(fresh, 15001, p, 0), sv::Health::Stalled);
}

TEST(SupervisorTest, FailTwiceThenSucceedWithinRetryLimit) {
    Harness h;
    h.add("worker", scripted({{"a", {false, false, true}}}));
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    const auto done = h.of(m::EventKind::TaskSucceeded);
    ASSERT_EQ(done.size(), 1u);
    EXPECT_EQ(done[0].payload["attempts"], 3);
    const auto retried = h.of(m::EventKind::TaskRetried);
    ASSERT_EQ(retried.size(), 2u);
    EXPECT_EQ(retried[0].payload["backoff_ms"], 250);
    EXPECT_EQ(retried[1].payload["backoff_ms"], 500);
    // Oracle: the log replays to the same state and satisfies the invariants.
    const auto state = m::replay(h.log.events());
    EXPECT_EQ(state, h.log.state());
    EXPECT_EQ(state.task_states.at("a").attempts, 3u);
    EXPECT_FALSE(m::check_invariants(state));
    // Dispatches happen after the backoff elapsed.
    const auto dispatched = h.of(m::EventKind::TaskDispatched);
    ASSERT_EQ(dispatched.size(), 3u);
    EXPECT_EQ(dispatched[1].timestamp - retried[0].timestamp, 250);
    EXPECT_EQ(dispatched[2].timestamp - retried[1].timestamp, 500);
}

TEST(SupervisorTest, ExhaustedRetriesFailAndReachReporter) {
    Harness h;
    h.options.policy.retry_limit = 1;
    h.add("worker", scripted({{"a", {false, false, true}}}));
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    ASSERT_EQ(r.results.size(), 1u);
    const auto& f = std::get<m::StepFailed>(r.results[0].outcome);
    EXPECT_EQ(f.attempts, 2u);
    EXPECT_EQ(f.cause, "UpstreamDown");
    ASSERT_TRUE(r.report.is_object());
    ASSERT_EQ(r.report["failure_log"].size(), 1u);
    EXPECT_EQ(r.report["failure_log"][0]["step_id"], "a");
    EXPECT_FALSE(h.of(m::EventKind::ReportReady).empty());
    EXPECT_TRUE(h.sink.files.count("report.md") || !r.report["artifacts"].empty());
}

TEST(SupervisorTest, DiamondWithFailedBranchIsPartialFailure) {
    Harness h;
    h.options.policy.retry_limit = 0;
    h.add("worker", scripted({{"b", {false}}}));
    auto r = h.run(plan_of({step("a"), step("b", {"a"}), step("c", {"a"}), step("d", {"b", "c"})}));
    EXPECT_EQ(r.status, m::WorkflowStatus::PartialFailure);
    EXPECT_TRUE(r.results[0].succeeded());
    EXPECT_TRUE(std::holds_alternative<m::StepFailed>(r.results[1].outcome));
    EXPECT_TRUE(r.results[2].succeeded());
    ASSERT_TRUE(std::holds_alternative<m::StepSkipped>(r.results[3].outcome));
    EXPECT_EQ(std::get<m::StepSkipped>(r.results[3].outcome).failed_ancestor, "b");
    EXPECT_EQ(h.log.state().task_states.at("d").phase, m::TaskPhase::Skipped);
}

TEST(SupervisorTest, CleanSingleTaskRunRecordsFiveHandoffs) {
    Harness h;
    h.add("worker", scripted({}));
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    const auto events = h.log.events();
    EXPECT_EQ(handoff_count(events), 5u);
    EXPECT_EQ(handoff_count(events, true), 5u);
    std::vector<std::pair<m::Role, m::Role>> pairs;
    for (const auto& e : h.of(m::EventKind::HandoffRecorded)) {
        const auto rec = e.payload["record"].get<m::HandoffRecord>();
        pairs.emplace_back(rec.from_role, rec.to_role);
    }
    const std::vector<std::pair<m::Role, m::Role>> want{{m::Role::planner, m::Role::supervisor},
                                                         {m::Role::supervisor, m::Role::agent},
                                                         {m::Role::agent, m::Role::supervisor},
                                                         {m::Role::supervisor, m::Role::reporter}};
    EXPECT_EQ(pairs, want);
}

TEST(SupervisorTest, EachRetryAddsOneHandoff) {
    Harness h;
    h.add("worker", scripted({{"a", {false, false, true}}}));
    h.run(plan_of({step("a")}));
    EXPECT_EQ(handoff_count(h.log.events()), 7u);
    EXPECT_EQ(handoff_count(h.log.events(), true), 7u);
}

TEST(SupervisorTest, AckTimeoutRecordsRejectedHandoffAndRetries) {
    Harness h;
    auto calls = std::make_shared<int>(0);
    // Self-acknowledging agent that stays silent on its first attempt.
    h.add(
        "worker",
        [calls](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
            if ((*calls)++ == 0) {
                ctx.sleep_for(10000);
                return ok();
            }
            ctx.acknowledge();
            return ok();
        },
        "web_search", false, 30000, true);
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    const auto retried = h.of(m::EventKind::TaskRetried);
    ASSERT_EQ(retried.size(), 1u);
    EXPECT_EQ(retried[0].payload["cause"], "AckTimeout");
    EXPECT_EQ(retried[0].timestamp, 2000);
    std::vector<bool> dispatch_acks;
    for (const auto& e : h.of(m::EventKind::HandoffRecorded)) {
        const auto rec = e.payload["record"].get<m::HandoffRecord>();
        if (rec.from_role == m::Role::supervisor && rec.to_role == m::Role::agent) dispatch_acks.push_back(rec.accepted);
    }
    EXPECT_EQ(dispatch_acks, (std::vector<bool>{false, true}));
}

TEST(SupervisorTest, SilentHeartbeatAgentIsStalledAndRetried) {
    Harness h;
    h.options.policy.retry_limit = 1;
    h.add(
        "worker",
        [](const ag::TaskPayload& p, ag::TaskContext& ctx) -> ag::AgentOutcome {
            if (p.attempt == 1) {
                ctx.heartbeat("working");
                ctx.sleep_for(1000);
                ctx.heartbeat("still working");
                ctx.sleep_for(60000);
                return ok();
            }
            for (int i = 0; i < 4; ++i) {
                ctx.sleep_for(4000);
                ctx.heartbeat("tick");
            }
            return ok();
        },
        "web_search", true, 120000);
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    const auto retried = h.of(m::EventKind::TaskRetried);
    ASSERT_EQ(retried.size(), 1u);
    EXPECT_EQ(retried[0].payload["cause"], "Stalled");
    // Last heartbeat at 1000; strict threshold of 15000 trips at 16001.
    EXPECT_EQ(retried[0].timestamp, 16001);
    // The cancelled attempt's late completion never surfaces.
    EXPECT_EQ(h.of(m::EventKind::TaskSucceeded).at(0).payload["attempts"], 2);
}

TEST(SupervisorTest, OverrunningAgentTimesOut) {
    Harness h;
    h.options.policy.retry_limit = 0;
    h.add(
        "worker",
        [](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
            ctx.sleep_for(5000);
            return ok();
        },
        "web_search", false, 1000);
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    EXPECT_EQ(std::get<m::StepFailed>(r.results[0].outcome).cause, "Timeout");
    EXPECT_EQ(h.of(m::EventKind::TaskFailed).at(0).timestamp, 1001);
}

TEST(SupervisorTest, NonRetryableFailureStopsImmediately) {
    Harness h;
    h.add("worker", [](const ag::TaskPayload&, ag::TaskContext&) { return fail("ScriptFailed", false); });
    auto r = h.run(plan_of({step("a"), step("b", {"a"})}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    EXPECT_TRUE(h.of(m::EventKind::TaskRetried).empty());
    EXPECT_EQ(std::get<m::StepFailed>(r.results[0].outcome).attempts, 1u);
    EXPECT_TRUE(std::holds_alternative<m::StepSkipped>(r.results[1].outcome));
}

TEST(SupervisorTest, MissingCapabilityFailsWithoutDispatch) {
    Harness h;
    h.add("worker", scripted({}));
    auto plan = plan_of({step("a"), step("b", {}, "ocr"), step("c", {"b"})}, {"web_search", "ocr"});
    auto r = h.run(plan);
    EXPECT_EQ(r.status, m::WorkflowStatus::PartialFailure);
    EXPECT_EQ(std::get<m::StepFailed>(r.results[1].outcome).cause, "NoCapableAgent");
    EXPECT_EQ(std::get<m::StepFailed>(r.results[1].outcome).attempts, 0u);
    EXPECT_TRUE(std::holds_alternative<m::StepSkipped>(r.results[2].outcome));
    for (const auto& e : h.of(m::EventKind::TaskDispatched)) EXPECT_NE(e.payload["step_id"], "b");
}

TEST(SupervisorTest, InputsCarryDependencyResults) {
    Harness h;
    Json seen;
    h.add("worker", [&seen](const ag::TaskPayload& p, ag::TaskContext&) -> ag::AgentOutcome {
        if (p.step_id == "b") seen = p.inputs;
        return ag::AgentOutput{"summary of " + p.step_id, {}, Json{{"n", p.step_id.size()}}};
    });
    h.run(plan_of({step("a"), step("b", {"a"})}));
    ASSERT_TRUE(seen.contains("a"));
    EXPECT_EQ(seen["a"]["summary"], "summary of a");
    EXPECT_EQ(seen["a"]["data"]["n"], 1);
}

TEST(SupervisorTest, ConcurrencyBoundsHold) {
    for (std::uint32_t global : {1u, 2u, 3u}) {
        for (std::uint32_t per_agent : {1u, 2u}) {
            Harness h;
            h.options.policy.max_concurrency = global;
            h.options.policy.per_agent_concurrency = per_agent;
            for (const auto* id : {"w1", "w2"}) {
                h.add(id, [](const ag::TaskPayload& p, ag::TaskContext& ctx) -> ag::AgentOutcome {
                    ctx.sleep_for(100 + 10 * static_cast<std::int64_t>(p.step_id.back() - '0'));
                    return ok();
                });
            }
            std::vector<m::PlanStep> steps;
            for (int i = 0; i < 6; ++i) {
                auto s = step("s" + std::to_string(i));
                s.agent_hint = i % 2 ? "w2" : "w1";
                steps.push_back(s);
            }
            auto r = h.run(plan_of(steps));
            ASSERT_EQ(r.status, m::WorkflowStatus::Complete);
            std::map<std::string, int> per;
            std::map<std::string, std::string> owner;
            int total = 0, max_total = 0;
            std::map<std::string, int> max_per;
            for (const auto& e : h.log.events()) {
                if (e.kind == m::EventKind::TaskDispatched) {
                    const auto a = e.payload["agent_id"].get<std::string>();
                    owner[e.payload["step_id"].get<std::string>()] = a;
                    max_total = std::max(max_total, ++total);
                    max_per[a] = std::max(max_per[a], ++per[a]);
                } else if (e.kind == m::EventKind::TaskSucceeded || e.kind == m::EventKind::TaskFailed) {
                    --total;
                    --per[owner[e.payload["step_id"].get<std::string>()]];
                }
            }
            EXPECT_LE(max_total, static_cast<int>(global));
            for (const auto& [a, n] : max_per) EXPECT_LE(n, static_cast<int>(per_agent));
            EXPECT_EQ(max_total, static_cast<int>(std::min(global, 2 * per_agent)));
        }
    }
}

TEST(SupervisorTest, FifoWithinLevel) {
    Harness h;
    h.options.policy.max_concurrency = 1;
    h.add("worker", scripted({}));
    h.run(plan_of({step("z"), step("y"), step("x", {"z"}), step("w")}));
    std::vector<std::string> order;
    for (const auto& e : h.of(m::EventKind::TaskDispatched)) order.push_back(e.payload["step_id"]);
    EXPECT_EQ(order, (std::vector<std::string>{"z", "y", "w", "x"}));
}

TEST(SupervisorTest, StrategyHookReordersReadySteps) {
    Harness h;
    h.options.policy.max_concurrency = 1;
    h.options.strategy = [](const m::ValidatedPlan&, std::vector<std::string>& ready) {
        std::sort(ready.rbegin(), ready.rend());
    };
    h.add("worker", scripted({}));
    h.run(plan_of({step("a"), step("b"), step("c")}));
    std::vector<std::string> order;
    for (const auto& e : h.of(m::EventKind::TaskDispatched)) order.push_back(e.payload["step_id"]);
    EXPECT_EQ(order, (std::vector<std::string>{"c", "b", "a"}));
}

TEST(SupervisorTest, ExhaustiveSmallDagOracle) {
    std::size_t runs = 0;
    for (std::size_t n = 1; n <= 5; ++n) {
        for_each_dag(n, [&](const m::Plan& plan) {
            const std::size_t subsets = std::size_t{1} << n;
            // Every failure subset for n <= 4; for n = 5 a stride keeps the
            // unit run short while the acceptance check covers all of them.
            const std::size_t stride = n == 5 ? 7 : 1;
            for (std::size_t failing = 0; failing < subsets; failing += stride) {
                Harness h;
                h.options.policy.retry_limit = 0;
                h.options.policy.max_concurrency = 2;
                h.add("worker", [failing](const ag::TaskPayload& p, ag::TaskContext&) -> ag::AgentOutcome {
                    const auto k = std::stoul(p.step_id.substr(1));
                    return failing & (std::size_t{1} << k) ? fail() : ok();
                });
                auto vp = m::validate_plan(plan, {"web_search"});
                auto r = h.run(vp);
                ++runs;
                // Independent expectation.
                std::map<std::string, std::string> want;
                for (std::size_t k = 0; k < n; ++k) {
                    const auto id = "n" + std::to_string(k);
                    bool blocked = false;
                    for (std::size_t j = 0; j < n; ++j) {
                        const auto other = "n" + std::to_string(j);
                        if ((failing & (std::size_t{1} << j)) && depends_transitively(plan, id, other)) blocked = true;
                    }
                    want[id] = blocked ? "skipped" : (failing & (std::size_t{1} << k)) ? "failed" : "succeeded";
                }
                std::size_t ok_n = 0, bad_n = 0;
                for (const auto& res : r.results) {
                    const char* got = res.succeeded() ? "succeeded"
                                      : std::holds_alternative<m::StepFailed>(res.outcome) ? "failed"
                                                                                            : "skipped";
                    ASSERT_EQ(want[res.step_id], got) << "n=" << n << " failing=" << failing;
                    ok_n += res.succeeded();
                    bad_n += std::holds_alternative<m::StepFailed>(res.outcome);
                }
                const auto expect_status = ok_n == n               ? m::WorkflowStatus::Complete
                                           : ok_n > 0 && bad_n > 0 ? m::WorkflowStatus::PartialFailure
                                                                   : m::WorkflowStatus::Failed;
                ASSERT_EQ(r.status, expect_status);
                // Dependency safety.
                std::set<std::string> succeeded;
                for (const auto& e : h.log.events()) {
                    if (e.kind == m::EventKind::TaskSucceeded) succeeded.insert(e.payload["step_id"].get<std::string>());
                    if (e.kind == m::EventKind::TaskDispatched) {
                        const auto id = e.payload["step_id"].get<std::string>();
                        for (const auto& s : plan.steps) {
                            if (s.id != id) continue;
                            for (const auto& d : s.depends_on) ASSERT_TRUE(succeeded.count(d));
                        }
                    }
                }
                ASSERT_FALSE(m::check_invariants(h.log.state()));
            }
        });
    }
    EXPECT_GT(runs, 5000u);
}

TEST(SupervisorTest, RandomLargerDagsKeepDependencySafety) {
    Rng rng(77);
    for (int iter = 0; iter < 150; ++iter) {
        auto plan = random_plan(rng, 12);
        std::set<std::string> caps;
        for (const auto& s : plan.steps) caps.insert(s.required_capability);
        Harness h;
        h.options.policy.max_concurrency = 1 + iter % 4;
        h.options.policy.per_agent_concurrency = 1 + iter % 3;
        const auto fail_mod = 2 + iter % 5;
        for (const auto& c : caps) {
            h.add("agent-" + c, [fail_mod](const ag::TaskPayload& p, ag::TaskContext& ctx) -> ag::AgentOutcome {
                ctx.sleep_for(static_cast<std::int64_t>(p.step_id.size() * 10 + p.attempt));
                return std::hash<std::string>{}(p.step_id) % fail_mod == 0 ? fail() : ok();
            }, c);
        }
        auto r = h.run(m::validate_plan(plan, caps));
        std::set<std::string> succeeded;
        std::map<std::string, int> retries, dispatches;
        for (const auto& e : h.log.events()) {
            if (e.kind == m::EventKind::TaskSucceeded) succeeded.insert(e.payload["step_id"].get<std::string>());
            if (e.kind == m::EventKind::TaskRetried) ++retries[e.payload["step_id"].get<std::string>()];
            if (e.kind == m::EventKind::TaskDispatched) {
                ++dispatches[e.payload["step_id"].get<std::string>()];
                for (const auto& s : plan.steps) {
                    if (s.id != e.payload["step_id"]) continue;
                    for (const auto& d : s.depends_on) ASSERT_TRUE(succeeded.count(d));
                }
            }
        }
        const auto state = h.log.state();
        for (const auto& [id, t] : state.task_states) {
            EXPECT_EQ(t.attempts, static_cast<std::uint32_t>(dispatches[id]));
            if (dispatches[id]) EXPECT_EQ(t.attempts, 1u + retries[id]);
            EXPECT_LE(t.attempts, 3u);
        }
        EXPECT_FALSE(m::check_invariants(state));
        EXPECT_TRUE(m::is_terminal(state.status));
    }
}

TEST(SupervisorTest, RunsAreDeterministic) {
    auto once = [] {
        Harness h;
        h.add("worker", [](const ag::TaskPayload& p, ag::TaskContext& ctx) -> ag::AgentOutcome {
            ctx.heartbeat("start");
            ctx.sleep_for(static_cast<std::int64_t>(p.step_id[0]) * 3);
            return p.attempt == 1 && p.step_id == "b" ? fail() : ok(p.step_id);
        }, "web_search", true);
        h.run(plan_of({step("a"), step("b", {"a"}), step("c", {"a"}), step("d", {"b", "c"})}));
        return h.log.events();
    };
    EXPECT_EQ(once(), once());
}

TEST(SupervisorTest, ZeroFaultTotality) {
    Rng rng(5);
    for (int iter = 0; iter < 100; ++iter) {
        auto plan = random_plan(rng, 10);
        std::set<std::string> caps;
        for (const auto& s : plan.steps) caps.insert(s.required_capability);
        Harness h;
        for (const auto& c : caps) h.add("a-" + c, scripted({}), c);
        auto r = h.run(m::validate_plan(plan, caps));
        ASSERT_EQ(r.status, m::WorkflowStatus::Complete);
        const auto events = h.log.events();
        EXPECT_EQ(handoff_count(events), handoff_count(events, true));
        EXPECT_EQ(handoff_count(events), 3 + 2 * plan.steps.size());
    }
}

TEST(SupervisorTest, ApprovalGrantedReinvokesSameAttempt) {
    Harness h;
    h.options.approval_responder = [](const std::string&, const std::string&) {
        return sv::ApprovalDecision{true, 300};
    };
    h.add("worker", [](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
        if (!ctx.redeem_approval("digest-1")) return ag::ApprovalNeeded{"digest-1", "delete things"};
        return ok("deleted");
    });
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    ASSERT_EQ(h.of(m::EventKind::ApprovalRequested).size(), 1u);
    const auto resolved = h.of(m::EventKind::ApprovalResolved);
    ASSERT_EQ(resolved.size(), 1u);
    EXPECT_TRUE(resolved[0].payload["approved"].get<bool>());
    EXPECT_EQ(resolved[0].timestamp, 300);
    EXPECT_EQ(h.of(m::EventKind::TaskDispatched).size(), 1u);
    EXPECT_EQ(h.of(m::EventKind::TaskSucceeded)[0].payload["attempts"], 1);
    // The token was consumed by the agent.
    EXPECT_FALSE(h.approvals.redeem_binding("c1", "digest-1", 300));
}

TEST(SupervisorTest, ApprovalDeniedFailsTaskWithoutRetry) {
    Harness h;
    bool executed = false;
    h.options.approval_responder = [](const std::string&, const std::string&) {
        return sv::ApprovalDecision{false, 0};
    };
    h.add("worker", [&executed](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
        if (!ctx.redeem_approval("digest-1")) return ag::ApprovalNeeded{"digest-1", "delete things"};
        executed = true;
        return ok();
    });
    auto r = h.run(plan_of({step("a"), step("b", {"a"})}));
    EXPECT_FALSE(executed);
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    EXPECT_EQ(std::get<m::StepFailed>(r.results[0].outcome).cause, "ApprovalDenied");
    EXPECT_TRUE(h.of(m::EventKind::TaskRetried).empty());
    EXPECT_TRUE(std::holds_alternative<m::StepSkipped>(r.results[1].outcome));
}

TEST(SupervisorTest, ExternalResolutionValidatesDigest) {
    Harness h;
    h.add("worker", [](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
        if (!ctx.redeem_approval("digest-1")) return ag::ApprovalNeeded{"digest-1", "delete things"};
        return ok();
    });
    sv::Supervisor* self = nullptr;
    std::vector<sv::ResolveStatus> statuses;
    h.options.approval_responder = [&](const std::string&, const std::string&) -> std::optional<sv::ApprovalDecision> {
        statuses.push_back(self->resolve_approval("wrong", true));
        statuses.push_back(self->resolve_approval("digest-1", true));
        statuses.push_back(self->resolve_approval("digest-1", true));
        return std::nullopt;
    };
    sv::Supervisor s(h.log, h.registry.view(), h.runtime, h.options);
    self = &s;
    EXPECT_EQ(s.resolve_approval("digest-1", true), sv::ResolveStatus::no_pending_approval);
    auto r = s.run_workflow(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    EXPECT_EQ(statuses, (std::vector<sv::ResolveStatus>{sv::ResolveStatus::digest_mismatch, sv::ResolveStatus::resolved,
                                                         sv::ResolveStatus::no_pending_approval}));
}

TEST(SupervisorTest, UnansweredApprovalInSimulationEndsAsStuck) {
    Harness h;
    h.add("worker", [](const ag::TaskPayload&, ag::TaskContext&) -> ag::AgentOutcome {
        return ag::ApprovalNeeded{"digest-1", "delete things"};
    });
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    EXPECT_EQ(h.log.state().close_reason, "failed");
    EXPECT_TRUE(h.log.state().pending_approvals.empty());
}

TEST(SupervisorTest, CancelStopsWorkflow) {
    Harness h;
    ag::HookPipeline hooks;
    sv::Supervisor* self = nullptr;
    hooks.install_hook(ag::Hook{ag::HookStage::post_task, "", ag::HookAction::notify, [&](Json&) {
                                    self->cancel("user pressed stop");
                                    return std::nullopt;
                                }});
    h.options.hooks = &hooks;
    h.options.policy.max_concurrency = 1;
    h.add("worker", scripted({}));
    sv::Supervisor s(h.log, h.registry.view(), h.runtime, h.options);
    self = &s;
    auto r = s.run_workflow(plan_of({step("a"), step("b"), step("c", {"a"})}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Failed);
    EXPECT_EQ(r.close_reason, "cancelled");
    const auto st = h.log.state();
    EXPECT_EQ(st.close_reason, "cancelled");
    EXPECT_EQ(st.close_cause, "user pressed stop");
    EXPECT_TRUE(r.results[0].succeeded());
    EXPECT_TRUE(h.of(m::EventKind::ReportReady).empty());
}

TEST(SupervisorTest, PreTaskHooksTransformAndReject) {
    Harness h;
    ag::HookPipeline hooks;
    hooks.install_hook(ag::Hook{ag::HookStage::pre_task, "", ag::HookAction::transform, [](Json& j) {
                                    j["args"]["flag"] = true;
                                    return std::nullopt;
                                }});
    hooks.install_hook(ag::Hook{ag::HookStage::pre_task, "", ag::HookAction::validate,
                                [](Json& j) -> std::optional<std::string> {
                                    if (j["step_id"] == "b") return "b is not allowed";
                                    return std::nullopt;
                                }});
    h.options.hooks = &hooks;
    bool saw_flag = false;
    h.add("worker", [&saw_flag](const ag::TaskPayload& p, ag::TaskContext&) -> ag::AgentOutcome {
        saw_flag = p.args.value("flag", false);
        return ok();
    });
    auto r = h.run(plan_of({step("a"), step("b")}));
    EXPECT_TRUE(saw_flag);
    EXPECT_EQ(r.status, m::WorkflowStatus::PartialFailure);
    EXPECT_EQ(std::get<m::StepFailed>(r.results[1].outcome).cause.rfind("HookRejected", 0), 0u);
}

TEST(SupervisorTest, ReportHooksAndRegisteredReporter) {
    Harness h;
    ag::HookPipeline hooks;
    Json seen_report;
    hooks.install_hook(ag::Hook{ag::HookStage::post_report, "", ag::HookAction::notify, [&](Json& j) {
                                    seen_report = j;
                                    return std::nullopt;
                                }});
    h.options.hooks = &hooks;
    h.add("worker", scripted({}));
    h.add("my-reporter", [](const ag::TaskPayload& p, ag::TaskContext&) -> ag::AgentOutcome {
        return ag::AgentOutput{"custom", {}, Json{{"results", p.context["results"].size()}}};
    }, "report");
    auto r = h.run(plan_of({step("a")}));
    EXPECT_EQ(r.report["results"], 1);
    EXPECT_EQ(seen_report["results"], 1);

    Harness h2;
    ag::HookPipeline block;
    block.install_hook(ag::Hook{ag::HookStage::pre_report, "", ag::HookAction::validate,
                                [](Json&) -> std::optional<std::string> { return "no reports"; }});
    h2.options.hooks = &block;
    h2.add("worker", scripted({}));
    auto r2 = h2.run(plan_of({step("a")}));
    EXPECT_EQ(r2.status, m::WorkflowStatus::Complete);
    EXPECT_TRUE(r2.report.is_null());
    const auto last = h2.of(m::EventKind::HandoffRecorded).back().payload["record"].get<m::HandoffRecord>();
    EXPECT_EQ(last.to_role, m::Role::reporter);
    EXPECT_FALSE(last.accepted);
}

TEST(SupervisorTest, EmitsHeartbeatEvents) {
    Harness h;
    h.add("worker", [](const ag::TaskPayload&, ag::TaskContext& ctx) -> ag::AgentOutcome {
        for (int i = 0; i < 3; ++i) {
            ctx.sleep_for(5000);
            ctx.heartbeat("progress " + std::to_string(i));
        }
        return ok();
    }, "web_search", true);
    h.run(plan_of({step("a")}));
    const auto hb = h.of(m::EventKind::Heartbeat);
    // The kit sends a "started" heartbeat for heartbeat-capable agents.
    ASSERT_GE(hb.size(), 3u);
    EXPECT_EQ(hb.back().payload["note"], "progress 2");
    EXPECT_EQ(hb.back().timestamp, 15000);
}

TEST(ThreadRuntimeTest, RunsWorkflowOnWallClock) {
    ag::Registry registry;
    registry.register_agent(synthetic_manifest("worker", "web_search", true),
                            std::make_shared<FnAgent>([](const ag::TaskPayload& p, ag::TaskContext& ctx) {
                                ctx.sleep_for(20);
                                ctx.heartbeat("halfway");
                                ctx.sleep_for(20);
                                return ok(p.step_id);
                            }));
    m::EventLog log;
    prime_log(log);
    sv::ThreadRuntime rt;
    sv::SupervisorOptions opts;
    opts.policy.per_agent_concurrency = 2;
    sv::Supervisor s(log, registry.view(), rt, opts);
    auto r = s.run_workflow(plan_of({step("a"), step("b"), step("c", {"a", "b"})}));
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    EXPECT_FALSE(m::check_invariants(log.state()));
    EXPECT_EQ(m::replay(log.events()), log.state());
}

TEST(ThreadRuntimeTest, StallDetectionCancelsHungAttempt) {
    ag::Registry registry;
    auto calls = std::make_shared<std::atomic<int>>(0);
    registry.register_agent(synthetic_manifest("worker", "web_search", true),
                            std::make_shared<FnAgent>([calls](const ag::TaskPayload&, ag::TaskContext& ctx) {
                                if ((*calls)++ == 0) {
                                    ctx.sleep_for(10000);  // hangs until cancelled
                                    return ctx.cancelled() ? fail("Cancelled") : ok();
                                }
                                return ok();
                            }));
    m::EventLog log;
    prime_log(log);
    sv::ThreadRuntime rt;
    sv::SupervisorOptions opts;
    opts.policy.heartbeat_interval_ms = 50;
    opts.policy.missed_heartbeats_to_stall = 2;
    opts.policy.backoff_initial_ms = 10;
    sv::Supervisor s(log, registry.view(), rt, opts);
    const auto t0 = std::chrono::steady_clock::now();
    auto r = s.run_workflow(plan_of({step("a")}));
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    EXPECT_EQ(r.status, m::WorkflowStatus::Complete);
    EXPECT_LT(elapsed, std::chrono::seconds(3));
    bool stalled = false;
    for (const auto& e : log.events()) {
        if (e.kind == m::EventKind::TaskRetried) stalled = e.payload["cause"] == "Stalled";
    }
    EXPECT_TRUE(stalled);
}

TEST(ThreadRuntimeTest, ExternalCancel) {
    ag::Registry registry;
    registry.register_agent(synthetic_manifest("worker", "web_search", true),
                            std::make_shared<FnAgent>([](const ag::TaskPayload&, ag::TaskContext& ctx) {
                                for (int i = 0; i < 500 && !ctx.cancelled(); ++i) {
                                    ctx.sleep_for(10);
                                    ctx.heartbeat();
                                }
                                return ok();
                            }));
    m::EventLog log;
    prime_log(log);
    sv::ThreadRuntime rt;
    sv::Supervisor s(log, registry.view(), rt, {});
    std::thread canceller([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        s.cancel();
    });
    auto r = s.run_workflow(plan_of({step("a")}));
    canceller.join();
    EXPECT_EQ(r.close_reason, "cancelled");
    EXPECT_EQ(log.state().status, m::WorkflowStatus::Failed);
}
