#pragma once

#include "autonoma/common/json.hpp"
#include "autonoma/model/types.hpp"
#include "autonoma/supervisor/supervisor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace autonoma::bench {

// single | chain-<k> | diamond | random (DAG of 1..8 nodes) | mixed
struct ShapePolicy {
    enum class Kind { single, chain, diamond, random_dag, mixed };
    Kind kind = Kind::single;
    unsigned chain_length = 3;

    bool operator==(const ShapePolicy&) const = default;
};

// Throws InvalidArgument.
ShapePolicy parse_shape(const std::string& text);
std::string to_string(const ShapePolicy& s);

struct WorkflowSpec {
    std::size_t index = 0;
    std::string prompt;
    model::Plan plan;
};

inline constexpr const char* kSyntheticCapability = "synthetic";

// Deterministic per seed. Every plan validates against {"synthetic"}.
std::vector<WorkflowSpec> generate_workload(std::uint64_t seed, std::size_t n, const ShapePolicy& shape);

struct LatencyModel {
    enum class Kind { fixed, uniform };
    Kind kind = Kind::fixed;
    std::int64_t min_ms = 100;
    std::int64_t max_ms = 100;

    bool operator==(const LatencyModel&) const = default;
};

struct FaultModel {
    double failure_prob = 0.0;   // attempt returns a retryable failure
    double stall_prob = 0.0;     // attempt stops heartbeating
    double ack_loss_prob = 0.0;  // attempt never acknowledges
    LatencyModel latency;
    std::uint64_t seed = 0;

    bool operator==(const FaultModel&) const = default;
};

// Throws InvalidArgument unless probabilities are in [0,1] and the
// latency range is non-negative and ordered.
void validate_fault_model(const FaultModel& f);

struct FaultDecision {
    bool lose_ack = false;
    bool stall = false;
    bool fail = false;
    std::int64_t latency_ms = 0;

    bool operator==(const FaultDecision&) const = default;
};

// Drawn from an RNG seeded by (seed, workflow, step, attempt) alone, so the
// injected sequence does not depend on scheduling or parallelism.
FaultDecision decide_fault(const FaultModel& f, std::size_t workflow, const std::string& step_id,
                           std::uint32_t attempt);

struct Metrics {
    std::size_t workflows = 0;
    std::size_t completed = 0;
    std::size_t handoffs = 0;
    std::size_t handoffs_accepted = 0;
    std::size_t tasks = 0;
    std::size_t attempts = 0;
    std::size_t retries = 0;
    std::size_t stalls = 0;
    std::int64_t latency_p50_ms = 0;
    std::int64_t latency_p95_ms = 0;

    double completion_rate() const;
    double handoff_success_rate() const;
    bool operator==(const Metrics&) const = default;
};

Json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const Json& j);

// Completion = workflows closed Complete; handoffs = HandoffToPlanner plus
// HandoffRecorded events; latency = PromptReceived to WorkflowClosed.
Metrics metrics_from_logs(const std::vector<std::vector<model::WorkflowEvent>>& logs);

struct BenchResult {
    Metrics metrics;
    std::vector<std::vector<model::WorkflowEvent>> logs;  // workload order
};

// Runs every workflow through a simulated engine with a scripted planner and
// synthetic agents driven by the fault model. `parallelism` workflows run at
// once; results do not depend on it.
BenchResult run_benchmark(const std::vector<WorkflowSpec>& workload, const FaultModel& faults,
                          const supervisor::ExecutionPolicy& policy, std::size_t parallelism = 1);

// (1 - p)^(r+1) per step failing all attempts; a workflow completes when
// every step eventually succeeds.
double expected_completion(double attempt_failure_prob, std::uint32_t retry_limit, std::size_t steps);

// Central two-sided interval for the mean of n Bernoulli(p) trials using the
// normal approximation; degenerate at p in {0, 1}.
std::pair<double, double> binomial_interval(double p, std::size_t n, double z = 2.5758293035489);

struct FilterCheck {
    std::size_t probes = 0;
    std::size_t allowed = 0;
};

// Fuzzes the default allowlist with addresses outside it.
FilterCheck run_filter_check(std::uint64_t seed, std::size_t probes);

enum class ReportFormat { table, json };
std::string report_metrics(const Metrics& m, ReportFormat format, const std::optional<FilterCheck>& filter = {});

struct VerifyCell {
    double failure_prob = 0;
    std::uint32_t retry_limit = 0;
    ShapePolicy shape;
    double expected = 0;
    double measured = 0;
    double lo = 0;
    double hi = 0;
    bool ok = false;
};

// The analytic grid: f in {0, 0.1, 0.3}, r in {0, 1, 2}, single and chain-3.
std::vector<VerifyCell> verify_grid(std::uint64_t seed, std::size_t n, std::size_t parallelism = 1);

}  // namespace autonoma::bench
