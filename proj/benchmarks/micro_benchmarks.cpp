#include "autonoma/bench/harness.hpp"
#include "autonoma/model/state_machine.hpp"
#include "autonoma/net/ip_filter.hpp"
#include "autonoma/store/store.hpp"

#include <benchmark/benchmark.h>

namespace bn = autonoma::bench;
namespace m = autonoma::model;

static void BM_IpFilter(benchmark::State& state) {
    const auto allow = autonoma::net::default_allowlist();
    const std::string addrs[] = {"192.168.1.20", "8.8.8.8", "::ffff:10.1.2.3", "2001:db8::7"};
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(autonoma::net::ip_filter(addrs[i++ % 4], allow));
}
BENCHMARK(BM_IpFilter);

static std::vector<m::WorkflowEvent> sample_log(std::size_t steps) {
    const auto work = bn::generate_workload(1, 1, bn::parse_shape("chain-" + std::to_string(steps)));
    return bn::run_benchmark(work, {0.2, 0, 0, {}, 1}, {}).logs.front();
}

static void BM_ReplayLog(benchmark::State& state) {
    const auto log = sample_log(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(m::replay(log));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.size()));
}
BENCHMARK(BM_ReplayLog)->Arg(3)->Arg(12);

static void BM_SerializeEvents(benchmark::State& state) {
    const auto log = sample_log(12);
    for (auto _ : state) benchmark::DoNotOptimize(autonoma::store::serialize_events(log));
}
BENCHMARK(BM_SerializeEvents);

static void BM_SimulatedWorkflow(benchmark::State& state) {
    const auto work = bn::generate_workload(3, 1, bn::parse_shape("diamond"));
    for (auto _ : state) benchmark::DoNotOptimize(bn::run_benchmark(work, {}, {}));
}
BENCHMARK(BM_SimulatedWorkflow);
BENCHMARK_MAIN();
