#include "autonoma/bench/harness.hpp"
#include "autonoma/common/error.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iomanip>
#include <iostream>
#include <thread>

namespace bn = autonoma::bench;

int main(int argc, char** argv) {
    CLI::App app{"Fault-injection benchmark for the workflow engine (logical clock)"};
    app.require_subcommand(1);

    std::size_t n = 500;
    std::uint64_t seed = 42;
    double fail = 0.0, stall = 0.0, ack_loss = 0.0;
    std::uint32_t retries = 2;
    std::string shape = "single";
    std::string format = "table";
    std::vector<std::int64_t> latency{100};
    std::size_t parallelism = std::max(1u, std::thread::hardware_concurrency());
    std::size_t filter_probes = 10000;

    auto* run = app.add_subcommand("run", "Run a synthetic workload and report metrics");
    run->add_option("--n", n, "Number of workflows")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Workload and fault seed");
    run->add_option("--fail", fail, "Per-attempt failure probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--stall", stall, "Per-attempt stall probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--ack-loss", ack_loss, "Per-attempt lost acknowledgement probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--retries", retries, "Retry limit per task");
    run->add_option("--shape", shape, "single | chain-<k> | diamond | random | mixed");
    run->add_option("--latency", latency, "Agent latency in logical ms: one value, or min max for a uniform range")
        ->expected(1, 2);
    run->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));
    run->add_option("--parallelism", parallelism, "Workflows run at once")->check(CLI::PositiveNumber);
    run->add_option("--filter-probes", filter_probes, "Outside addresses thrown at the IP filter (0 skips)");

    auto* verify = app.add_subcommand("verify", "Compare measured completion with the analytic expectation");
    verify->add_option("--n", n, "Workflows per grid cell")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Seed");
    verify->add_option("--parallelism", parallelism, "Workflows run at once")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            bn::FaultModel faults;
            faults.failure_prob = fail;
            faults.stall_prob = stall;
            faults.ack_loss_prob = ack_loss;
            faults.seed = seed;
            faults.latency.min_ms = latency.front();
            faults.latency.max_ms = latency.back();
            if (latency.size() == 2) faults.latency.kind = bn::LatencyModel::Kind::uniform;
            autonoma::supervisor::ExecutionPolicy policy;
            policy.retry_limit = retries;

            const auto start = std::chrono::steady_clock::now();
            const auto result =
                bn::run_benchmark(bn::generate_workload(seed, n, bn::parse_shape(shape)), faults, policy, parallelism);
            const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::optional<bn::FilterCheck> filter;
            if (filter_probes > 0) filter = bn::run_filter_check(seed, filter_probes);
            std::cout << bn::report_metrics(result.metrics,
                                            format == "json" ? bn::ReportFormat::json : bn::ReportFormat::table, filter);
            if (format == "table") std::cout << "Wall time " << std::fixed << std::setprecision(2) << wall << " s\n";
            std::cout.flush();
            return 0;
        }

        bool all_ok = true;
        std::cout << std::left << std::setw(6) << "f" << std::setw(4) << "r" << std::setw(10) << "shape"
                  << std::setw(10) << "expected" << std::setw(10) << "measured" << "99% interval\n";
        for (const auto& c : bn::verify_grid(seed, n, parallelism)) {
            all_ok = all_ok && c.ok;
            std::cout << std::fixed << std::setprecision(3) << std::setw(6) << c.failure_prob << std::setw(4)
                      << c.retry_limit << std::setw(10) << bn::to_string(c.shape) << std::setw(10) << c.expected
                      << std::setw(10) << c.measured << "[" << c.lo << ", " << c.hi << "]"
                      << (c.ok ? "" : "  DEVIATION") << "\n";
        }
        std::cout << (all_ok ? "verify: ok" : "verify: deviation outside the interval") << std::endl;
        return all_ok ? 0 : 1;
    } catch (const autonoma::Error& e) {
        std::cerr << "error: " << autonoma::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    }
}
