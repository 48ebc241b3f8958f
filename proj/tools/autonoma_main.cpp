#include "autonoma/agents/process_agent.hpp"
#include "autonoma/agents/registry.hpp"
#include "autonoma/builtin/coder.hpp"
#include "autonoma/builtin/file_manager.hpp"
#include "autonoma/builtin/reporter.hpp"
#include "autonoma/builtin/researcher.hpp"
#include "autonoma/builtin/stubs.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/coordinator/coordinator.hpp"
#include "autonoma/engine/engine.hpp"
#include "autonoma/gateway/config.hpp"
#include "autonoma/gateway/server.hpp"
#include "autonoma/net/pairing.hpp"
#include "autonoma/store/audit.hpp"
#include "autonoma/store/store.hpp"

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include <iostream>

namespace ag = autonoma::agents;
namespace bi = autonoma::builtin;
namespace gw = autonoma::gateway;
namespace fs = std::filesystem;

namespace {

void register_builtin_agents(ag::Registry& registry, const gw::ServiceConfig& config) {
    const auto workspace = gw::workspace_path(config);
    fs::create_directories(workspace);
    registry.register_agent(bi::file_manager_manifest(workspace), std::make_shared<bi::FileManagerAgent>());
    registry.register_agent(bi::coder_manifest(workspace), std::make_shared<bi::CoderAgent>());
    std::vector<std::shared_ptr<bi::SearchTool>> tools;
    if (!config.search_fixtures.empty()) tools.push_back(std::make_shared<bi::FixtureSearchTool>(config.search_fixtures));
    registry.register_agent(bi::researcher_manifest(), std::make_shared<bi::ResearcherAgent>(tools));
    registry.register_agent(bi::browser_manifest(),
                            std::make_shared<bi::RecordingStubAgent>(bi::RecordingStubAgent::Kind::browser));
    registry.register_agent(bi::computer_manifest(),
                            std::make_shared<bi::RecordingStubAgent>(bi::RecordingStubAgent::Kind::computer));
    registry.register_agent(bi::reporter_manifest(), std::make_shared<bi::ReporterAgent>());
}

void register_plugins(ag::Registry& registry, const fs::path& dir) {
    if (dir.empty()) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !fs::exists(ag::manifest_path_for(entry.path()))) continue;
        auto plugin = ag::load_process_plugin(entry.path());
        const auto id = registry.register_agent(std::move(plugin.manifest), std::move(plugin.impl));
        std::cerr << "loaded plugin " << id << " from " << entry.path().string() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Autonoma gateway: LAN service for prompts, workflow streams and approvals"};
    std::optional<std::string> config_file;
    std::optional<std::string> bind;
    std::optional<std::uint16_t> port;
    std::vector<std::string> allow_cidrs;
    bool print_qr = false;
    bool allow_non_lan = false;
    app.add_option("--config", config_file, "Configuration file (key = value document)")->check(CLI::ExistingFile);
    app.add_option("--bind", bind, "Listen address; must be inside the allowlist");
    app.add_option("--port", port, "Listen port (0 picks a free port)");
    app.add_option("--allow-cidr", allow_cidrs, "Allowed client network; repeat to add more, replaces the configured list");
    app.add_flag("--print-qr", print_qr, "Print a pairing payload for a new client after startup");
    app.add_flag("--allow-non-lan-bind", allow_non_lan, "Permit a bind address outside the allowlist");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = gw::load_service_config(config_file ? std::optional<fs::path>(*config_file) : std::nullopt,
                                              gw::autonoma_environment());
        if (bind) config.bind_address = *bind;
        if (port) config.port = *port;
        if (!allow_cidrs.empty()) {
            config.allowlist.clear();
            for (const auto& c : allow_cidrs) config.allowlist.push_back(autonoma::net::parse_cidr(c));
        }
        if (allow_non_lan) config.allow_non_lan_bind = true;
        gw::validate_service_config(config);
        auto rules = autonoma::coordinator::RuleSet::load(config.rules_dir);

        ag::Registry registry;
        register_builtin_agents(registry, config);
        register_plugins(registry, config.plugin_dir);

        autonoma::provider::Router router;
        gw::configure_router(config, router);
        if (!router.has(autonoma::provider::RoleContext::planner)) {
            std::cerr << "warning: no planner provider configured; task prompts will fail at planning\n";
        }

        fs::create_directories(config.storage_root);
        auto store = std::make_shared<autonoma::store::FileStore>(config.storage_root);
        auto audit = std::make_shared<autonoma::store::AuditLog>(gw::audit_path(config));
        autonoma::engine::EngineConfig engine_config;
        engine_config.policy = config.policy;
        autonoma::engine::Engine engine(registry, router, std::move(rules),
                                        engine_config, store, audit);

        auto pairing = std::make_shared<autonoma::net::PairingRegistry>(config.pairing_ttl_ms);
        gw::Gateway gateway(config, engine, pairing);
        gateway.start();
        std::cerr << "listening on " << config.bind_address << ":" << gateway.port() << "\n";
        if (print_qr) {
            std::cout << autonoma::net::qr_payload(config.bind_address, gateway.port(), pairing->issue().token)
                      << std::endl;
        }

        boost::asio::io_context signals_io;
        boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
        signals.async_wait([](const boost::system::error_code&, int) {});
        signals_io.run();

        gateway.stop();
        engine.shutdown();
        return 0;
    } catch (const autonoma::Error& e) {
        std::cerr << "error: " << autonoma::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
