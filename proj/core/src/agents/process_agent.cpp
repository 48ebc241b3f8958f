#include "autonoma/agents/process_agent.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/model/types.hpp"
#include "subprocess.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace autonoma::agents {

namespace {

Json task_message(const TaskPayload& p) {
    return Json{{"type", "task"},
                {"payload",
                 {{"conversation_id", p.conversation_id},
                  {"step_id", p.step_id},
                  {"description", p.description},
                  {"required_capability", p.required_capability},
                  {"attempt", p.attempt},
                  {"lang", model::to_string(p.lang)},
                  {"inputs", p.inputs},
                  {"args", p.args}}}};
}

std::optional<AgentOutcome> handle_line(const std::string& line, TaskContext& ctx) {
    Json msg = Json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        return AgentFailure{"AgentPanic", "plugin sent a malformed line: " + line.substr(0, 200), true};
    }
    const auto type = msg["type"].get<std::string>();
    const Json payload = msg.value("payload", Json::object());
    if (type == "heartbeat") {
        ctx.heartbeat(payload.is_object() ? payload.value("note", std::string{}) : std::string{});
        return std::nullopt;
    }
    if (type == "result") {
        AgentOutput out;
        out.summary = payload.value("summary", std::string{});
        out.artifacts = payload.value("artifacts", std::vector<std::string>{});
        out.data = payload.value("data", Json::object());
        return out;
    }
    if (type == "error") {
        return AgentFailure{payload.value("cause", std::string("PluginError")), payload.value("detail", std::string{}),
                            payload.value("retryable", true)};
    }
    return AgentFailure{"AgentPanic", "plugin sent unknown message type '" + type + "'", true};
}

}  // namespace

AgentOutcome ProcessAgent::run(const TaskPayload& payload, TaskContext& ctx) {
    const auto& grants = ctx.grants();
    SpawnOptions opts;
    opts.argv = argv_;
    opts.cwd = grants.fs_jail_root;
    opts.isolate_network = !grants.allow_network;
    Subprocess child(opts);
    child.write_stdin(task_message(payload).dump() + "\n");
    child.close_stdin();

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(grants.max_runtime_ms);
    const std::size_t cap = grants.max_output_bytes * 4 + 4096;
    std::string out, err;
    std::size_t consumed = 0;
    for (;;) {
        if (ctx.cancelled()) {
            child.kill();
            return AgentFailure{"Cancelled", "invocation cancelled", false};
        }
        if (std::chrono::steady_clock::now() > deadline) {
            child.kill();
            return AgentFailure{"Timeout", "plugin exceeded max_runtime", true};
        }
        const auto r = child.read_some(out, err, 50);
        std::size_t nl;
        while ((nl = out.find('\n', consumed)) != std::string::npos) {
            const auto line = out.substr(consumed, nl - consumed);
            consumed = nl + 1;
            if (line.empty()) continue;
            if (auto outcome = handle_line(line, ctx)) {
                child.kill();
                return *outcome;
            }
        }
        if (out.size() > cap || err.size() > cap) {
            child.kill();
            return AgentFailure{"AgentPanic", "plugin output exceeded max_output", true};
        }
        if (r == Subprocess::Read::eof) break;
    }
    const int code = child.wait();
    return AgentFailure{"AgentPanic",
                        "plugin exited with status " + std::to_string(code) + " without a result: " +
                            err.substr(0, 500),
                        true};
}

fs::path manifest_path_for(const fs::path& executable) {
    return executable.parent_path() / (executable.stem().string() + ".manifest.json");
}

RegisteredAgent load_process_plugin(const fs::path& executable) {
    if (!fs::exists(executable)) throw Error(Errc::not_found, "plugin not found: " + executable.string());
    const auto mpath = manifest_path_for(executable);
    std::ifstream in(mpath);
    if (!in) throw Error(Errc::not_found, "plugin manifest not found: " + mpath.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Json doc = Json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::corrupt, "plugin manifest is not JSON: " + mpath.string());
    auto manifest = doc.get<AgentManifest>();
    std::vector<std::string> argv{fs::absolute(executable).string()};
    if (doc.contains("argv") && doc["argv"].is_array()) {
        // e.g. ["python3"] to run a script that is not executable itself
        std::vector<std::string> prefix = doc["argv"].get<std::vector<std::string>>();
        prefix.push_back(argv.front());
        argv = std::move(prefix);
    }
    return RegisteredAgent{std::move(manifest), std::make_shared<ProcessAgent>(std::move(argv))};
}

}  // namespace autonoma::agents
