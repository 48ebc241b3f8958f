#include "autonoma/builtin/coder.hpp"

#include "autonoma/builtin/derive_args.hpp"
#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"
#include "../agents/subprocess.hpp"

#include <chrono>
#include <fstream>

namespace fs = std::filesystem;

namespace autonoma::builtin {

ScriptLang script_lang_from_string(const std::string& s) {
    if (s == "python" || s == "python3" || s == "py") return ScriptLang::python;
    if (s == "shell" || s == "sh" || s == "bash") return ScriptLang::shell;
    throw Error(Errc::invalid_argument, "unsupported script language: " + s);
}

ExecResult run_script(const std::string& source, ScriptLang lang, const agents::PrivilegeGrants& grants,
                      const Interpreters& interpreters) {
    if (!grants.allow_exec) throw Error(Errc::exec_denied, "script execution not granted");
    if (!grants.fs_jail_root) throw Error(Errc::exec_denied, "script execution needs a jail");

    const auto work = *grants.fs_jail_root / "work";
    std::error_code ec;
    fs::create_directories(work, ec);
    if (ec) throw Error(Errc::io_error, "cannot create work directory: " + ec.message());
    const auto script = work / ("script-" + random_uuid() + (lang == ScriptLang::python ? ".py" : ".sh"));
    {
        std::ofstream out(script, std::ios::binary);
        out << source;
    }

    agents::SpawnOptions opts;
    opts.argv = {lang == ScriptLang::python ? interpreters.python : interpreters.shell, script.filename().string()};
    opts.cwd = work;
    opts.isolate_network = !grants.allow_network;
    opts.env = {{"PATH", "/usr/local/bin:/usr/bin:/bin"},
                {"HOME", work.string()},
                {"LANG", "C.UTF-8"},
                {"PYTHONDONTWRITEBYTECODE", "1"}};

    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + std::chrono::milliseconds(grants.max_runtime_ms);
    ExecResult r;
    {
        agents::Subprocess child(opts);
        child.close_stdin();
        std::string out, err;
        for (;;) {
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) {
                child.kill();
                child.wait();
                fs::remove(script, ec);
                throw Error(Errc::timeout, "script exceeded " + std::to_string(grants.max_runtime_ms) + " ms");
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            const auto rd = child.read_some(out, err, static_cast<int>(std::min<long>(left, 100)));
            // Keep draining so the child never blocks on a full pipe, but
            // retain at most the cap.
            if (out.size() > grants.max_output_bytes) {
                out.resize(grants.max_output_bytes);
                r.truncated = true;
            }
            if (err.size() > grants.max_output_bytes) {
                err.resize(grants.max_output_bytes);
                r.truncated = true;
            }
            if (rd == agents::Subprocess::Read::eof) break;
        }
        r.exit_code = child.wait();
        r.stdout_text = utf8::truncate(out, grants.max_output_bytes);
        r.stderr_text = utf8::truncate(err, grants.max_output_bytes);
    }
    r.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    fs::remove(script, ec);
    return r;
}

agents::AgentOutcome CoderAgent::run(const agents::TaskPayload& payload, agents::TaskContext& ctx) {
    Json args = payload.args;
    if (args.is_object() && args.empty()) {
        if (auto derived = derive_args(payload, ctx,
                                       R"(Schema: {"language": "python" or "shell", "source": script text}.)")) {
            args = *derived;
        }
    }
    if (!args.is_object() || !args.contains("source") || !args["source"].is_string()) {
        return agents::AgentFailure{"InvalidArgument", "coder needs args.source", false};
    }
    const auto lang = script_lang_from_string(args.value("language", std::string("python")));
    ctx.heartbeat("executing");
    const auto r = run_script(args["source"].get<std::string>(), lang, ctx.grants(), interpreters_);
    Json data{{"stdout", r.stdout_text},
              {"stderr", r.stderr_text},
              {"exit_code", r.exit_code},
              {"duration_ms", r.duration_ms},
              {"truncated", r.truncated}};
    if (r.exit_code != 0) {
        return agents::AgentFailure{"ScriptFailed",
                                    "exit " + std::to_string(r.exit_code) + ": " + r.stderr_text.substr(0, 500),
                                    false};
    }
    agents::AgentOutput out;
    out.summary = r.stdout_text;
    out.data = std::move(data);
    return out;
}

agents::AgentManifest coder_manifest(const fs::path& jail_root) {
    agents::AgentManifest m;
    m.id = "coder";
    m.display_name = "Coder";
    m.capabilities = {agents::cap::code_exec};
    m.grants.fs_jail_root = jail_root;
    m.grants.allow_exec = true;
    m.grants.max_runtime_ms = 20000;
    m.heartbeat_capable = true;
    m.description = "Writes and runs scripts inside its jail";
    return m;
}

}  // namespace autonoma::builtin
