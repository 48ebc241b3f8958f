#include "autonoma/builtin/file_manager.hpp"

#include "autonoma/builtin/derive_args.hpp"
#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace autonoma::builtin {

namespace {

constexpr FileOpKind kKinds[] = {FileOpKind::copy, FileOpKind::move,  FileOpKind::remove, FileOpKind::search,
                                 FileOpKind::list, FileOpKind::read, FileOpKind::write};

std::size_t arity(FileOpKind k) { return (k == FileOpKind::copy || k == FileOpKind::move) ? 2 : 1; }

void check_arity(const FileOp& op) {
    if (op.paths.size() != arity(op.kind)) {
        throw Error(Errc::invalid_argument, std::string(to_string(op.kind)) + " takes " +
                                                std::to_string(arity(op.kind)) + " path(s)");
    }
}

bool exists_nofollow(const fs::path& p) {
    std::error_code ec;
    return fs::exists(fs::symlink_status(p, ec));
}

void require(const fs::path& p, const std::string& rel) {
    if (!exists_nofollow(p)) throw Error(Errc::not_found, "no such file or directory: " + rel);
}

}  // namespace

std::string_view to_string(FileOpKind k) {
    switch (k) {
        case FileOpKind::copy: return "copy";
        case FileOpKind::move: return "move";
        case FileOpKind::remove: return "delete";
        case FileOpKind::search: return "search";
        case FileOpKind::list: return "list";
        case FileOpKind::read: return "read";
        case FileOpKind::write: return "write";
    }
    return "list";
}

FileOpKind file_op_kind_from_string(std::string_view s) {
    for (auto k : kKinds) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::invalid_argument, "unknown file operation: " + std::string(s));
}

std::string action_digest(const FileOp& op) {
    Json j{{"kind", to_string(op.kind)}, {"paths", op.paths}, {"content_digest", sha256_hex(op.content)}};
    return sha256_hex(canonical_dump(j));
}

std::string describe(const FileOp& op) {
    std::string s(to_string(op.kind));
    for (const auto& p : op.paths) s += " " + p;
    return s;
}

bool is_destructive(const FileOp& op, const agents::Jail& jail) {
    switch (op.kind) {
        case FileOpKind::remove:
        case FileOpKind::move: return true;
        case FileOpKind::write: return exists_nofollow(jail.resolve(op.paths.at(0)));
        case FileOpKind::copy: return exists_nofollow(jail.resolve(op.paths.at(1)));
        default: return false;
    }
}

FileOpResult execute_fileop(const FileOp& op, const agents::Jail& jail,
                            const std::function<bool(const std::string&)>& approve) {
    check_arity(op);
    // Resolve every path before touching anything.
    std::vector<fs::path> host;
    for (const auto& p : op.paths) host.push_back(jail.resolve(p));

    FileOpResult result;
    result.digest = action_digest(op);
    if (is_destructive(op, jail) && !(approve && approve(result.digest))) {
        result.status = FileOpResult::Status::pending_approval;
        return result;
    }

    std::error_code ec;
    switch (op.kind) {
        case FileOpKind::list: {
            require(host[0], op.paths[0]);
            if (!fs::is_directory(host[0])) throw Error(Errc::invalid_argument, "not a directory: " + op.paths[0]);
            for (const auto& e : fs::directory_iterator(host[0])) {
                auto name = e.path().filename().string();
                if (!e.is_symlink(ec) && e.is_directory(ec)) name += "/";
                result.entries.push_back(std::move(name));
            }
            std::sort(result.entries.begin(), result.entries.end());
            break;
        }
        case FileOpKind::search: {
            require(host[0], op.paths[0]);
            for (auto it = fs::recursive_directory_iterator(host[0], ec); it != fs::recursive_directory_iterator();
                 it.increment(ec)) {
                if (it->path().filename().string().find(op.content) != std::string::npos) {
                    result.entries.push_back(jail.relative(it->path()));
                }
            }
            std::sort(result.entries.begin(), result.entries.end());
            break;
        }
        case FileOpKind::read: {
            require(host[0], op.paths[0]);
            if (!fs::is_regular_file(host[0])) throw Error(Errc::invalid_argument, "not a file: " + op.paths[0]);
            std::ifstream in(host[0], std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            result.content = ss.str();
            break;
        }
        case FileOpKind::write: {
            if (!fs::is_directory(host[0].parent_path())) {
                throw Error(Errc::not_found, "parent directory missing: " + op.paths[0]);
            }
            if (fs::is_directory(host[0])) throw Error(Errc::invalid_argument, "is a directory: " + op.paths[0]);
            std::ofstream out(host[0], std::ios::binary | std::ios::trunc);
            if (!out) throw Error(Errc::io_error, "cannot write " + op.paths[0]);
            out << op.content;
            break;
        }
        case FileOpKind::copy: {
            require(host[0], op.paths[0]);
            if (fs::is_directory(host[0])) {
                fs::copy(host[0], host[1],
                         fs::copy_options::recursive | fs::copy_options::overwrite_existing |
                             fs::copy_options::copy_symlinks,
                         ec);
            } else {
                fs::copy_file(host[0], host[1], fs::copy_options::overwrite_existing, ec);
            }
            if (ec) throw Error(Errc::io_error, "copy failed: " + ec.message());
            break;
        }
        case FileOpKind::move: {
            require(host[0], op.paths[0]);
            if (host[0] == jail.root()) throw Error(Errc::invalid_argument, "cannot move the jail root");
            fs::rename(host[0], host[1], ec);
            if (ec) throw Error(Errc::io_error, "move failed: " + ec.message());
            break;
        }
        case FileOpKind::remove: {
            require(host[0], op.paths[0]);
            if (host[0] == jail.root()) throw Error(Errc::invalid_argument, "cannot delete the jail root");
            fs::remove_all(host[0], ec);
            if (ec) throw Error(Errc::io_error, "delete failed: " + ec.message());
            break;
        }
    }
    return result;
}

FileOp file_op_from_args(const Json& args) {
    if (!args.is_object() || !args.contains("op")) throw Error(Errc::invalid_argument, "file op needs args.op");
    FileOp op;
    op.kind = file_op_kind_from_string(args["op"].get<std::string>());
    op.paths.push_back(args.value("path", std::string(".")));
    if (arity(op.kind) == 2) op.paths.push_back(args.value("destination", std::string{}));
    op.content = op.kind == FileOpKind::search ? args.value("pattern", std::string{})
                                               : args.value("content", std::string{});
    return op;
}

agents::AgentOutcome FileManagerAgent::run(const agents::TaskPayload& payload, agents::TaskContext& ctx) {
    if (!ctx.grants().fs_jail_root) throw Error(Errc::privilege_violation, "no filesystem jail granted");
    const agents::Jail jail(*ctx.grants().fs_jail_root);
    Json args = payload.args;
    if (args.is_object() && args.empty()) {
        if (auto cached = cache_.find(payload)) {
            args = *cached;
        } else if (auto derived = derive_args(
                       payload, ctx,
                       R"(Schema: {"op": "copy"|"move"|"remove"|"search"|"list"|"read"|"write", "path": jail-relative )"
                       R"(path, "destination": for copy/move, "content": for write, "pattern": for search}.)")) {
            args = *derived;
            cache_.put(payload, args);
        }
    }
    const auto op = file_op_from_args(args);
    const auto r = execute_fileop(op, jail, [&](const std::string& d) { return ctx.redeem_approval(d); });
    if (r.status == FileOpResult::Status::pending_approval) return agents::ApprovalNeeded{r.digest, describe(op)};
    agents::AgentOutput out;
    out.summary = describe(op) + ": done";
    if (op.kind == FileOpKind::read) out.summary = r.content;
    if (!r.entries.empty()) {
        for (const auto& e : r.entries) out.summary += "\n" + e;
    }
    out.data = Json{{"op", to_string(op.kind)}, {"paths", op.paths}, {"entries", r.entries}, {"digest", r.digest}};
    return out;
}

agents::AgentManifest file_manager_manifest(const fs::path& jail_root) {
    agents::AgentManifest m;
    m.id = "file_manager";
    m.display_name = "File manager";
    m.capabilities = {agents::cap::file_ops};
    m.grants.fs_jail_root = jail_root;
    m.heartbeat_capable = false;
    m.description = "Copies, moves, deletes, searches, lists, reads and writes files inside its jail";
    return m;
}

}  // namespace autonoma::builtin
