#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/jail.hpp"
#include "autonoma/builtin/derive_args.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace autonoma::builtin {

enum class FileOpKind { copy, move, remove, search, list, read, write };

std::string_view to_string(FileOpKind k);
FileOpKind file_op_kind_from_string(std::string_view s);

struct FileOp {
    FileOpKind kind = FileOpKind::list;
    std::vector<std::string> paths;  // jail-relative; copy/move take {source, destination}
    std::string content;             // write payload, or search pattern
};

// Content digest of the operation, the value an approval binds to.
std::string action_digest(const FileOp& op);
std::string describe(const FileOp& op);

struct FileOpResult {
    enum class Status { done, pending_approval } status = Status::done;
    std::string digest;
    std::vector<std::string> entries;  // list/search results
    std::string content;               // read result
};

// Destructive means delete, move, or overwriting an existing file via write
// or copy. Depends on the current filesystem.
bool is_destructive(const FileOp& op, const agents::Jail& jail);

// Non-destructive ops run immediately. Destructive ops run only when
// `approve(digest)` returns true; otherwise PendingApproval with no effect.
// Throws JailEscape, NotFound, InvalidArgument.
FileOpResult execute_fileop(const FileOp& op, const agents::Jail& jail,
                            const std::function<bool(const std::string&)>& approve = {});

// args: {"op": kind, "path": p, "destination": d, "content": c, "pattern": s}
// Without args, derives them from the description through the agent-role
// backend, once per attempt.
class FileManagerAgent final : public agents::Agent {
public:
    agents::AgentOutcome run(const agents::TaskPayload& payload, agents::TaskContext& ctx) override;

private:
    ArgsCache cache_;
};

FileOp file_op_from_args(const Json& args);

agents::AgentManifest file_manager_manifest(const std::filesystem::path& jail_root);

}  // namespace autonoma::builtin
