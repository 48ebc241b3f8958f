#pragma once

#include "autonoma/model/types.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::store {

// Summary row of a persisted conversation. File references are fixed by the
// layout and written into meta.json for readers that only see the tree.
struct ConversationRecord {
    std::string id;
    std::string title;
    TimestampMs created_at = 0;
    model::WorkflowState state;  // must equal replay(events)

    bool operator==(const ConversationRecord&) const = default;
};

struct Conversation {
    ConversationRecord record;
    std::vector<model::Message> messages;
    std::vector<model::WorkflowEvent> events;

    bool operator==(const Conversation&) const = default;
};

struct StoredPaths {
    std::filesystem::path dir;
    std::filesystem::path meta;
    std::filesystem::path messages;
    std::filesystem::path events;
    std::filesystem::path artifacts;
    std::filesystem::path screenshots;
};

// Named points inside persist_conversation where tests can inject a crash by
// throwing from the hook.
enum class PersistPoint { temps_written, marker_committed, file_renamed };

using PersistHook = std::function<void(PersistPoint, const std::string& detail)>;

class ConversationStore {
public:
    virtual ~ConversationStore() = default;

    virtual StoredPaths persist_conversation(const Conversation& c) = 0;
    virtual Conversation load_conversation(const std::string& id) = 0;
    virtual bool exists(const std::string& id) = 0;
    virtual std::vector<ConversationRecord> list_conversations() = 0;

    // Returns the reference stored in Message::attachments ("artifacts/<name>").
    virtual std::string write_artifact(const std::string& id, const std::string& name, std::string_view bytes) = 0;
    virtual std::string write_screenshot(const std::string& id, const std::string& name, std::string_view bytes) = 0;
    virtual void append_artifact_line(const std::string& id, const std::string& name, std::string_view line) = 0;
    virtual std::filesystem::path artifact_dir(const std::string& id) = 0;
};

// Flat-file store rooted at `root`:
//   <root>/conversations/<id>/{meta.json, messages.jsonl, events.jsonl, artifacts/, screenshots/}
//   <root>/audit/audit.jsonl
class FileStore final : public ConversationStore {
public:
    explicit FileStore(std::filesystem::path root);

    StoredPaths persist_conversation(const Conversation& c) override;
    Conversation load_conversation(const std::string& id) override;
    bool exists(const std::string& id) override;
    std::vector<ConversationRecord> list_conversations() override;

    std::string write_artifact(const std::string& id, const std::string& name, std::string_view bytes) override;
    std::string write_screenshot(const std::string& id, const std::string& name, std::string_view bytes) override;
    void append_artifact_line(const std::string& id, const std::string& name, std::string_view line) override;
    std::filesystem::path artifact_dir(const std::string& id) override;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path audit_path() const { return root_ / "audit" / "audit.jsonl"; }

    void set_persist_hook(PersistHook hook) { hook_ = std::move(hook); }

private:
    std::filesystem::path conv_dir(const std::string& id) const;
    void recover(const std::filesystem::path& dir);
    std::string write_blob(const std::string& id, const char* sub, const std::string& name, std::string_view bytes);

    std::filesystem::path root_;
    PersistHook hook_;
    std::mutex mu_;
};

// Serialized forms, exposed for tests and tools.
std::string serialize_meta(const ConversationRecord& r);
std::string serialize_messages(const std::vector<model::Message>& messages);
std::string serialize_events(const std::vector<model::WorkflowEvent>& events);
ConversationRecord parse_meta(std::string_view text);

// Strict JSONL decoders. Errors carry the byte offset of the first bad line.
std::vector<model::Message> parse_messages(std::string_view text);
std::vector<model::WorkflowEvent> parse_events(std::string_view text);

// Durable whole-file write (fsync). ENOSPC/EDQUOT map to StorageFull.
void write_file_durable(const std::filesystem::path& path, std::string_view data);
std::string read_file(const std::filesystem::path& path);

}  // namespace autonoma::store
