#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/model/serialization.hpp"
#include "autonoma/model/state_machine.hpp"
#include "autonoma/store/store.hpp"
#include "file_io.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace autonoma::store {

namespace {

constexpr const char* kMeta = "meta.json";
constexpr const char* kMessages = "messages.jsonl";
constexpr const char* kEvents = "events.jsonl";
constexpr const char* kMarker = "COMMIT";
constexpr const char* kFiles[] = {kMeta, kMessages, kEvents};

template <typename T, typename Parse>
std::vector<T> parse_lines(std::string_view text, const char* file, Parse parse) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw Error(Errc::corrupt, std::string(file) + ": truncated line at byte " + std::to_string(pos), pos);
        }
        const auto line = text.substr(pos, nl - pos);
        try {
            if (line.empty()) throw Error(Errc::corrupt, "empty line");
            out.push_back(parse(line, out.size()));
        } catch (const Error& e) {
            throw Error(Errc::corrupt, std::string(file) + ": bad line at byte " + std::to_string(pos) + ": " + e.what(),
                        pos);
        }
        pos = nl + 1;
    }
    return out;
}

Json parse_json_line(std::string_view line) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::corrupt, "invalid JSON");
    return j;
}

void check_name(const std::string& name) {
    if (name.empty() || name == "." || name == ".." || name.find_first_of("/\\") != std::string::npos ||
        name.find('\0') != std::string::npos) {
        throw Error(Errc::invalid_argument, "invalid artifact name: " + name);
    }
}

}  // namespace

std::string serialize_meta(const ConversationRecord& r) {
    Json j{{"id", r.id},
           {"title", r.title},
           {"created_at", r.created_at},
           {"messages", kMessages},
           {"events", kEvents},
           {"artifacts", "artifacts/"},
           {"screenshots", "screenshots/"},
           {"state", r.state}};
    return canonical_dump(j) + "\n";
}

ConversationRecord parse_meta(std::string_view text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::corrupt, "meta.json is not a JSON object", 0);
    try {
        ConversationRecord r;
        if (!j.at("id").is_string() || !j.at("title").is_string() || !j.at("created_at").is_number_integer()) {
            throw Error(Errc::corrupt, "meta.json field types");
        }
        r.id = j["id"].get<std::string>();
        r.title = j["title"].get<std::string>();
        r.created_at = j["created_at"].get<TimestampMs>();
        r.state = j.at("state").get<model::WorkflowState>();
        return r;
    } catch (const Json::exception& e) {
        throw Error(Errc::corrupt, std::string("meta.json: ") + e.what(), 0);
    } catch (const Error& e) {
        throw Error(Errc::corrupt, std::string("meta.json: ") + e.what(), 0);
    }
}

std::string serialize_messages(const std::vector<model::Message>& messages) {
    std::string out;
    for (const auto& m : messages) {
        out += canonical_dump(Json(m));
        out += '\n';
    }
    return out;
}

std::string serialize_events(const std::vector<model::WorkflowEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += model::serialize_event(e);
        out += '\n';
    }
    return out;
}

std::vector<model::Message> parse_messages(std::string_view text) {
    return parse_lines<model::Message>(text, kMessages, [](std::string_view line, std::size_t) {
        return parse_json_line(line).get<model::Message>();
    });
}

std::vector<model::WorkflowEvent> parse_events(std::string_view text) {
    return parse_lines<model::WorkflowEvent>(text, kEvents, [](std::string_view line, std::size_t index) {
        auto e = model::parse_event(line);
        if (e.seq != index + 1) {
            throw Error(Errc::corrupt, "sequence gap: expected " + std::to_string(index + 1) + ", found " +
                                           std::to_string(e.seq));
        }
        return e;
    });
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {}

fs::path FileStore::conv_dir(const std::string& id) const {
    if (!is_lowercase_uuid(id)) throw Error(Errc::invalid_argument, "malformed conversation id: " + id);
    return root_ / "conversations" / id;
}

// Rolls a half-finished persist forward when the commit marker exists,
// otherwise discards leftovers so the previous files stay authoritative.
void FileStore::recover(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir / kMarker)) {
        for (const char* f : kFiles) {
            const auto tmp = dir / (std::string(f) + ".tmp");
            if (fs::exists(tmp)) fs::rename(tmp, dir / f);
        }
        fs::remove(dir / kMarker);
        fsync_dir(dir);
        return;
    }
    for (const char* f : kFiles) fs::remove(dir / (std::string(f) + ".tmp"), ec);
    fs::remove(dir / (std::string(kMarker) + ".tmp"), ec);
}

StoredPaths FileStore::persist_conversation(const Conversation& c) {
    const auto dir = conv_dir(c.record.id);
    for (std::size_t i = 0; i < c.events.size(); ++i) {
        if (c.events[i].seq != i + 1) throw Error(Errc::invalid_argument, "event log has a sequence gap");
    }

    const std::string meta = serialize_meta(c.record);
    const std::string messages = serialize_messages(c.messages);
    const std::string events = serialize_events(c.events);

    std::lock_guard lock(mu_);
    std::error_code ec;
    fs::create_directories(dir / "artifacts", ec);
    fs::create_directories(dir / "screenshots", ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    recover(dir);

    StoredPaths paths{dir, dir / kMeta, dir / kMessages, dir / kEvents, dir / "artifacts", dir / "screenshots"};

    if (fs::exists(paths.meta)) {
        std::string old_meta, old_messages, old_events;
        try {
            old_meta = read_file(paths.meta);
            old_messages = fs::exists(paths.messages) ? read_file(paths.messages) : std::string();
            old_events = fs::exists(paths.events) ? read_file(paths.events) : std::string();
            parse_meta(old_meta);
            parse_messages(old_messages);
            parse_events(old_events);
        } catch (const Error& e) {
            throw Error(Errc::corrupt_existing, "refusing to overwrite undecodable state: " + std::string(e.what()));
        }
        if (old_meta == meta && old_messages == messages && old_events == events) return paths;
    }

    const std::string_view contents[] = {meta, messages, events};
    for (std::size_t i = 0; i < 3; ++i) {
        write_file_durable(dir / (std::string(kFiles[i]) + ".tmp"), contents[i]);
    }
    if (hook_) hook_(PersistPoint::temps_written, "");

    write_file_durable(dir / (std::string(kMarker) + ".tmp"), "meta.json messages.jsonl events.jsonl\n");
    fs::rename(dir / (std::string(kMarker) + ".tmp"), dir / kMarker);
    fsync_dir(dir);
    if (hook_) hook_(PersistPoint::marker_committed, "");

    for (const char* f : kFiles) {
        fs::rename(dir / (std::string(f) + ".tmp"), dir / f);
        if (hook_) hook_(PersistPoint::file_renamed, f);
    }
    fs::remove(dir / kMarker);
    fsync_dir(dir);
    return paths;
}

Conversation FileStore::load_conversation(const std::string& id) {
    const auto dir = conv_dir(id);
    std::lock_guard lock(mu_);
    if (!fs::is_directory(dir)) throw Error(Errc::not_found, "unknown conversation " + id);
    recover(dir);
    if (!fs::exists(dir / kMeta)) throw Error(Errc::not_found, "unknown conversation " + id);

    Conversation c;
    c.record = parse_meta(read_file(dir / kMeta));
    if (c.record.id != id) throw Error(Errc::corrupt, "meta.json id does not match directory", 0);
    c.messages = parse_messages(read_file(dir / kMessages));
    const auto events_text = read_file(dir / kEvents);
    c.events = parse_events(events_text);

    model::WorkflowState replayed;
    try {
        replayed = model::replay(c.events);
    } catch (const Error& e) {
        throw Error(Errc::corrupt, std::string("events.jsonl does not replay: ") + e.what(), events_text.size());
    }
    if (replayed != c.record.state) {
        throw Error(Errc::corrupt, "events.jsonl does not reproduce the recorded state", events_text.size());
    }
    return c;
}

bool FileStore::exists(const std::string& id) {
    if (!is_lowercase_uuid(id)) return false;
    const auto dir = root_ / "conversations" / id;
    return fs::exists(dir / kMeta) || fs::exists(dir / kMarker);
}

std::vector<ConversationRecord> FileStore::list_conversations() {
    std::vector<ConversationRecord> out;
    const auto base = root_ / "conversations";
    std::error_code ec;
    if (!fs::is_directory(base, ec)) return out;
    std::lock_guard lock(mu_);
    for (const auto& entry : fs::directory_iterator(base, ec)) {
        const auto name = entry.path().filename().string();
        if (!is_lowercase_uuid(name)) continue;
        try {
            recover(entry.path());
            out.push_back(parse_meta(read_file(entry.path() / kMeta)));
        } catch (const Error&) {
            continue;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    return out;
}

std::string FileStore::write_blob(const std::string& id, const char* sub, const std::string& name,
                                  std::string_view bytes) {
    check_name(name);
    const auto dir = conv_dir(id) / sub;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    const auto tmp = dir / (name + ".tmp");
    write_file_durable(tmp, bytes);
    fs::rename(tmp, dir / name);
    return std::string(sub) + "/" + name;
}

std::string FileStore::write_artifact(const std::string& id, const std::string& name, std::string_view bytes) {
    return write_blob(id, "artifacts", name, bytes);
}

std::string FileStore::write_screenshot(const std::string& id, const std::string& name, std::string_view bytes) {
    return write_blob(id, "screenshots", name, bytes);
}

void FileStore::append_artifact_line(const std::string& id, const std::string& name, std::string_view line) {
    check_name(name);
    const auto dir = conv_dir(id) / "artifacts";
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::string data(line);
    data.push_back('\n');
    append_file_durable(dir / name, data);
}

fs::path FileStore::artifact_dir(const std::string& id) { return conv_dir(id) / "artifacts"; }

}  // namespace autonoma::store
