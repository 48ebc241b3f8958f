#include "autonoma/store/audit.hpp"

#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/common/json.hpp"
#include "autonoma/store/store.hpp"
#include "file_io.hpp"

#include <fstream>

namespace fs = std::filesystem;

namespace autonoma::store {

namespace {

Json hashed_fields(const AuditRecord& r) {
    return Json{{"seq", r.seq},
                {"timestamp", r.timestamp},
                {"actor", r.actor},
                {"action", r.action},
                {"input_digest", r.input_digest},
                {"output_digest", r.output_digest}};
}

std::optional<AuditRecord> decode(std::string_view line) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.size() != 8) return std::nullopt;
    auto str = [&](const char* k) { return j.contains(k) && j[k].is_string(); };
    if (!j.contains("seq") || !j["seq"].is_number_unsigned() || !j.contains("timestamp") ||
        !j["timestamp"].is_number_integer() || !str("actor") || !str("action") || !str("input_digest") ||
        !str("output_digest") || !str("prev_hash") || !str("this_hash")) {
        return std::nullopt;
    }
    AuditRecord r;
    r.seq = j["seq"].get<std::uint64_t>();
    r.timestamp = j["timestamp"].get<TimestampMs>();
    r.actor = j["actor"].get<std::string>();
    r.action = j["action"].get<std::string>();
    r.input_digest = j["input_digest"].get<std::string>();
    r.output_digest = j["output_digest"].get<std::string>();
    r.prev_hash = j["prev_hash"].get<std::string>();
    r.this_hash = j["this_hash"].get<std::string>();
    return r;
}

}  // namespace

std::string compute_audit_hash(const AuditRecord& r) {
    return sha256_hex(r.prev_hash + canonical_dump(hashed_fields(r)));
}

std::string serialize_audit(const AuditRecord& r) {
    Json j = hashed_fields(r);
    j["prev_hash"] = r.prev_hash;
    j["this_hash"] = r.this_hash;
    return canonical_dump(j);
}

AuditVerdict verify_audit(std::string_view log) {
    std::string prev = kGenesisHash;
    std::size_t pos = 0;
    std::size_t index = 0;
    auto bad = [&](std::string reason) { return AuditVerdict{false, index, std::move(reason)}; };
    while (pos < log.size()) {
        const auto nl = log.find('\n', pos);
        if (nl == std::string_view::npos) return bad("unterminated record");
        const auto line = log.substr(pos, nl - pos);
        const auto rec = decode(line);
        if (!rec) return bad("undecodable record");
        if (serialize_audit(*rec) != line) return bad("record is not in canonical form");
        if (rec->seq != index + 1) return bad("unexpected seq");
        if (rec->prev_hash != prev) return bad("broken link to previous record");
        if (compute_audit_hash(*rec) != rec->this_hash) return bad("hash mismatch");
        prev = rec->this_hash;
        pos = nl + 1;
        ++index;
    }
    return AuditVerdict{};
}

AuditVerdict verify_audit_file(const fs::path& path) {
    if (!fs::exists(path)) return AuditVerdict{};
    return verify_audit(read_file(path));
}

AuditLog::AuditLog(fs::path path) : path_(std::move(path)) {
    std::error_code ec;
    fs::create_directories(path_.parent_path(), ec);
    head_ = read_head();
}

AuditLog::Head AuditLog::read_head() const {
    Head h;
    std::error_code ec;
    if (!fs::exists(path_, ec)) return h;
    h.bytes = fs::file_size(path_, ec);
    if (h.bytes == 0) return h;

    // The last record sits at the end of the file; read a bounded tail.
    std::ifstream in(path_, std::ios::binary);
    const std::uintmax_t window = std::min<std::uintmax_t>(h.bytes, 1 << 16);
    in.seekg(static_cast<std::streamoff>(h.bytes - window));
    std::string tail(window, '\0');
    in.read(tail.data(), static_cast<std::streamsize>(window));
    if (tail.empty() || tail.back() != '\n') {
        throw Error(Errc::chain_head_mismatch, "audit log ends with a partial record");
    }
    const auto start = tail.rfind('\n', tail.size() - 2);
    const auto line = std::string_view(tail).substr(start == std::string::npos ? 0 : start + 1);
    const auto rec = decode(line.substr(0, line.size() - 1));
    if (!rec) throw Error(Errc::chain_head_mismatch, "audit log head is undecodable");
    h.seq = rec->seq;
    h.hash = rec->this_hash;
    return h;
}

AuditRecord AuditLog::append(const AuditEntry& entry) {
    std::lock_guard lock(mu_);
    const auto disk = read_head();
    if (disk.bytes != head_.bytes || disk.seq != head_.seq || disk.hash != head_.hash) {
        throw Error(Errc::chain_head_mismatch, "audit log changed underneath the appender");
    }
    AuditRecord r;
    r.seq = head_.seq + 1;
    r.timestamp = entry.timestamp;
    r.actor = entry.actor;
    r.action = entry.action;
    r.input_digest = entry.input_digest;
    r.output_digest = entry.output_digest;
    r.prev_hash = head_.seq == 0 ? kGenesisHash : head_.hash;
    r.this_hash = compute_audit_hash(r);
    const auto line = serialize_audit(r) + "\n";
    append_file_durable(path_, line);
    head_.seq = r.seq;
    head_.hash = r.this_hash;
    head_.bytes += line.size();
    return r;
}

std::uint64_t AuditLog::size() const {
    std::lock_guard lock(mu_);
    return head_.seq;
}

}  // namespace autonoma::store
