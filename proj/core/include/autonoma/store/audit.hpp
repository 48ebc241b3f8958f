#pragma once

#include "autonoma/common/clock.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::store {

struct AuditRecord {
    std::uint64_t seq = 0;  // 1-based
    TimestampMs timestamp = 0;
    std::string actor;
    std::string action;
    std::string input_digest;
    std::string output_digest;
    std::string prev_hash;
    std::string this_hash;

    bool operator==(const AuditRecord&) const = default;
};

struct AuditEntry {
    TimestampMs timestamp = 0;
    std::string actor;
    std::string action;
    std::string input_digest;
    std::string output_digest;
};

inline const std::string kGenesisHash(64, '0');

std::string compute_audit_hash(const AuditRecord& r);
std::string serialize_audit(const AuditRecord& r);

struct AuditVerdict {
    bool valid = true;
    std::size_t first_bad_index = 0;  // 0-based line index when invalid
    std::string reason;
};

// Full recomputation. Each line must be the canonical serialization of its
// record, the seq must count from 1, links must match and every hash must
// recompute.
AuditVerdict verify_audit(std::string_view log);
AuditVerdict verify_audit_file(const std::filesystem::path& path);

// Process-wide serialized appender. Detects foreign writers by checking the
// on-disk head before every append.
class AuditLog {
public:
    explicit AuditLog(std::filesystem::path path);

    AuditRecord append(const AuditEntry& entry);
    std::uint64_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    struct Head {
        std::uint64_t seq = 0;
        std::string hash;
        std::uintmax_t bytes = 0;
    };
    Head read_head() const;

    std::filesystem::path path_;
    mutable std::mutex mu_;
    Head head_;
};

}  // namespace autonoma::store
