#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace autonoma::agents {

// Confines paths to a root directory. Inputs are jail-relative with `/`
// separators; backslashes are treated as separators, absolute and
// drive-qualified paths are rejected, and symlinks are resolved before the
// containment check.
class Jail {
public:
    explicit Jail(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    // Host path for a jail-relative path. Throws JailEscape.
    std::filesystem::path resolve(std::string_view relative) const;

    // Jail-relative form of a host path inside the jail.
    std::string relative(const std::filesystem::path& host) const;

    bool contains(const std::filesystem::path& host) const;

private:
    std::filesystem::path root_;  // canonical
};

}  // namespace autonoma::agents
