#include "autonoma/agents/jail.hpp"

#include "autonoma/common/error.hpp"

#include <cctype>
#include <deque>
#include <vector>

namespace fs = std::filesystem;

namespace autonoma::agents {

Jail::Jail(fs::path root) {
    std::error_code ec;
    fs::create_directories(root, ec);
    root_ = fs::canonical(root, ec);
    if (ec) throw Error(Errc::not_found, "jail root unavailable: " + root.string());
}

bool Jail::contains(const fs::path& host) const {
    auto rit = root_.begin();
    auto hit = host.begin();
    for (; rit != root_.end(); ++rit, ++hit) {
        if (hit == host.end() || *rit != *hit) return false;
    }
    return true;
}

fs::path Jail::resolve(std::string_view relative) const {
    std::string rel(relative);
    if (rel.find('\0') != std::string::npos) throw Error(Errc::jail_escape, "path contains NUL");
    for (auto& c : rel) {
        if (c == '\\') c = '/';
    }
    if (!rel.empty() && rel.front() == '/') throw Error(Errc::jail_escape, "absolute path: " + std::string(relative));
    if (rel.size() >= 2 && rel[1] == ':' && std::isalpha(static_cast<unsigned char>(rel[0]))) {
        throw Error(Errc::jail_escape, "drive-qualified path: " + std::string(relative));
    }
    const auto lexical = fs::path(rel.empty() ? "." : rel).lexically_normal();
    if (!lexical.empty() && *lexical.begin() == "..") {
        throw Error(Errc::jail_escape, "path leaves the jail: " + std::string(relative));
    }
    // Resolve component by component the way the kernel would, following
    // symlinks (including dangling ones) so a link cannot smuggle a write
    // outside the root.
    std::deque<std::string> todo;
    for (const auto& c : lexical) todo.push_back(c.string());
    fs::path host = root_;
    int links = 0;
    while (!todo.empty()) {
        const auto c = todo.front();
        todo.pop_front();
        if (c.empty() || c == ".") continue;
        if (c == "..") {
            host = host.parent_path();
            continue;
        }
        const auto next = host / c;
        std::error_code ec;
        const auto st = fs::symlink_status(next, ec);
        if (!ec && fs::is_symlink(st)) {
            if (++links > 40) throw Error(Errc::jail_escape, "too many symlinks: " + std::string(relative));
            const auto target = fs::read_symlink(next, ec);
            if (ec) throw Error(Errc::jail_escape, "unreadable symlink: " + std::string(relative));
            if (target.is_absolute()) host = target.root_path();
            std::vector<std::string> parts;
            for (const auto& t : target.relative_path()) parts.push_back(t.string());
            todo.insert(todo.begin(), parts.begin(), parts.end());
            continue;
        }
        host = next;
    }
    if (!contains(host)) throw Error(Errc::jail_escape, "path resolves outside the jail: " + std::string(relative));
    return host;
}

std::string Jail::relative(const fs::path& host) const {
    const auto r = host.lexically_relative(root_).generic_string();
    return r.empty() ? "." : r;
}

}  // namespace autonoma::agents
