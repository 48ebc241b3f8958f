#pragma once

#include "autonoma/common/digest.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

namespace testing_support {

class TempDir {
public:
    TempDir() : path_(std::filesystem::temp_directory_path() / ("autonoma-test-" + autonoma::random_uuid())) {
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Snapshot of a tree: relative path -> content digest ("<dir>" / "<link>").
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    std::error_code ec;
    if (!std::filesystem::exists(root, ec)) return out;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        const auto rel = it->path().lexically_relative(root).string();
        if (it->is_symlink()) {
            out[rel] = "<link>" + std::filesystem::read_symlink(it->path()).string();
        } else if (it->is_directory()) {
            out[rel] = "<dir>";
        } else {
            std::ifstream in(it->path(), std::ios::binary);
            std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            out[rel] = autonoma::sha256_hex(data);
        }
    }
    return out;
}

}  // namespace testing_support
