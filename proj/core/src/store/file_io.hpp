#pragma once

#include <filesystem>
#include <string_view>

namespace autonoma::store {

void append_file_durable(const std::filesystem::path& path, std::string_view data);
void fsync_dir(const std::filesystem::path& dir);

}  // namespace autonoma::store
