#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace piloc {

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace piloc
