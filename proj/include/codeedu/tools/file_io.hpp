#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace codeedu::tools {

enum class FileMode { read, write };

// Resolves `path` under `root`; throws path_escape when it lands outside.
std::filesystem::path confine(const std::filesystem::path& root, const std::string& path);

// Read returns the contents; write returns nothing and replaces the file
// atomically (temp file + rename).
std::optional<std::string> file_io(const std::filesystem::path& workspace_root, FileMode mode,
                                   const std::string& path,
                                   const std::optional<std::string>& content = std::nullopt);

} // namespace codeedu::tools
