#include "codeedu/tools/file_io.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <sstream>

namespace codeedu::tools {

namespace fs = std::filesystem;

fs::path confine(const fs::path& root, const std::string& path) {
    require(!path.empty(), "file path must be non-empty");
    fs::path base = fs::weakly_canonical(root);
    fs::path candidate = fs::weakly_canonical(base / fs::path(path));
    auto rel = candidate.lexically_relative(base);
    if (rel.empty() || rel == "." || *rel.begin() == "..")
        fail(ErrorKind::path_escape, "path '" + path + "' resolves outside the workspace");
    return candidate;
}

std::optional<std::string> file_io(const fs::path& workspace_root, FileMode mode, const std::string& path,
                                   const std::optional<std::string>& content) {
    fs::path target = confine(workspace_root, path);
    if (mode == FileMode::read) {
        std::ifstream in(target, std::ios::binary);
        if (!in || fs::is_directory(target)) fail(ErrorKind::not_found, "no such file: " + path);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
    require(content.has_value(), "file_io write needs content");
    fs::create_directories(target.parent_path());
    fs::path temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << *content;
        out.flush();
        if (!out) fail(ErrorKind::tool_failure, "cannot write " + path);
    }
    fs::rename(temp, target);
    return std::nullopt;
}

} // namespace codeedu::tools
