#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace codeedu::session {

enum class Level { low, medium, high };

std::string_view to_string(Level level);
Level level_from_string(std::string_view text);

struct StudentProfile {
    std::string background;
    std::string goals;
    Level self_reported_level = Level::low;
    std::vector<std::string> preferred_topics;

    bool operator==(const StudentProfile&) const = default;
};

void to_json(nlohmann::json& j, const StudentProfile& p);
void from_json(const nlohmann::json& j, StudentProfile& p);

} // namespace codeedu::session
