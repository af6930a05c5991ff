#include "codeedu/session/profile.hpp"

#include "codeedu/error.hpp"

namespace codeedu::session {

std::string_view to_string(Level level) {
    switch (level) {
        case Level::low: return "low";
        case Level::medium: return "medium";
        case Level::high: return "high";
    }
    return "low";
}

Level level_from_string(std::string_view text) {
    if (text == "low") return Level::low;
    if (text == "medium") return Level::medium;
    if (text == "high") return Level::high;
    fail(ErrorKind::precondition, "level must be low, medium or high, got '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const StudentProfile& p) {
    j = {{"background", p.background},
         {"goals", p.goals},
         {"self_reported_level", to_string(p.self_reported_level)},
         {"preferred_topics", p.preferred_topics}};
}

void from_json(const nlohmann::json& j, StudentProfile& p) {
    p.background = j.at("background").get<std::string>();
    p.goals = j.at("goals").get<std::string>();
    p.self_reported_level = level_from_string(j.value("self_reported_level", std::string{"low"}));
    p.preferred_topics = j.value("preferred_topics", std::vector<std::string>{});
}

} // namespace codeedu::session
