#pragma once

#include "codeedu/llm/gateway.hpp"
#include "codeedu/session/profile.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace codeedu::eval {

inline constexpr const char* judge_role = "judge";

struct QualityScores {
    int ia = 0;
    int cc = 0;
    int interactivity = 0;
    int per = 0;
    std::vector<llm::ChatMessage> transcript;
};

std::string load_rubric(const std::filesystem::path& path);

// "IA=4 CC=5 INT=3 PER=4", every score in 1..5; nullopt otherwise.
std::optional<QualityScores> parse_rating(std::string_view reply);

// One rating call; an unusable reply is re-asked once, then
// unparseable_rating.
QualityScores judge_materials(const llm::Gateway& gateway, const llm::ModelBinding& binding, const std::string& rubric,
                              std::string_view material, const session::StudentProfile& profile);

} // namespace codeedu::eval
