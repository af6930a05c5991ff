#include "codeedu/eval/judge.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace codeedu::eval {

std::string load_rubric(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot read rubric " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::optional<QualityScores> parse_rating(std::string_view reply) {
    static const std::regex line(R"(IA\s*=\s*(\d+)\s*,?\s*CC\s*=\s*(\d+)\s*,?\s*INT\s*=\s*(\d+)\s*,?\s*PER\s*=\s*(\d+))");
    std::string text(reply);
    std::smatch m;
    if (!std::regex_search(text, m, line)) return std::nullopt;
    int scores[4];
    for (int i = 0; i < 4; ++i) {
        auto digits = m[i + 1].str();
        if (digits.size() > 1) return std::nullopt;
        scores[i] = std::stoi(digits);
        if (scores[i] < 1 || scores[i] > 5) return std::nullopt;
    }
    QualityScores q;
    q.ia = scores[0];
    q.cc = scores[1];
    q.interactivity = scores[2];
    q.per = scores[3];
    return q;
}

QualityScores judge_materials(const llm::Gateway& gateway, const llm::ModelBinding& binding, const std::string& rubric,
                              std::string_view material, const session::StudentProfile& profile) {
    require(material.find_first_not_of(" \t\r\n") != std::string_view::npos, "material must be non-empty");
    std::vector<llm::ChatMessage> messages{
        llm::ChatMessage::system(rubric),
        llm::ChatMessage::user("Student profile: " + nlohmann::json(profile).dump() + "\n\nMaterial:\n" +
                               std::string(material)),
    };
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = gateway.complete(binding, messages).text;
        messages.push_back(llm::ChatMessage::assistant(reply, judge_role));
        if (auto scores = parse_rating(reply)) {
            scores->transcript = messages;
            return *scores;
        }
        messages.push_back(llm::ChatMessage::user(
            "That rating could not be read. Reply with exactly one line: IA=<1-5> CC=<1-5> INT=<1-5> PER=<1-5>"));
    }
    fail(ErrorKind::unparseable_rating, "judge reply could not be parsed after one re-ask",
         {{"last_reply", messages[messages.size() - 2].content}});
}

} // namespace codeedu::eval
