#include "codeedu/session/stop_check.hpp"

#include "codeedu/error.hpp"

#include <cctype>
#include <vector>

namespace codeedu::session {

bool objectives_met(const llm::Gateway& gateway, std::string_view goals, int turn, std::string_view recent) {
    try {
        const std::string role(stop_check_role);
        auto binding = gateway.has_binding(role) ? gateway.binding_for(role) : gateway.binding_for("tutor");
        binding.agent_role = role;
        if (!gateway.scripted_for(binding)) return false;
        std::vector<llm::ChatMessage> messages{
            llm::ChatMessage::system("You decide whether a tutoring session can end early because the student's "
                                     "learning objectives are met. Reply with exactly YES or NO."),
            llm::ChatMessage::user("[turn=" + std::to_string(turn) + "]\nGoals: " + std::string(goals) +
                                   "\nRecent conversation:\n" + std::string(recent) +
                                   "\nAre the learning objectives met?"),
        };
        auto reply = gateway.complete(binding, messages).text;
        std::string word;
        auto b = reply.find_first_not_of(" \t\r\n*\"'");
        for (auto i = b; i != std::string::npos && i < reply.size(); ++i) {
            if (!std::isalpha(static_cast<unsigned char>(reply[i]))) break;
            word += static_cast<char>(std::toupper(static_cast<unsigned char>(reply[i])));
        }
        return word == "YES" || word == "STOP";
    } catch (const Error&) {
        return false;
    }
}

} // namespace codeedu::session
