#pragma once

#include "codeedu/eval/problem.hpp"
#include "codeedu/llm/gateway.hpp"
#include "codeedu/session/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace codeedu::eval {

using session::Level;

inline constexpr const char* student_role = "student";

// Problem text a student of this level gets to see: the statement (low),
// plus concepts (medium), plus sample code and reference solution (high).
std::string exposed_material(Level level, const Problem& problem);

struct SimulatedStudent {
    Level level = Level::low;
    std::string problem_id;
    llm::ModelBinding binding;
    std::string system_prompt;
};

SimulatedStudent build_student(Level level, const Problem& problem, const llm::ModelBinding& binding);

// Code inside the first ``` fence, or nullopt when the reply holds none.
std::optional<std::string> extract_code(std::string_view reply);

// Conversation of one student with one tutor. The student side sees tutor
// turns as user messages and its own as assistant messages.
class StudentSession {
public:
    StudentSession(const SimulatedStudent& student, const llm::Gateway& gateway);

    // Next question for the tutor; `turn` is 1-based.
    std::string ask(int turn, const std::optional<std::string>& tutor_reply);
    // Submission k (1-based) of a test phase ("pre" or "post"); tutor is
    // "none" before tutoring.
    std::string submit(std::string_view phase, std::string_view tutor, int k);

    const std::vector<llm::ChatMessage>& transcript() const { return messages_; }

private:
    std::string tag(std::string_view rest) const;

    const SimulatedStudent& student_;
    const llm::Gateway& gateway_;
    std::vector<llm::ChatMessage> messages_;
};

} // namespace codeedu::eval
