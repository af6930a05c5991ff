#include "codeedu/eval/student.hpp"

#include "codeedu/error.hpp"

namespace codeedu::eval {

std::string exposed_material(Level level, const Problem& problem) {
    std::string out = "Problem statement:\n" + problem.statement + "\n";
    if (level == Level::low) return out;
    if (!problem.concepts.empty()) out += "\nBackground concepts:\n" + problem.concepts + "\n";
    if (level == Level::medium) return out;
    if (problem.sample_code) out += "\nSample code:\n" + *problem.sample_code + "\n";
    if (problem.reference_solution) out += "\nA worked solution you have seen before:\n" + *problem.reference_solution + "\n";
    return out;
}

SimulatedStudent build_student(Level level, const Problem& problem, const llm::ModelBinding& binding) {
    validate(problem);
    SimulatedStudent student;
    student.level = level;
    student.problem_id = problem.problem_id;
    student.binding = binding;
    student.system_prompt =
        "You are a " + std::string(session::to_string(level)) +
        "-level programming student working on one exercise in Python. Ask your tutor short questions "
        "when you are unsure. When asked for a solution, reply with one ```python fenced block reading "
        "stdin and writing stdout.\n\n" +
        exposed_material(level, problem);
    return student;
}

std::optional<std::string> extract_code(std::string_view reply) {
    auto open = reply.find("```");
    if (open == std::string_view::npos) return std::nullopt;
    auto line_end = reply.find('\n', open);
    if (line_end == std::string_view::npos) return std::nullopt;
    auto close = reply.find("```", line_end + 1);
    if (close == std::string_view::npos) return std::nullopt;
    auto code = std::string(reply.substr(line_end + 1, close - line_end - 1));
    if (code.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
    return code;
}

StudentSession::StudentSession(const SimulatedStudent& student, const llm::Gateway& gateway)
    : student_(student), gateway_(gateway) {
    messages_.push_back(llm::ChatMessage::system(student.system_prompt));
}

std::string StudentSession::tag(std::string_view rest) const {
    return "[problem=" + student_.problem_id + " level=" + std::string(session::to_string(student_.level)) + " " +
           std::string(rest) + "]";
}

std::string StudentSession::ask(int turn, const std::optional<std::string>& tutor_reply) {
    require(turn > 0, "turns are 1-based");
    std::string prompt = tag("phase=chat turn=" + std::to_string(turn)) + "\n";
    prompt += tutor_reply ? "Your tutor said:\n" + *tutor_reply + "\n\nAsk your next question."
                          : std::string("Ask your tutor your first question about the problem.");
    messages_.push_back(llm::ChatMessage::user(prompt));
    auto reply = gateway_.complete(student_.binding, messages_).text;
    messages_.push_back(llm::ChatMessage::assistant(reply, student_role));
    return reply;
}

std::string StudentSession::submit(std::string_view phase, std::string_view tutor, int k) {
    require(k > 0, "submissions are 1-based");
    auto prompt = tag("phase=" + std::string(phase) + " tutor=" + std::string(tutor) + " k=" + std::to_string(k)) +
                  "\nSubmit solution attempt " + std::to_string(k) + " as one ```python block.";
    // Each attempt is answered from the conversation so far, not from earlier
    // attempts of the same test.
    std::vector<llm::ChatMessage> request = messages_;
    request.push_back(llm::ChatMessage::user(prompt));
    return gateway_.complete(student_.binding, request).text;
}

} // namespace codeedu::eval
