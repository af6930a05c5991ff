#include "codeedu/planner/task.hpp"

#include "codeedu/error.hpp"

namespace codeedu::planner {

std::string_view to_string(TaskType type) {
    switch (type) {
        case TaskType::knowledge_retrieval: return "knowledge_retrieval";
        case TaskType::material_generation: return "material_generation";
        case TaskType::tutoring_qa: return "tutoring_qa";
        case TaskType::coding_exercise: return "coding_exercise";
        case TaskType::debugging_review: return "debugging_review";
        case TaskType::report_generation: return "report_generation";
    }
    return "tutoring_qa";
}

TaskType task_type_from_string(std::string_view text) {
    for (auto type : all_task_types)
        if (to_string(type) == text) return type;
    fail(ErrorKind::precondition, "unknown task type '" + std::string(text) + "'");
}

std::string_view to_string(TaskStatus status) {
    switch (status) {
        case TaskStatus::pending: return "pending";
        case TaskStatus::ready: return "ready";
        case TaskStatus::running: return "running";
        case TaskStatus::done: return "done";
        case TaskStatus::failed: return "failed";
    }
    return "pending";
}

std::string_view to_string(OutcomeStatus status) {
    switch (status) {
        case OutcomeStatus::done: return "done";
        case OutcomeStatus::failed: return "failed";
        case OutcomeStatus::needs_user_input: return "needs_user_input";
    }
    return "failed";
}

std::string ConversationHistory::render(std::size_t max_messages) const {
    std::string out;
    std::size_t start = messages_.size() > max_messages ? messages_.size() - max_messages : 0;
    for (std::size_t i = start; i < messages_.size(); ++i) {
        const auto& m = messages_[i];
        out += std::string(llm::to_string(m.role));
        if (m.author_agent) out += " (" + *m.author_agent + ")";
        out += ": " + m.content + "\n";
    }
    return out;
}

void to_json(nlohmann::json& j, const TaskSpec& t) {
    j = {{"task_id", t.task_id},
         {"type", to_string(t.type)},
         {"description", t.description},
         {"inputs", t.inputs},
         {"depends_on", t.depends_on},
         {"priority", t.priority}};
}

void from_json(const nlohmann::json& j, TaskSpec& t) {
    t.task_id = j.at("task_id").get<std::string>();
    t.type = task_type_from_string(j.at("type").get<std::string>());
    t.description = j.value("description", std::string{});
    t.inputs = j.value("inputs", nlohmann::json::object());
    t.depends_on = j.value("depends_on", std::set<std::string>{});
    t.priority = j.value("priority", 0);
}

void to_json(nlohmann::json& j, const TaskOutcome& o) {
    j = {{"task_id", o.task_id},
         {"status", to_string(o.status)},
         {"agent_id", o.agent_id},
         {"artifacts", o.artifacts},
         {"transcript", o.transcript}};
}

} // namespace codeedu::planner
