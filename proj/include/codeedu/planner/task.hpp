#pragma once

#include "codeedu/llm/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace codeedu::planner {

enum class TaskType {
    knowledge_retrieval,
    material_generation,
    tutoring_qa,
    coding_exercise,
    debugging_review,
    report_generation,
};

inline constexpr std::array<TaskType, 6> all_task_types{
    TaskType::knowledge_retrieval, TaskType::material_generation, TaskType::tutoring_qa,
    TaskType::coding_exercise,     TaskType::debugging_review,    TaskType::report_generation,
};

std::string_view to_string(TaskType type);
TaskType task_type_from_string(std::string_view text);

using TaskId = std::string;

struct TaskSpec {
    TaskId task_id;
    TaskType type = TaskType::tutoring_qa;
    std::string description;
    nlohmann::json inputs = nlohmann::json::object();
    std::set<TaskId> depends_on;
    int priority = 0;

    bool operator==(const TaskSpec&) const = default;
};

enum class TaskStatus { pending, ready, running, done, failed };

std::string_view to_string(TaskStatus status);

enum class OutcomeStatus { done, failed, needs_user_input };

std::string_view to_string(OutcomeStatus status);

struct TaskOutcome {
    TaskId task_id;
    OutcomeStatus status = OutcomeStatus::done;
    std::string agent_id;
    nlohmann::json artifacts = nlohmann::json::object();
    std::vector<llm::ChatMessage> transcript;

    bool operator==(const TaskOutcome&) const = default;
};

// Session chat plus task outcomes, both append-only.
class ConversationHistory {
public:
    void append(llm::ChatMessage message) { messages_.push_back(std::move(message)); }
    void append(TaskOutcome outcome) { outcomes_.push_back(std::move(outcome)); }

    const std::vector<llm::ChatMessage>& messages() const { return messages_; }
    const std::vector<TaskOutcome>& outcomes() const { return outcomes_; }

    // Last `max_messages` messages rendered as "role: content" lines.
    std::string render(std::size_t max_messages = 12) const;

private:
    std::vector<llm::ChatMessage> messages_;
    std::vector<TaskOutcome> outcomes_;
};

void to_json(nlohmann::json& j, const TaskSpec& t);
void from_json(const nlohmann::json& j, TaskSpec& t);
void to_json(nlohmann::json& j, const TaskOutcome& o);

} // namespace codeedu::planner
