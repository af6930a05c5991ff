#pragma once

#include "codeedu/planner/task.hpp"

#include <map>
#include <optional>
#include <span>
#include <variant>

namespace codeedu::planner {

struct TaskCompleted {
    TaskId task_id;
    std::string agent_id;
};

struct TaskFailed {
    TaskId task_id;
};

struct UserMessage {
    std::string text;
};

using PlanEvent = std::variant<TaskCompleted, TaskFailed, UserMessage>;

// Task DAG for one session. Every mutation keeps the graph acyclic and keeps
// `ready` equal to "not started and every dependency done"; failed mutations
// leave the plan unchanged.
class PlanState {
public:
    PlanState() = default;
    // Validates references, self-dependencies and cycles.
    explicit PlanState(std::span<const TaskSpec> tasks);

    void add_task(TaskSpec task);
    void add_dependency(const TaskId& task, const TaskId& depends_on);
    // Records the assignment and moves a ready task to running.
    void mark_running(const TaskId& task, const std::string& agent_id);

    bool contains(const TaskId& task) const { return tasks_.count(task) > 0; }
    const TaskSpec& task(const TaskId& id) const;
    TaskStatus status(const TaskId& id) const;
    std::optional<std::string> assignment(const TaskId& id) const;

    const std::map<TaskId, TaskSpec>& tasks() const { return tasks_; }
    const std::map<TaskId, TaskStatus>& statuses() const { return status_; }
    const std::map<TaskId, std::string>& assignments() const { return assignments_; }

    // Running tasks per agent.
    std::map<std::string, int> load() const;

    bool all_settled() const;  // every task done or failed
    bool is_acyclic() const;

    // Fresh id with the given prefix, unique within the plan.
    TaskId next_id(std::string_view prefix) const;

    nlohmann::json to_json() const;

private:
    friend PlanState on_event(const PlanState& plan, const PlanEvent& event);

    void refresh_ready();
    void fail_dependents(const TaskId& task);
    static bool acyclic(const std::map<TaskId, TaskSpec>& tasks);

    std::map<TaskId, TaskSpec> tasks_;
    std::map<TaskId, TaskStatus> status_;
    std::map<TaskId, std::string> assignments_;
};

// Ready tasks ordered by (priority desc, task_id asc).
std::vector<TaskSpec> next_ready(const PlanState& plan);

// Completion promotes dependents, failure fails every transitive dependent,
// a user message attaches a ready tutoring_qa task. Throws unknown_task.
PlanState on_event(const PlanState& plan, const PlanEvent& event);

} // namespace codeedu::planner
