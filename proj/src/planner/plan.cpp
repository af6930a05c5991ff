#include "codeedu/planner/plan.hpp"

#include "codeedu/error.hpp"

#include <algorithm>
#include <deque>

namespace codeedu::planner {

namespace {

void check_references(const std::map<TaskId, TaskSpec>& tasks, const TaskSpec& task) {
    require(!task.task_id.empty(), "task id must be non-empty");
    for (const auto& dep : task.depends_on) {
        if (dep == task.task_id) fail(ErrorKind::precondition, "task '" + dep + "' depends on itself");
        if (!tasks.count(dep))
            fail(ErrorKind::unknown_task, "task '" + task.task_id + "' depends on unknown task '" + dep + "'");
    }
}

} // namespace

PlanState::PlanState(std::span<const TaskSpec> tasks) {
    std::map<TaskId, TaskSpec> staged;
    for (const auto& task : tasks) {
        if (!staged.emplace(task.task_id, task).second)
            fail(ErrorKind::precondition, "duplicate task id '" + task.task_id + "'");
    }
    for (const auto& [id, task] : staged) check_references(staged, task);
    if (!acyclic(staged)) fail(ErrorKind::cycle, "plan contains a dependency cycle");
    tasks_ = std::move(staged);
    for (const auto& [id, task] : tasks_) status_[id] = TaskStatus::pending;
    refresh_ready();
}

bool PlanState::acyclic(const std::map<TaskId, TaskSpec>& tasks) {
    std::map<TaskId, int> indegree;
    std::map<TaskId, std::vector<TaskId>> dependents;
    for (const auto& [id, task] : tasks) {
        indegree[id] += 0;
        for (const auto& dep : task.depends_on) {
            ++indegree[id];
            dependents[dep].push_back(id);
        }
    }
    std::deque<TaskId> queue;
    for (const auto& [id, degree] : indegree)
        if (degree == 0) queue.push_back(id);
    std::size_t visited = 0;
    while (!queue.empty()) {
        auto id = queue.front();
        queue.pop_front();
        ++visited;
        for (const auto& next : dependents[id])
            if (--indegree[next] == 0) queue.push_back(next);
    }
    return visited == tasks.size();
}

bool PlanState::is_acyclic() const { return acyclic(tasks_); }

void PlanState::refresh_ready() {
    // Failure and readiness both propagate along edges; iterate to a fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [id, status] : status_) {
            if (status != TaskStatus::pending && status != TaskStatus::ready) continue;
            bool any_failed = false;
            bool all_done = true;
            for (const auto& dep : tasks_.at(id).depends_on) {
                auto s = status_.at(dep);
                any_failed = any_failed || s == TaskStatus::failed;
                all_done = all_done && s == TaskStatus::done;
            }
            auto next = any_failed ? TaskStatus::failed : all_done ? TaskStatus::ready : TaskStatus::pending;
            if (next != status) {
                status = next;
                changed = true;
            }
        }
    }
}

void PlanState::fail_dependents(const TaskId& task) {
    std::deque<TaskId> queue{task};
    while (!queue.empty()) {
        auto id = queue.front();
        queue.pop_front();
        for (const auto& [other, spec] : tasks_) {
            if (!spec.depends_on.count(id)) continue;
            auto& s = status_.at(other);
            if (s == TaskStatus::done || s == TaskStatus::failed) continue;
            s = TaskStatus::failed;
            queue.push_back(other);
        }
    }
}

void PlanState::add_task(TaskSpec task) {
    if (tasks_.count(task.task_id)) fail(ErrorKind::precondition, "duplicate task id '" + task.task_id + "'");
    check_references(tasks_, task);
    auto id = task.task_id;
    tasks_.emplace(id, std::move(task));
    status_[id] = TaskStatus::pending;
    refresh_ready();
}

void PlanState::add_dependency(const TaskId& task, const TaskId& depends_on) {
    if (!tasks_.count(task)) fail(ErrorKind::unknown_task, "unknown task '" + task + "'");
    if (!tasks_.count(depends_on)) fail(ErrorKind::unknown_task, "unknown task '" + depends_on + "'");
    if (task == depends_on) fail(ErrorKind::precondition, "task '" + task + "' cannot depend on itself");
    auto s = status_.at(task);
    require(s == TaskStatus::pending || s == TaskStatus::ready,
            "cannot add a dependency to a task that already started");
    auto staged = tasks_;
    staged.at(task).depends_on.insert(depends_on);
    if (!acyclic(staged))
        fail(ErrorKind::cycle, "edge " + depends_on + " -> " + task + " would create a cycle");
    tasks_ = std::move(staged);
    refresh_ready();
}

void PlanState::mark_running(const TaskId& task, const std::string& agent_id) {
    if (!tasks_.count(task)) fail(ErrorKind::unknown_task, "unknown task '" + task + "'");
    require(!agent_id.empty(), "running task needs an agent");
    require(status_.at(task) == TaskStatus::ready, "task '" + task + "' is not ready");
    status_[task] = TaskStatus::running;
    assignments_[task] = agent_id;
}

const TaskSpec& PlanState::task(const TaskId& id) const {
    auto it = tasks_.find(id);
    if (it == tasks_.end()) fail(ErrorKind::unknown_task, "unknown task '" + id + "'");
    return it->second;
}

TaskStatus PlanState::status(const TaskId& id) const {
    auto it = status_.find(id);
    if (it == status_.end()) fail(ErrorKind::unknown_task, "unknown task '" + id + "'");
    return it->second;
}

std::optional<std::string> PlanState::assignment(const TaskId& id) const {
    if (auto it = assignments_.find(id); it != assignments_.end()) return it->second;
    return std::nullopt;
}

std::map<std::string, int> PlanState::load() const {
    std::map<std::string, int> out;
    for (const auto& [id, status] : status_)
        if (status == TaskStatus::running) ++out[assignments_.at(id)];
    return out;
}

bool PlanState::all_settled() const {
    return std::all_of(status_.begin(), status_.end(), [](const auto& kv) {
        return kv.second == TaskStatus::done || kv.second == TaskStatus::failed;
    });
}

TaskId PlanState::next_id(std::string_view prefix) const {
    for (int n = 1;; ++n) {
        TaskId id = std::string(prefix) + std::to_string(n);
        if (!tasks_.count(id)) return id;
    }
}

nlohmann::json PlanState::to_json() const {
    nlohmann::json j = {{"tasks", nlohmann::json::array()},
                        {"statuses", nlohmann::json::object()},
                        {"assignments", assignments_},
                        {"edges", nlohmann::json::array()}};
    for (const auto& [id, task] : tasks_) {
        j["tasks"].push_back(task);
        j["statuses"][id] = to_string(status_.at(id));
        for (const auto& dep : task.depends_on) j["edges"].push_back({dep, id});
    }
    return j;
}

std::vector<TaskSpec> next_ready(const PlanState& plan) {
    std::vector<TaskSpec> out;
    for (const auto& [id, status] : plan.statuses())
        if (status == TaskStatus::ready) out.push_back(plan.task(id));
    std::stable_sort(out.begin(), out.end(), [](const TaskSpec& a, const TaskSpec& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.task_id < b.task_id;
    });
    return out;
}

PlanState on_event(const PlanState& plan, const PlanEvent& event) {
    PlanState next = plan;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, TaskCompleted>) {
                auto status = next.status(e.task_id);
                require(status == TaskStatus::running || status == TaskStatus::ready,
                        "task '" + e.task_id + "' cannot complete from " + std::string(to_string(status)));
                auto assigned = next.assignment(e.task_id);
                if (assigned && !e.agent_id.empty() && *assigned != e.agent_id)
                    fail(ErrorKind::precondition, "task '" + e.task_id + "' was assigned to " + *assigned);
                if (!assigned) {
                    require(!e.agent_id.empty(), "completed task '" + e.task_id + "' has no agent");
                    next.assignments_[e.task_id] = e.agent_id;
                }
                next.status_[e.task_id] = TaskStatus::done;
                next.refresh_ready();
            } else if constexpr (std::is_same_v<T, TaskFailed>) {
                auto status = next.status(e.task_id);
                require(status != TaskStatus::done, "task '" + e.task_id + "' already finished");
                next.status_[e.task_id] = TaskStatus::failed;
                next.fail_dependents(e.task_id);
                next.refresh_ready();
            } else {
                require(!e.text.empty(), "user message must be non-empty");
                TaskSpec qa;
                qa.task_id = next.next_id("qa");
                qa.type = TaskType::tutoring_qa;
                qa.description = e.text;
                qa.inputs = {{"question", e.text}};
                qa.priority = 10;
                next.add_task(std::move(qa));
            }
        },
        event);
    return next;
}

} // namespace codeedu::planner
