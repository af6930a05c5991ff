#pragma once

#include "codeedu/llm/gateway.hpp"
#include "codeedu/planner/task.hpp"
#include "codeedu/tools/registry.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace codeedu::agents {

using planner::TaskType;

struct AgentProfile {
    std::string agent_id;
    std::string role_name;
    std::string role_prompt;
    std::set<std::string> tool_bindings;
    std::set<TaskType> capabilities;

    bool can_handle(TaskType type) const { return capabilities.count(type) > 0; }
};

namespace roles {
inline const std::string planner = "planner";
inline const std::string researcher = "researcher";
inline const std::string report_analyst = "report_analyst";
inline const std::string programmer = "programmer";
inline const std::string tutor = "tutor";
} // namespace roles

// Tools a task of this type leans on; feeds the planner's suitability score.
std::set<std::string> required_tools(TaskType type);

// The five default profiles with prompts read from <prompts_dir>/<role>.txt.
std::vector<AgentProfile> default_agents(const std::filesystem::path& prompts_dir);

class AgentPool {
public:
    AgentPool() = default;

    static AgentPool with_defaults(const std::filesystem::path& prompts_dir,
                                   const tools::ToolInvoker& tools);

    // Rejects duplicate ids (duplicate_agent) and unknown tool bindings
    // (config); the pool is unchanged on failure.
    void register_agent(AgentProfile profile, const tools::ToolInvoker& tools);

    // Sorted by agent_id.
    std::vector<AgentProfile> list_agents() const;
    const AgentProfile& get(const std::string& agent_id) const;
    std::vector<std::string> role_names() const;

private:
    std::map<std::string, AgentProfile> agents_;
};

// One line of agent output, parsed.
struct ToolAction {
    std::string tool;
    nlohmann::json arguments;
};
struct FinalAction {
    nlohmann::json artifact;
};
struct AskUserAction {
    std::string question;
};
struct MalformedAction {
    std::string reason;
};
using AgentAction = std::variant<ToolAction, FinalAction, AskUserAction, MalformedAction>;

// The last non-empty line is an action when it starts with '{':
//   {"tool": name, "arguments": {...}} | {"final": true, "artifact": ...}
//   | {"ask_user": question}
// A '{' line that is not one of these is malformed. Any other completion is
// a final plain-text answer.
AgentAction parse_action(std::string_view completion);

struct AgentRuntime {
    const llm::Gateway* gateway = nullptr;
    const tools::ToolInvoker* tools = nullptr;
    tools::ToolContext tool_context;
    int max_steps = 8;
};

// Act loop: prompt assembly, completion, optional tool calls, final
// artifact. Throws capability_mismatch, tool_failure, step_cap_exceeded.
planner::TaskOutcome run_agent_task(const AgentProfile& agent, const planner::TaskSpec& task,
                                    const planner::ConversationHistory& context,
                                    const AgentRuntime& runtime);

} // namespace codeedu::agents
