#pragma once

#include "codeedu/agents/agent_pool.hpp"
#include "codeedu/planner/plan.hpp"
#include "codeedu/session/profile.hpp"

#include <map>
#include <span>

namespace codeedu::planner {

enum class DecomposeMode { rules, llm };

struct DecomposeOptions {
    DecomposeMode mode = DecomposeMode::rules;
    const llm::Gateway* gateway = nullptr;  // llm mode: asks the planner binding
    std::string id_prefix;                  // prepended to generated task ids
};

enum class RequestKind { learning, question, report };

RequestKind classify_request(std::string_view request);
// "teach me recursion" -> "recursion"
std::string extract_topic(std::string_view request);

// Rule mode: a question becomes one tutoring_qa task, a report request one
// report_generation task, anything else the canonical learning chain
// knowledge_retrieval -> material_generation -> coding_exercise ->
// report_generation. LLM mode validates the planner's JSON plan and retries
// once before decomposition_failure.
std::vector<TaskSpec> decompose(std::string_view request, const session::StudentProfile& profile,
                                const ConversationHistory& history, const DecomposeOptions& options = {});

// +10 when capable, +2 per required tool bound, -1 per running task.
int suitability(const TaskSpec& task, const agents::AgentProfile& agent, int running_tasks);

// Highest-scoring capable agent; ties go to the smaller agent_id.
std::string assign(const TaskSpec& task, std::span<const agents::AgentProfile> agents,
                   const ConversationHistory& history, const std::map<std::string, int>& load = {});

} // namespace codeedu::planner
