#include "codeedu/agents/agent_pool.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <sstream>

namespace codeedu::agents {

namespace {

std::string read_prompt(const std::filesystem::path& dir, const std::string& role) {
    auto path = dir / (role + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::config, "missing role prompt " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string trim(std::string_view text) {
    auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(b, e - b + 1));
}

constexpr std::size_t tool_echo_limit = 4000;

std::string system_prompt(const AgentProfile& agent, const tools::ToolInvoker& tools) {
    std::string out = trim(agent.role_prompt);
    if (!agent.tool_bindings.empty()) {
        out += "\n\nTools available to you:\n";
        for (const auto& d : tools.descriptors()) {
            if (!agent.tool_bindings.count(d.name)) continue;
            out += "- " + d.name + ": " + d.description + " Parameters: " +
                   nlohmann::json(d).at("parameters").dump() + "\n";
        }
        out += "To call a tool, reply with one line of JSON: "
               "{\"tool\": \"<name>\", \"arguments\": {...}}.\n";
    }
    out += "\nWhen you are done, reply with your answer as plain text, or as one line "
           "{\"final\": true, \"artifact\": ...}. To ask the student something first, reply "
           "{\"ask_user\": \"<question>\"}.";
    return out;
}

std::string task_prompt(const planner::TaskSpec& task, const planner::ConversationHistory& context) {
    std::string out = "Task (" + std::string(planner::to_string(task.type)) + "): " + task.description;
    if (!task.inputs.empty()) out += "\nInputs:\n" + task.inputs.dump(2);
    auto history = context.render();
    if (!history.empty()) out += "\n\nConversation so far:\n" + history;
    return out;
}

std::string tool_message(std::string_view tool, const tools::ToolResult& result) {
    auto text = std::string(tool) + " result: " + tools::result_to_json(result).dump();
    if (text.size() > tool_echo_limit) text = text.substr(0, tool_echo_limit) + "...(truncated)";
    return text;
}

tools::ToolResult invoke_bound(const AgentProfile& agent, const AgentRuntime& runtime, std::string_view tool,
                               const nlohmann::json& arguments) {
    tools::ToolContext context = runtime.tool_context;
    context.agent_role = agent.role_name;
    if (!context.gateway) context.gateway = runtime.gateway;
    try {
        return runtime.tools->invoke(tool, arguments, context);
    } catch (const Error& e) {
        fail(ErrorKind::tool_failure, std::string(tool) + ": " + e.what(),
             {{"tool", tool}, {"cause", to_string(e.kind())}});
    }
}

void merge_artifact(nlohmann::json& artifacts, const nlohmann::json& artifact) {
    if (artifact.is_object()) {
        for (const auto& [k, v] : artifact.items()) artifacts[k] = v;
    } else if (artifact.is_string()) {
        artifacts["answer"] = artifact;
    } else {
        artifacts["answer"] = artifact.dump();
    }
}

} // namespace

std::set<std::string> required_tools(TaskType type) {
    switch (type) {
        case TaskType::knowledge_retrieval: return {std::string(tools::web_crawler_tool)};
        case TaskType::material_generation: return {};
        case TaskType::tutoring_qa: return {std::string(tools::deep_research_tool)};
        case TaskType::coding_exercise:
        case TaskType::debugging_review: return {std::string(tools::code_interpreter_tool)};
        case TaskType::report_generation: return {std::string(tools::file_io_tool)};
    }
    return {};
}

std::vector<AgentProfile> default_agents(const std::filesystem::path& prompts_dir) {
    using T = TaskType;
    return {
        {roles::planner, roles::planner, read_prompt(prompts_dir, roles::planner), {}, {}},
        {roles::researcher, roles::researcher, read_prompt(prompts_dir, roles::researcher),
         {std::string(tools::web_crawler_tool)}, {T::knowledge_retrieval, T::material_generation}},
        {roles::report_analyst, roles::report_analyst, read_prompt(prompts_dir, roles::report_analyst),
         {std::string(tools::file_io_tool)}, {T::report_generation}},
        {roles::programmer, roles::programmer, read_prompt(prompts_dir, roles::programmer),
         {std::string(tools::code_interpreter_tool)}, {T::coding_exercise, T::debugging_review}},
        {roles::tutor, roles::tutor, read_prompt(prompts_dir, roles::tutor),
         {std::string(tools::deep_research_tool)}, {T::tutoring_qa}},
    };
}

AgentPool AgentPool::with_defaults(const std::filesystem::path& prompts_dir, const tools::ToolInvoker& tools) {
    AgentPool pool;
    for (auto& agent : default_agents(prompts_dir)) pool.register_agent(std::move(agent), tools);
    return pool;
}

void AgentPool::register_agent(AgentProfile profile, const tools::ToolInvoker& tools) {
    require(!profile.agent_id.empty() && !profile.role_name.empty(), "agent needs an id and a role");
    if (agents_.count(profile.agent_id))
        fail(ErrorKind::duplicate_agent, "agent '" + profile.agent_id + "' already registered");
    for (const auto& tool : profile.tool_bindings)
        if (!tools.contains(tool))
            fail(ErrorKind::config, "agent '" + profile.agent_id + "' binds unregistered tool '" + tool + "'");
    auto id = profile.agent_id;
    agents_.emplace(std::move(id), std::move(profile));
}

std::vector<AgentProfile> AgentPool::list_agents() const {
    std::vector<AgentProfile> out;
    for (const auto& [id, agent] : agents_) out.push_back(agent);
    return out;
}

const AgentProfile& AgentPool::get(const std::string& agent_id) const {
    auto it = agents_.find(agent_id);
    if (it == agents_.end()) fail(ErrorKind::not_found, "unknown agent '" + agent_id + "'");
    return it->second;
}

std::vector<std::string> AgentPool::role_names() const {
    std::set<std::string> roles;
    for (const auto& [id, agent] : agents_) roles.insert(agent.role_name);
    return {roles.begin(), roles.end()};
}

AgentAction parse_action(std::string_view completion) {
    auto text = trim(completion);
    auto nl = text.find_last_of('\n');
    auto last = trim(nl == std::string::npos ? text : std::string_view(text).substr(nl + 1));
    if (last.empty() || last.front() != '{') return FinalAction{text};

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(last);
    } catch (const nlohmann::json::parse_error&) {
        return MalformedAction{"action line is not valid JSON"};
    }
    if (!j.is_object()) return MalformedAction{"action must be a JSON object"};
    if (j.contains("tool")) {
        if (!j["tool"].is_string()) return MalformedAction{"\"tool\" must be a string"};
        auto args = j.value("arguments", nlohmann::json::object());
        if (!args.is_object()) return MalformedAction{"\"arguments\" must be an object"};
        return ToolAction{j["tool"].get<std::string>(), std::move(args)};
    }
    if (j.contains("final")) {
        if (j.contains("artifact")) return FinalAction{j["artifact"]};
        if (j["final"].is_string()) return FinalAction{j["final"]};
        return MalformedAction{"final action without an artifact"};
    }
    if (j.contains("ask_user") && j["ask_user"].is_string())
        return AskUserAction{j["ask_user"].get<std::string>()};
    return MalformedAction{"action needs \"tool\", \"final\" or \"ask_user\""};
}

planner::TaskOutcome run_agent_task(const AgentProfile& agent, const planner::TaskSpec& task,
                                    const planner::ConversationHistory& context, const AgentRuntime& runtime) {
    require(runtime.gateway && runtime.tools, "agent runtime needs a gateway and tools");
    require(runtime.max_steps > 0, "step cap must be positive");
    if (!agent.can_handle(task.type))
        fail(ErrorKind::capability_mismatch, "agent '" + agent.agent_id + "' does not handle " +
                                                 std::string(planner::to_string(task.type)) + " tasks");
    for (const auto& tool : agent.tool_bindings)
        if (!runtime.tools->contains(tool))
            fail(ErrorKind::config, "agent '" + agent.agent_id + "' binds unregistered tool '" + tool + "'");

    planner::TaskOutcome outcome;
    outcome.task_id = task.task_id;
    outcome.agent_id = agent.agent_id;
    auto& messages = outcome.transcript;
    messages.push_back(llm::ChatMessage::system(system_prompt(agent, *runtime.tools)));
    messages.push_back(llm::ChatMessage::user(task_prompt(task, context)));

    auto binds = [&](std::string_view tool) { return agent.tool_bindings.count(std::string(tool)) > 0; };

    // Grounding steps the engine runs through the agent's own tools before
    // asking the model.
    if (task.type == TaskType::knowledge_retrieval && task.inputs.contains("query") &&
        binds(tools::web_crawler_tool)) {
        nlohmann::json args = {{"query", task.inputs["query"]},
                               {"max_results", task.inputs.value("max_results", 5)}};
        auto result = invoke_bound(agent, runtime, tools::web_crawler_tool, args);
        messages.push_back(llm::ChatMessage::tool(tool_message(tools::web_crawler_tool, result)));
        outcome.artifacts["crawl"] = tools::result_to_json(result).at("results");
        return outcome;
    }
    if ((task.type == TaskType::coding_exercise || task.type == TaskType::debugging_review) &&
        task.inputs.contains("source") && !task.inputs.contains("report") && binds(tools::code_interpreter_tool)) {
        nlohmann::json args = {{"source", task.inputs["source"]}};
        if (task.inputs.contains("stdin")) args["stdin"] = task.inputs["stdin"];
        auto result = invoke_bound(agent, runtime, tools::code_interpreter_tool, args);
        const auto& exec = std::get<tools::ExecutionResult>(result);
        outcome.artifacts["execution"] = exec;
        outcome.artifacts["stdout"] = exec.stdout_text;
        messages.push_back(llm::ChatMessage::tool(tool_message(tools::code_interpreter_tool, result)));
    }

    auto binding = runtime.gateway->binding_for(agent.role_name);
    bool repaired = false;
    for (int step = 0; step < runtime.max_steps; ++step) {
        auto completion = runtime.gateway->complete(binding, messages);
        messages.push_back(llm::ChatMessage::assistant(completion.text, agent.agent_id));
        auto action = parse_action(completion.text);

        if (auto* bad = std::get_if<MalformedAction>(&action)) {
            if (repaired) {
                outcome.status = planner::OutcomeStatus::failed;
                outcome.artifacts["error"] = "malformed action: " + bad->reason;
                return outcome;
            }
            repaired = true;
            messages.push_back(llm::ChatMessage::user(
                "Your last line was not a valid action (" + bad->reason +
                "). Reply with plain text, or one line of JSON: {\"tool\": ..., \"arguments\": {...}} "
                "or {\"final\": true, \"artifact\": ...}."));
            continue;
        }
        if (auto* call = std::get_if<ToolAction>(&action)) {
            if (!binds(call->tool)) {
                messages.push_back(llm::ChatMessage::tool("error: tool '" + call->tool +
                                                          "' is not available to this agent"));
                continue;
            }
            auto result = invoke_bound(agent, runtime, call->tool, call->arguments);
            messages.push_back(llm::ChatMessage::tool(tool_message(call->tool, result)));
            continue;
        }
        if (auto* ask = std::get_if<AskUserAction>(&action)) {
            outcome.status = planner::OutcomeStatus::needs_user_input;
            outcome.artifacts["question"] = ask->question;
            return outcome;
        }
        merge_artifact(outcome.artifacts, std::get<FinalAction>(action).artifact);
        return outcome;
    }
    fail(ErrorKind::step_cap_exceeded, "agent '" + agent.agent_id + "' did not finish task '" + task.task_id +
                                           "' within " + std::to_string(runtime.max_steps) + " steps");
}

} // namespace codeedu::agents
