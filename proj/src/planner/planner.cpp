#include "codeedu/planner/planner.hpp"

#include "codeedu/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace codeedu::planner {

namespace {

std::string lower_trim(std::string_view text) {
    std::string out;
    for (char c : text) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto b = out.find_first_not_of(" \t\r\n");
    auto e = out.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : out.substr(b, e - b + 1);
}

bool starts_with_word(const std::string& text, std::string_view word) {
    if (text.rfind(word, 0) != 0) return false;
    return text.size() == word.size() || !std::isalnum(static_cast<unsigned char>(text[word.size()]));
}

bool contains_word(const std::string& text, std::string_view word) {
    for (auto pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) {
        bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
        auto end = pos + word.size();
        bool right = end == text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
        if (left && right) return true;
    }
    return false;
}

constexpr std::array question_words{"what", "why",   "how",    "when",   "where", "which",  "who",
                                    "can",  "could", "does",   "do",     "is",    "are",    "should",
                                    "would", "will", "explain", "whats", "what's"};

const char* plan_format =
    "Reply with one JSON object and nothing else:\n"
    "{\"tasks\": [{\"id\": \"t1\", \"type\": <task type>, \"description\": <text>, "
    "\"depends_on\": [<ids>], \"priority\": <int>}]}\n"
    "Task types: knowledge_retrieval, material_generation, tutoring_qa, coding_exercise, "
    "debugging_review, report_generation. The dependencies must form a DAG.";

std::vector<TaskSpec> parse_plan(const std::string& reply, const std::string& prefix) {
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        fail(ErrorKind::decomposition_failure, "planner reply holds no JSON plan");
    auto doc = nlohmann::json::parse(reply.substr(open, close - open + 1));
    std::vector<TaskSpec> tasks;
    for (const auto& t : doc.at("tasks")) {
        TaskSpec spec;
        spec.task_id = prefix + t.at("id").get<std::string>();
        spec.type = task_type_from_string(t.at("type").get<std::string>());
        spec.description = t.value("description", std::string{});
        spec.priority = t.value("priority", 0);
        spec.inputs = t.value("inputs", nlohmann::json::object());
        for (const auto& dep : t.value("depends_on", std::vector<std::string>{}))
            spec.depends_on.insert(prefix + dep);
        tasks.push_back(std::move(spec));
    }
    if (tasks.empty()) fail(ErrorKind::decomposition_failure, "planner proposed an empty plan");
    PlanState validated(tasks);  // references, self-edges, cycles
    return tasks;
}

std::vector<TaskSpec> decompose_with_llm(std::string_view request, const session::StudentProfile& profile,
                                         const ConversationHistory& history, const DecomposeOptions& options) {
    require(options.gateway != nullptr, "llm decomposition needs a gateway");
    auto binding = options.gateway->binding_for(agents::roles::planner);
    std::vector<llm::ChatMessage> messages{
        llm::ChatMessage::system(std::string("You are the planner of a coding-education platform. "
                                             "Decompose the student's request into typed tasks.\n") +
                                 plan_format),
        llm::ChatMessage::user("Request: " + std::string(request) + "\nStudent profile: " +
                               nlohmann::json(profile).dump() + "\nConversation:\n" + history.render()),
    };
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = options.gateway->complete(binding, messages).text;
        try {
            return parse_plan(reply, options.id_prefix);
        } catch (const std::exception& e) {
            if (attempt == 1)
                fail(ErrorKind::decomposition_failure, std::string("unusable plan after repair: ") + e.what());
            messages.push_back(llm::ChatMessage::assistant(reply, agents::roles::planner));
            messages.push_back(llm::ChatMessage::user(std::string("That plan was invalid (") + e.what() +
                                                      "). " + plan_format));
        }
    }
    fail(ErrorKind::decomposition_failure, "unreachable");
}

} // namespace

RequestKind classify_request(std::string_view request) {
    auto text = lower_trim(request);
    if (!text.empty() && text.back() == '?') return RequestKind::question;
    for (auto word : question_words)
        if (starts_with_word(text, word)) return RequestKind::question;
    if (contains_word(text, "report")) return RequestKind::report;
    return RequestKind::learning;
}

std::string extract_topic(std::string_view request) {
    auto text = lower_trim(request);
    constexpr std::array prefixes{"please ",          "can you ",          "could you ",
                                  "teach me about ", "teach me ",         "i want to learn about ",
                                  "i want to learn ", "i'd like to learn ", "help me learn about ",
                                  "help me learn ",   "help me understand ", "learn about ",
                                  "learn ",           "about "};
    for (bool stripped = true; stripped;) {
        stripped = false;
        for (std::string_view p : prefixes) {
            if (text.rfind(p, 0) == 0) {
                text.erase(0, p.size());
                stripped = true;
            }
        }
    }
    while (!text.empty() && std::ispunct(static_cast<unsigned char>(text.back()))) text.pop_back();
    return text.empty() ? lower_trim(request) : text;
}

std::vector<TaskSpec> decompose(std::string_view request, const session::StudentProfile& profile,
                                const ConversationHistory& history, const DecomposeOptions& options) {
    require(!lower_trim(request).empty(), "request must be non-empty");
    if (options.mode == DecomposeMode::llm) return decompose_with_llm(request, profile, history, options);

    const std::string& p = options.id_prefix;
    switch (classify_request(request)) {
        case RequestKind::question: {
            TaskSpec qa{p + "qa1", TaskType::tutoring_qa, std::string(request),
                        {{"question", std::string(request)}}, {}, 10};
            return {qa};
        }
        case RequestKind::report: {
            TaskSpec report{p + "report1", TaskType::report_generation, "Compile the learning report",
                            nlohmann::json::object(), {}, 5};
            return {report};
        }
        case RequestKind::learning: break;
    }

    auto topic = extract_topic(request);
    auto level = std::string(session::to_string(profile.self_reported_level));
    std::vector<TaskSpec> chain{
        {p + "t1", TaskType::knowledge_retrieval, "Gather sources about " + topic,
         {{"query", topic}, {"topic", topic}}, {}, 5},
        {p + "t2", TaskType::material_generation, "Compile personalized learning material on " + topic,
         {{"topic", topic}, {"level", level}}, {p + "t1"}, 5},
        {p + "t3", TaskType::coding_exercise, "Guide step-by-step coding exercises on " + topic,
         {{"topic", topic}}, {p + "t2"}, 5},
        {p + "t4", TaskType::report_generation, "Compile the learning report", nlohmann::json::object(),
         {p + "t3"}, 5},
    };
    return chain;
}

int suitability(const TaskSpec& task, const agents::AgentProfile& agent, int running_tasks) {
    int score = agent.can_handle(task.type) ? 10 : 0;
    for (const auto& tool : agents::required_tools(task.type))
        if (agent.tool_bindings.count(tool)) score += 2;
    return score - running_tasks;
}

std::string assign(const TaskSpec& task, std::span<const agents::AgentProfile> agents,
                   const ConversationHistory& /*history*/, const std::map<std::string, int>& load) {
    const agents::AgentProfile* best = nullptr;
    int best_score = 0;
    for (const auto& agent : agents) {
        if (!agent.can_handle(task.type)) continue;
        auto it = load.find(agent.agent_id);
        int score = suitability(task, agent, it == load.end() ? 0 : it->second);
        if (!best || score > best_score || (score == best_score && agent.agent_id < best->agent_id)) {
            best = &agent;
            best_score = score;
        }
    }
    if (!best)
        fail(ErrorKind::no_capable_agent, "no agent handles " + std::string(to_string(task.type)) + " tasks");
    return best->agent_id;
}

} // namespace codeedu::planner
