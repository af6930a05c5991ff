#pragma once

#include "codeedu/agents/agent_pool.hpp"
#include "codeedu/eval/problem.hpp"
#include "codeedu/llm/gateway.hpp"
#include "codeedu/planner/plan.hpp"
#include "codeedu/session/profile.hpp"
#include "codeedu/tools/registry.hpp"

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace codeedu::session {

enum class Phase { intake, studying, exercising, reporting, closed };

std::string_view to_string(Phase phase);
// The declared phase graph: intake->studying<->exercising->reporting->closed.
bool transition_allowed(Phase from, Phase to);

inline constexpr std::string_view model_internal = "model-internal";

struct MaterialSection {
    std::string heading;
    std::string body;
    std::vector<std::string> source_refs;  // crawl URLs, or "model-internal"
};

struct LearningMaterial {
    std::string topic;
    std::vector<MaterialSection> sections;
    std::string generated_for;
    std::string markdown;
};

// Splits on "## " headings; [n] markers resolve to the n-th crawl entry.
LearningMaterial parse_material(std::string_view text, std::string_view topic,
                                const std::vector<tools::CrawlEntry>& sources);

struct Exercise {
    std::string exercise_id;
    std::string statement;
    std::vector<eval::ProblemStep> steps;
    std::vector<tools::TestCase> test_cases;
    std::size_t current_step = 0;
    bool complete = false;
};

enum class NextAction { retry_step, advance_step, exercise_complete };

std::string_view to_string(NextAction action);

struct Feedback {
    tools::TestReport verdict;
    std::string suggestions;
    NextAction next_action = NextAction::retry_step;
    bool stop_suggested = false;
};

struct Answer {
    std::string text;
    int turn_count = 0;
    bool stop_suggested = false;
};

struct Submission {
    std::string exercise_id;
    std::size_t step_index = 0;
    std::size_t passed = 0;
    std::size_t total = 0;
    bool all_passed = false;
    std::string next_action;
};

struct LearningReport {
    std::string summary;
    std::vector<std::pair<std::string, std::string>> timeline;  // phase, ts
    std::vector<std::string> questions;
    std::vector<Submission> submissions;
    std::string recommendations;
    std::filesystem::path path;
    std::string content;
};

// Questions and submission lines recovered from a rendered report.
struct ReportEntries {
    std::vector<std::string> questions;
    std::vector<std::string> submissions;
};
ReportEntries parse_report(std::string_view markdown);

struct Event {
    std::int64_t seq = 0;
    std::string ts;
    std::string kind;
    nlohmann::json payload;
};

void to_json(nlohmann::json& j, const Event& e);

struct SessionInfo {
    std::string session_id;
    StudentProfile profile;
    Phase phase = Phase::intake;
    int turn_count = 0;
    int max_turns = 20;
    std::filesystem::path workspace_root;
    std::int64_t event_count = 0;
    std::optional<std::string> current_exercise;
};

void to_json(nlohmann::json& j, const SessionInfo& s);

using Clock = std::function<std::chrono::system_clock::time_point()>;

struct OrchestratorConfig {
    std::filesystem::path workspace_root;  // sessions live in <root>/sessions/<id>
    int max_turns = 20;
    tools::SandboxPolicy policy;
    int max_agent_steps = 8;
    std::vector<eval::Problem> problems;
    Clock clock;  // defaults to the system clock
};

// Every session operation, as seen by the HTTP layer.
class SessionService {
public:
    virtual ~SessionService() = default;
    virtual SessionInfo start_session(const nlohmann::json& intake) = 0;
    virtual SessionInfo info(const std::string& session_id) const = 0;
    virtual LearningMaterial generate_material(const std::string& session_id) = 0;
    virtual Answer answer_question(const std::string& session_id, const std::string& question) = 0;
    virtual Exercise start_exercise(const std::string& session_id, const std::optional<std::string>& exercise_id) = 0;
    virtual Feedback submit_code(const std::string& session_id, const std::string& exercise_id,
                                 std::size_t step_index, const std::string& source) = 0;
    virtual LearningReport generate_report(const std::string& session_id) = 0;
    virtual std::optional<std::string> report(const std::string& session_id) const = 0;
    virtual void close(const std::string& session_id) = 0;
    // Events with seq >= from_seq; blocks up to `wait` when none are there yet.
    virtual std::vector<Event> events(const std::string& session_id, std::int64_t from_seq,
                                      std::chrono::milliseconds wait = std::chrono::milliseconds(0)) const = 0;
};

class Orchestrator : public SessionService {
public:
    Orchestrator(OrchestratorConfig config, const llm::Gateway& gateway,
                 std::shared_ptr<const tools::ToolInvoker> tools, agents::AgentPool agents,
                 std::shared_ptr<const tools::CodeExecutor> executor);

    SessionInfo start_session(const nlohmann::json& intake) override;
    SessionInfo info(const std::string& session_id) const override;
    LearningMaterial generate_material(const std::string& session_id) override;
    Answer answer_question(const std::string& session_id, const std::string& question) override;
    Exercise start_exercise(const std::string& session_id, const std::optional<std::string>& exercise_id) override;
    Feedback submit_code(const std::string& session_id, const std::string& exercise_id, std::size_t step_index,
                         const std::string& source) override;
    LearningReport generate_report(const std::string& session_id) override;
    std::optional<std::string> report(const std::string& session_id) const override;
    void close(const std::string& session_id) override;
    std::vector<Event> events(const std::string& session_id, std::int64_t from_seq,
                              std::chrono::milliseconds wait = std::chrono::milliseconds(0)) const override;

    // Asks the stop-check binding whether the learning objectives are met.
    // Without a scripted stop check in mock mode, or on an unclear reply,
    // the answer is false.
    bool should_stop_early(const std::string& session_id);

    const OrchestratorConfig& config() const { return config_; }

private:
    struct State;

    std::shared_ptr<State> find(const std::string& session_id) const;
    std::string now() const;
    void log(State& state, std::string kind, nlohmann::json payload);
    void transition(State& state, Phase to);
    planner::TaskOutcome run_task(State& state, const planner::TaskSpec& task);
    bool stop_check(State& state);

    OrchestratorConfig config_;
    const llm::Gateway& gateway_;
    std::shared_ptr<const tools::ToolInvoker> tools_;
    agents::AgentPool agents_;
    std::shared_ptr<const tools::CodeExecutor> executor_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<State>> sessions_;
    int next_session_ = 1;
};

} // namespace codeedu::session
