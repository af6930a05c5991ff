#include "codeedu/session/orchestrator.hpp"

#include "codeedu/error.hpp"
#include "codeedu/planner/planner.hpp"
#include "codeedu/session/stop_check.hpp"
#include "codeedu/tools/file_io.hpp"
#include "codeedu/tools/unit_tests.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace codeedu::session {

namespace fs = std::filesystem;
using planner::TaskSpec;
using planner::TaskType;

namespace {

constexpr std::size_t material_excerpt_chars = 2000;
constexpr std::string_view report_file = "report.md";
constexpr std::string_view material_file = "material.md";

std::string trim(std::string_view text) {
    auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(b, e - b + 1));
}

std::string lower(std::string text) {
    for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return text;
}

std::string answer_text(const nlohmann::json& artifacts) {
    if (artifacts.contains("answer")) {
        const auto& a = artifacts["answer"];
        return a.is_string() ? a.get<std::string>() : a.dump();
    }
    if (artifacts.contains("question")) return artifacts["question"].get<std::string>();
    return {};
}

std::string required_field(const nlohmann::json& intake, const char* field) {
    if (!intake.is_object() || !intake.contains(field) || !intake[field].is_string() ||
        trim(intake[field].get<std::string>()).empty())
        fail(ErrorKind::missing_intake_field, std::string("intake lacks '") + field + "'", {{"field", field}});
    return trim(intake[field].get<std::string>());
}

StudentProfile profile_from_intake(const nlohmann::json& intake) {
    StudentProfile profile;
    profile.background = required_field(intake, "background");
    profile.goals = required_field(intake, "goals");
    for (const char* key : {"level", "self_reported_level"}) {
        if (intake.contains(key)) {
            require(intake[key].is_string(), std::string("'") + key + "' must be text");
            profile.self_reported_level = level_from_string(intake[key].get<std::string>());
        }
    }
    if (intake.contains("preferred_topics")) {
        const auto& topics = intake["preferred_topics"];
        if (topics.is_string()) {
            profile.preferred_topics.push_back(topics.get<std::string>());
        } else {
            require(topics.is_array(), "'preferred_topics' must be a list of text");
            for (const auto& t : topics) {
                require(t.is_string(), "'preferred_topics' must be a list of text");
                profile.preferred_topics.push_back(t.get<std::string>());
            }
        }
    }
    return profile;
}

std::string material_topic(const StudentProfile& profile) {
    if (!profile.preferred_topics.empty() && !trim(profile.preferred_topics.front()).empty())
        return trim(profile.preferred_topics.front());
    return planner::extract_topic(profile.goals);
}

nlohmann::json case_details(const tools::TestReport& report, const std::vector<tools::TestCase>& cases,
                            std::size_t limit) {
    auto failing = nlohmann::json::array();
    for (std::size_t i = 0; i < cases.size() && failing.size() < limit; ++i) {
        if (report.case_results[i]) continue;
        const auto& run = report.runs[i];
        failing.push_back({{"input", cases[i].input},
                           {"expected", cases[i].expected_output},
                           {"actual", run.stdout_text.substr(0, 400)},
                           {"verdict", tools::to_string(run.verdict)},
                           {"stderr", run.stderr_text.substr(0, 400)}});
    }
    return failing;
}

// "Recommendations:" (optionally as a heading) splits a report analyst reply
// into summary and recommendations.
std::pair<std::string, std::string> split_recommendations(const std::string& reply) {
    static const std::regex marker(R"((^|\n)[#\s]*\**recommendations\**:?\**[ \t]*)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(reply, m, marker)) return {trim(reply), {}};
    auto at = static_cast<std::size_t>(m.position(0));
    return {trim(reply.substr(0, at)), trim(reply.substr(at + m.length(0)))};
}

std::string submission_line(std::size_t n, const Submission& s) {
    std::ostringstream os;
    os << "- Submission " << n << ": exercise `" << s.exercise_id << "`, step " << s.step_index + 1 << ", "
       << s.passed << "/" << s.total << " cases passed, verdict " << (s.all_passed ? "passed" : "failed")
       << ", next " << s.next_action;
    return os.str();
}

} // namespace

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::intake: return "intake";
        case Phase::studying: return "studying";
        case Phase::exercising: return "exercising";
        case Phase::reporting: return "reporting";
        case Phase::closed: return "closed";
    }
    return "?";
}

bool transition_allowed(Phase from, Phase to) {
    switch (from) {
        case Phase::intake: return to == Phase::studying;
        case Phase::studying: return to == Phase::exercising;
        case Phase::exercising: return to == Phase::studying || to == Phase::reporting;
        case Phase::reporting: return to == Phase::closed;
        case Phase::closed: return false;
    }
    return false;
}

std::string_view to_string(NextAction action) {
    switch (action) {
        case NextAction::retry_step: return "retry_step";
        case NextAction::advance_step: return "advance_step";
        case NextAction::exercise_complete: return "exercise_complete";
    }
    return "?";
}

LearningMaterial parse_material(std::string_view text, std::string_view topic,
                                const std::vector<tools::CrawlEntry>& sources) {
    LearningMaterial material;
    material.topic = std::string(topic);
    material.markdown = trim(text);
    require(!material.markdown.empty(), "material text is empty");

    std::vector<MaterialSection> sections;
    MaterialSection preamble{std::string(topic), {}, {}};
    MaterialSection* current = &preamble;
    std::istringstream lines(material.markdown);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("## ", 0) == 0) {
            sections.push_back({trim(line.substr(3)), {}, {}});
            current = &sections.back();
            continue;
        }
        if (current == &preamble && line.rfind("# ", 0) == 0) continue;  // document title
        current->body += line + "\n";
    }
    preamble.body = trim(preamble.body);
    if (!preamble.body.empty() || sections.empty()) sections.insert(sections.begin(), preamble);

    static const std::regex ref(R"(\[(\d+)\])");
    for (auto& section : sections) {
        section.body = trim(section.body);
        auto text_all = section.heading + "\n" + section.body;
        std::set<std::string> seen;
        for (std::sregex_iterator it(text_all.begin(), text_all.end(), ref), end; it != end; ++it) {
            auto n = std::stoul((*it)[1].str());
            if (n == 0 || n > sources.size()) continue;
            const auto& url = sources[n - 1].url;
            if (seen.insert(url).second) section.source_refs.push_back(url);
        }
        if (section.source_refs.empty()) section.source_refs.push_back(std::string(model_internal));
    }
    material.sections = std::move(sections);
    return material;
}

ReportEntries parse_report(std::string_view markdown) {
    ReportEntries entries;
    std::string text(markdown);
    static const std::regex question(R"(### Question \d+\n\n([\s\S]*?)\n\n\*\*Answer:\*\*)");
    for (std::sregex_iterator it(text.begin(), text.end(), question), end; it != end; ++it)
        entries.questions.push_back((*it)[1].str());
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("- Submission ", 0) == 0) entries.submissions.push_back(line);
    return entries;
}

void to_json(nlohmann::json& j, const Event& e) {
    j = {{"seq", e.seq}, {"ts", e.ts}, {"kind", e.kind}, {"payload", e.payload}};
}

void to_json(nlohmann::json& j, const SessionInfo& s) {
    j = {{"session_id", s.session_id},   {"profile", s.profile},
         {"phase", to_string(s.phase)},  {"turn_count", s.turn_count},
         {"max_turns", s.max_turns},     {"workspace_root", s.workspace_root.string()},
         {"event_count", s.event_count}, {"current_exercise", nullptr}};
    if (s.current_exercise) j["current_exercise"] = *s.current_exercise;
}

struct TimelineEntry {
    Phase phase;
    std::int64_t seq;
};

struct QaPair {
    std::string question;
    std::string answer;
};

struct Orchestrator::State {
    std::mutex op_mutex;  // serializes session operations in arrival order

    mutable std::mutex data_mutex;  // guards what readers and streams observe
    mutable std::condition_variable events_cv;
    SessionInfo info;
    std::vector<Event> events;
    std::optional<std::string> report;

    llm::Gateway gateway;
    planner::PlanState plan;
    planner::ConversationHistory history;
    std::optional<LearningMaterial> material;
    std::map<std::string, Exercise> exercises;
    std::vector<QaPair> qa;
    std::vector<Submission> submissions;
    std::vector<TimelineEntry> timeline;
};

Orchestrator::Orchestrator(OrchestratorConfig config, const llm::Gateway& gateway,
                           std::shared_ptr<const tools::ToolInvoker> tools, agents::AgentPool agents,
                           std::shared_ptr<const tools::CodeExecutor> executor)
    : config_(std::move(config)),
      gateway_(gateway),
      tools_(std::move(tools)),
      agents_(std::move(agents)),
      executor_(std::move(executor)) {
    require(tools_ && executor_, "orchestrator needs tools and an executor");
    require(!config_.workspace_root.empty(), "orchestrator needs a workspace root");
    require(config_.max_turns > 0, "max_turns must be positive");
    tools::validate(config_.policy);
    for (const auto& p : config_.problems) eval::validate(p);
    if (!config_.clock) config_.clock = [] { return std::chrono::system_clock::now(); };
    fs::create_directories(config_.workspace_root / "sessions");
}

std::string Orchestrator::now() const {
    auto tp = config_.clock();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
    std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm utc{};
    ::gmtime_r(&secs, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &utc);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
    return out;
}

std::shared_ptr<Orchestrator::State> Orchestrator::find(const std::string& session_id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        fail(ErrorKind::unknown_session, "unknown session '" + session_id + "'", {{"session_id", session_id}});
    return it->second;
}

void Orchestrator::log(State& state, std::string kind, nlohmann::json payload) {
    std::lock_guard lock(state.data_mutex);
    Event event{static_cast<std::int64_t>(state.events.size()) + 1, now(), std::move(kind), std::move(payload)};
    nlohmann::json line = {{"ts", event.ts}, {"kind", event.kind}, {"payload", event.payload}};
    std::ofstream out(state.info.workspace_root / "events.jsonl", std::ios::app | std::ios::binary);
    out << line.dump() << '\n';
    out.flush();
    if (!out) fail(ErrorKind::tool_failure, "cannot append to the session event log");
    state.events.push_back(std::move(event));
    state.info.event_count = static_cast<std::int64_t>(state.events.size());
    state.events_cv.notify_all();
}

void Orchestrator::transition(State& state, Phase to) {
    std::lock_guard lock(state.data_mutex);
    if (state.info.phase == to) return;
    if (!transition_allowed(state.info.phase, to))
        fail(ErrorKind::invalid_phase,
             "cannot move from " + std::string(to_string(state.info.phase)) + " to " + std::string(to_string(to)),
             {{"phase", to_string(state.info.phase)}, {"target", to_string(to)}});
    state.info.phase = to;
    state.timeline.push_back({to, static_cast<std::int64_t>(state.events.size()) + 1});
}

namespace {

void require_phase(Phase actual, std::initializer_list<Phase> allowed, std::string_view operation) {
    for (auto p : allowed)
        if (p == actual) return;
    std::string names;
    for (auto p : allowed) names += (names.empty() ? "" : " or ") + std::string(to_string(p));
    fail(ErrorKind::invalid_phase,
         std::string(operation) + " needs phase " + names + ", session is " + std::string(to_string(actual)),
         {{"phase", to_string(actual)}, {"operation", operation}});
}

} // namespace

planner::TaskOutcome Orchestrator::run_task(State& state, const TaskSpec& task) {
    auto agent_list = agents_.list_agents();
    auto agent_id = planner::assign(task, agent_list, state.history, state.plan.load());
    state.plan.mark_running(task.task_id, agent_id);

    agents::AgentRuntime runtime{&state.gateway, tools_.get(),
                                 tools::ToolContext{state.info.workspace_root, &state.gateway, "", config_.policy},
                                 config_.max_agent_steps};
    planner::TaskOutcome outcome;
    try {
        outcome = agents::run_agent_task(agents_.get(agent_id), task, state.history, runtime);
    } catch (...) {
        state.plan = planner::on_event(state.plan, planner::TaskFailed{task.task_id});
        throw;
    }
    if (outcome.status == planner::OutcomeStatus::failed) {
        state.plan = planner::on_event(state.plan, planner::TaskFailed{task.task_id});
        state.history.append(outcome);
        fail(ErrorKind::provider_error,
             "agent '" + agent_id + "' failed task '" + task.task_id + "': " + outcome.artifacts.value("error", ""),
             {{"task_id", task.task_id}, {"agent_id", agent_id}});
    }
    state.plan = planner::on_event(state.plan, planner::TaskCompleted{task.task_id, agent_id});
    state.history.append(outcome);
    return outcome;
}

SessionInfo Orchestrator::start_session(const nlohmann::json& intake) {
    auto profile = profile_from_intake(intake);

    auto state = std::make_shared<State>();
    {
        std::unique_lock lock(sessions_mutex_);
        for (;; ++next_session_) {
            char id[32];
            std::snprintf(id, sizeof id, "s-%04d", next_session_);
            auto dir = config_.workspace_root / "sessions" / id;
            if (sessions_.count(id) || fs::exists(dir)) continue;
            fs::create_directories(dir / "sandbox");
            state->info.session_id = id;
            state->info.workspace_root = dir;
            ++next_session_;
            break;
        }
        sessions_[state->info.session_id] = state;
    }
    state->info.profile = profile;
    state->info.max_turns = config_.max_turns;
    state->gateway = gateway_.fork_session();

    std::lock_guard op(state->op_mutex);
    transition(*state, Phase::studying);
    log(*state, "intake", {{"profile", profile}, {"max_turns", config_.max_turns}});
    return info(state->info.session_id);
}

SessionInfo Orchestrator::info(const std::string& session_id) const {
    auto state = find(session_id);
    std::lock_guard lock(state->data_mutex);
    return state->info;
}

LearningMaterial Orchestrator::generate_material(const std::string& session_id) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    require_phase(state->info.phase, {Phase::studying}, "generate_material");

    const auto& profile = state->info.profile;
    auto topic = material_topic(profile);
    planner::DecomposeOptions options;
    options.id_prefix = state->plan.next_id("m") + "-";
    auto chain = planner::decompose("teach me " + topic, profile, state->history, options);

    std::vector<TaskSpec> tasks;
    for (auto& t : chain)
        if (t.type == TaskType::knowledge_retrieval || t.type == TaskType::material_generation) tasks.push_back(t);
    require(tasks.size() == 2, "learning chain lacks retrieval and material tasks");
    for (const auto& t : tasks) state->plan.add_task(t);

    auto crawl_outcome = run_task(*state, tasks[0]);
    std::vector<tools::CrawlEntry> sources;
    if (crawl_outcome.artifacts.contains("crawl"))
        sources = crawl_outcome.artifacts["crawl"].get<std::vector<tools::CrawlEntry>>();

    auto numbered = nlohmann::json::array();
    for (std::size_t i = 0; i < sources.size(); ++i)
        numbered.push_back({{"n", i + 1},
                            {"title", sources[i].title},
                            {"url", sources[i].url},
                            {"snippet", sources[i].snippet},
                            {"text", sources[i].fetched_text.substr(0, 1500)}});
    auto material_task = tasks[1];
    material_task.inputs["sources"] = numbered;
    material_task.inputs["background"] = profile.background;
    material_task.inputs["goals"] = profile.goals;
    material_task.inputs["format"] =
        "Markdown. Start each section with a '## ' heading. Cite sources by number as [n]; "
        "leave uncited what comes from your own knowledge.";
    auto outcome = run_task(*state, material_task);

    auto material = parse_material(answer_text(outcome.artifacts), topic, sources);
    material.generated_for = state->info.session_id;
    tools::file_io(state->info.workspace_root, tools::FileMode::write, std::string(material_file), material.markdown);
    state->material = material;

    auto sections = nlohmann::json::array();
    for (const auto& s : material.sections) sections.push_back({{"heading", s.heading}, {"source_refs", s.source_refs}});
    log(*state, "material",
        {{"topic", topic}, {"sections", sections}, {"path", material_file}, {"sources", sources.size()}});
    return material;
}

Answer Orchestrator::answer_question(const std::string& session_id, const std::string& question) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    require_phase(state->info.phase, {Phase::studying, Phase::exercising}, "answer_question");
    require(!trim(question).empty(), "question must be non-empty");
    if (state->info.turn_count >= state->info.max_turns)
        fail(ErrorKind::turn_limit_reached, "turn limit of " + std::to_string(state->info.max_turns) + " reached",
             {{"turn_count", state->info.turn_count}, {"max_turns", state->info.max_turns}});

    int turn;
    {
        std::lock_guard lock(state->data_mutex);
        turn = ++state->info.turn_count;
    }
    log(*state, "question", {{"text", question}, {"turn", turn}});
    state->history.append(llm::ChatMessage::user(question));

    auto id = state->plan.next_id("qa");
    state->plan = planner::on_event(state->plan, planner::UserMessage{question});
    auto task = state->plan.task(id);
    if (state->material) task.inputs["material"] = state->material->markdown.substr(0, material_excerpt_chars);

    auto outcome = run_task(*state, task);
    Answer answer{answer_text(outcome.artifacts), turn, false};
    state->qa.push_back({question, answer.text});
    state->history.append(llm::ChatMessage::assistant(answer.text, outcome.agent_id));
    log(*state, "answer", {{"text", answer.text}, {"turn", turn}, {"agent_id", outcome.agent_id}});
    answer.stop_suggested = stop_check(*state);
    return answer;
}

Exercise Orchestrator::start_exercise(const std::string& session_id, const std::optional<std::string>& exercise_id) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    require_phase(state->info.phase, {Phase::studying, Phase::exercising}, "start_exercise");

    const eval::Problem* chosen = nullptr;
    if (exercise_id) {
        for (const auto& p : config_.problems)
            if (p.problem_id == *exercise_id) chosen = &p;
        if (!chosen)
            fail(ErrorKind::unknown_exercise, "unknown exercise '" + *exercise_id + "'", {{"exercise_id", *exercise_id}});
    } else {
        if (config_.problems.empty()) fail(ErrorKind::unknown_exercise, "no exercises are configured");
        std::set<std::string> wanted;
        for (const auto& t : state->info.profile.preferred_topics) wanted.insert(lower(trim(t)));
        if (state->material) wanted.insert(lower(state->material->topic));
        for (const auto& p : config_.problems) {
            for (const auto& t : p.topics)
                if (wanted.count(lower(t))) chosen = &p;
            if (chosen) break;
        }
        if (!chosen) chosen = &config_.problems.front();
    }

    auto it = state->exercises.find(chosen->problem_id);
    if (it == state->exercises.end()) {
        Exercise exercise{chosen->problem_id, chosen->statement, eval::exercise_steps(*chosen), chosen->test_cases};
        it = state->exercises.emplace(chosen->problem_id, std::move(exercise)).first;
    }
    transition(*state, Phase::exercising);
    {
        std::lock_guard lock(state->data_mutex);
        state->info.current_exercise = chosen->problem_id;
    }
    auto steps = nlohmann::json::array();
    for (const auto& s : it->second.steps) steps.push_back({{"prompt", s.prompt}, {"hint", s.hint}, {"cases", s.cases.size()}});
    log(*state, "exercise",
        {{"exercise_id", chosen->problem_id},
         {"statement", chosen->statement},
         {"steps", steps},
         {"current_step", it->second.current_step}});
    return it->second;
}

Feedback Orchestrator::submit_code(const std::string& session_id, const std::string& exercise_id,
                                   std::size_t step_index, const std::string& source) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    require_phase(state->info.phase, {Phase::exercising}, "submit_code");
    auto it = state->exercises.find(exercise_id);
    if (it == state->exercises.end())
        fail(ErrorKind::unknown_exercise, "exercise '" + exercise_id + "' is not active in this session",
             {{"exercise_id", exercise_id}});
    auto& exercise = it->second;
    require(!exercise.complete, "exercise '" + exercise_id + "' is already complete");
    if (step_index != exercise.current_step)
        fail(ErrorKind::precondition,
             "step " + std::to_string(step_index) + " is not the current step " + std::to_string(exercise.current_step),
             {{"current_step", exercise.current_step}});
    require(!trim(source).empty(), "source must be non-empty");
    if (state->info.turn_count >= state->info.max_turns)
        fail(ErrorKind::turn_limit_reached, "turn limit of " + std::to_string(state->info.max_turns) + " reached",
             {{"turn_count", state->info.turn_count}, {"max_turns", state->info.max_turns}});

    int turn;
    {
        std::lock_guard lock(state->data_mutex);
        turn = ++state->info.turn_count;
    }
    log(*state, "submission", {{"exercise_id", exercise_id}, {"step_index", step_index}, {"source", source}, {"turn", turn}});

    const auto& step = exercise.steps[step_index];
    std::vector<tools::TestCase> cases;
    for (auto c : step.cases) cases.push_back(exercise.test_cases[c]);
    Feedback feedback;
    feedback.verdict = tools::run_unit_tests(*executor_, source, cases, config_.policy,
                                             state->info.workspace_root / "sandbox");
    bool last = step_index + 1 == exercise.steps.size();
    feedback.next_action = !feedback.verdict.all_passed ? NextAction::retry_step
                           : last                       ? NextAction::exercise_complete
                                                        : NextAction::advance_step;

    TaskSpec review;
    review.task_id = state->plan.next_id("review");
    review.type = TaskType::debugging_review;
    review.description = feedback.verdict.all_passed
                             ? "The submission passes this step. Suggest optimizations or style improvements."
                             : "The submission fails some cases. Explain the likely bug and how to revise it.";
    review.inputs = {{"exercise", exercise.statement},
                     {"step", step.prompt},
                     {"hint", step.hint},
                     {"source", source},
                     {"report",
                      {{"passed", feedback.verdict.passed_count()},
                       {"total", cases.size()},
                       {"failing_cases", case_details(feedback.verdict, cases, 3)}}}};
    review.priority = 10;
    state->plan.add_task(review);
    auto outcome = run_task(*state, review);
    feedback.suggestions = trim(answer_text(outcome.artifacts));
    if (feedback.suggestions.empty())
        feedback.suggestions = std::to_string(feedback.verdict.passed_count()) + "/" + std::to_string(cases.size()) +
                               " cases passed.";

    if (feedback.next_action == NextAction::advance_step) ++exercise.current_step;
    if (feedback.next_action == NextAction::exercise_complete) exercise.complete = true;

    Submission record{exercise_id, step_index, feedback.verdict.passed_count(), cases.size(),
                      feedback.verdict.all_passed, std::string(to_string(feedback.next_action))};
    state->submissions.push_back(record);
    log(*state, "feedback",
        {{"exercise_id", exercise_id},
         {"step_index", step_index},
         {"case_results", feedback.verdict.case_results},
         {"passed", record.passed},
         {"total", record.total},
         {"all_passed", record.all_passed},
         {"suggestions", feedback.suggestions},
         {"next_action", record.next_action},
         {"turn", turn}});
    feedback.stop_suggested = stop_check(*state);
    return feedback;
}

LearningReport Orchestrator::generate_report(const std::string& session_id) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    {
        std::lock_guard lock(state->data_mutex);
        require(state->events.size() > 1, "nothing to report yet: the session has no activity beyond intake");
    }
    require_phase(state->info.phase, {Phase::exercising, Phase::reporting}, "generate_report");

    LearningReport report;
    for (const auto& q : state->qa) report.questions.push_back(q.question);
    report.submissions = state->submissions;

    auto submissions = nlohmann::json::array();
    for (std::size_t i = 0; i < report.submissions.size(); ++i)
        submissions.push_back(submission_line(i + 1, report.submissions[i]).substr(2));
    TaskSpec task;
    task.task_id = state->plan.next_id("report");
    task.type = TaskType::report_generation;
    task.description =
        "Summarize the student's learning trajectory in one short paragraph, then write a line "
        "'Recommendations:' followed by concrete next steps.";
    task.inputs = {{"profile", state->info.profile},
                   {"topic", state->material ? state->material->topic : material_topic(state->info.profile)},
                   {"questions", report.questions},
                   {"submissions", submissions}};
    task.priority = 5;
    state->plan.add_task(task);
    auto outcome = run_task(*state, task);
    std::tie(report.summary, report.recommendations) = split_recommendations(answer_text(outcome.artifacts));
    if (report.summary.empty()) report.summary = "The session covered the activity listed below.";
    if (report.recommendations.empty()) report.recommendations = "Revisit any step that did not pass and retry it.";

    transition(*state, Phase::reporting);

    const auto& info = state->info;
    std::ostringstream md;
    md << "# Learning Report\n\n"
       << "- Session: " << info.session_id << "\n"
       << "- Generated: " << now() << "\n"
       << "- Level: " << to_string(info.profile.self_reported_level) << "\n"
       << "- Goals: " << info.profile.goals << "\n\n";
    md << "## Summary\n\n" << report.summary << "\n\nTimeline:\n";
    {
        std::lock_guard lock(state->data_mutex);
        for (const auto& entry : state->timeline) {
            md << "- " << to_string(entry.phase) << " from event " << entry.seq << "\n";
            std::string ts = entry.seq <= static_cast<std::int64_t>(state->events.size())
                                 ? state->events[static_cast<std::size_t>(entry.seq - 1)].ts
                                 : now();
            report.timeline.emplace_back(std::string(to_string(entry.phase)), ts);
        }
    }
    md << "\n## Materials\n\n";
    if (state->material) {
        md << "Topic: " << state->material->topic << "\n\n";
        for (const auto& s : state->material->sections) {
            md << "- " << s.heading << " (sources: ";
            for (std::size_t i = 0; i < s.source_refs.size(); ++i) md << (i ? ", " : "") << s.source_refs[i];
            md << ")\n";
        }
    } else {
        md << "No material was generated.\n";
    }
    md << "\n## Q&A\n\n";
    if (state->qa.empty()) md << "No questions were asked.\n\n";
    for (std::size_t i = 0; i < state->qa.size(); ++i)
        md << "### Question " << i + 1 << "\n\n" << state->qa[i].question << "\n\n**Answer:**\n\n"
           << state->qa[i].answer << "\n\n";
    md << "## Submissions\n\n";
    if (report.submissions.empty()) md << "No code was submitted.\n";
    for (std::size_t i = 0; i < report.submissions.size(); ++i)
        md << submission_line(i + 1, report.submissions[i]) << "\n";
    md << "\n## Recommendations\n\n" << report.recommendations << "\n";
    report.content = md.str();

    tools::ToolContext context{info.workspace_root, &state->gateway, agents::roles::report_analyst, config_.policy};
    tools_->invoke(tools::file_io_tool,
                   {{"mode", "write"}, {"path", std::string(report_file)}, {"content", report.content}}, context);
    report.path = info.workspace_root / report_file;
    {
        std::lock_guard lock(state->data_mutex);
        state->report = report.content;
    }
    log(*state, "report",
        {{"path", report_file}, {"questions", report.questions.size()}, {"submissions", report.submissions.size()}});
    return report;
}

std::optional<std::string> Orchestrator::report(const std::string& session_id) const {
    auto state = find(session_id);
    std::lock_guard lock(state->data_mutex);
    return state->report;
}

void Orchestrator::close(const std::string& session_id) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    require_phase(state->info.phase, {Phase::reporting}, "close");
    transition(*state, Phase::closed);
    log(*state, "close", nlohmann::json::object());
}

std::vector<Event> Orchestrator::events(const std::string& session_id, std::int64_t from_seq,
                                        std::chrono::milliseconds wait) const {
    auto state = find(session_id);
    auto first = std::max<std::int64_t>(from_seq, 1);
    std::unique_lock lock(state->data_mutex);
    state->events_cv.wait_for(lock, wait, [&] { return static_cast<std::int64_t>(state->events.size()) >= first; });
    if (static_cast<std::int64_t>(state->events.size()) < first) return {};
    return {state->events.begin() + (first - 1), state->events.end()};
}

bool Orchestrator::should_stop_early(const std::string& session_id) {
    auto state = find(session_id);
    std::lock_guard op(state->op_mutex);
    return stop_check(*state);
}

bool Orchestrator::stop_check(State& state) {
    return objectives_met(state.gateway, state.info.profile.goals, state.info.turn_count, state.history.render(6));
}

} // namespace codeedu::session
