#include <catch_amalgamated.hpp>

#include "codeedu/api/server.hpp"
#include "test_support.hpp"

#include <condition_variable>
#include <fstream>
#include <thread>

using namespace codeedu;
using namespace codeedu::session;
using nlohmann::json;
using codeedu::testing::TempDir;

namespace {

// Canned SessionService: records what the HTTP layer passes in and throws
// whatever error the test arms.
class StubService : public SessionService {
public:
    std::optional<Error> next_error;
    std::vector<std::string> calls;
    json last_intake;
    std::string last_text, last_source, last_exercise;
    std::size_t last_step = 0;
    std::optional<std::string> stored_report;
    Phase phase = Phase::studying;

    void push_event(std::string kind) {
        std::lock_guard lock(mutex_);
        events_.push_back({static_cast<std::int64_t>(events_.size()) + 1, "2025-01-01T00:00:00.000Z", std::move(kind),
                           {{"n", events_.size() + 1}}});
        cv_.notify_all();
    }

    SessionInfo start_session(const json& intake) override {
        record("start_session");
        last_intake = intake;
        return known();
    }
    SessionInfo info(const std::string& id) const override {
        check(id);
        return known();
    }
    LearningMaterial generate_material(const std::string& id) override {
        record("generate_material", id);
        return {"loops", {{"Core idea", "for loops", {"https://docs.example.org/loops"}}}, id, "## Core idea\n\nfor loops"};
    }
    Answer answer_question(const std::string& id, const std::string& text) override {
        record("answer_question", id);
        last_text = text;
        return {"an answer", 3, false};
    }
    Exercise start_exercise(const std::string& id, const std::optional<std::string>& eid) override {
        record("start_exercise", id);
        last_exercise = eid.value_or("");
        return {eid.value_or("sum-to-n"), "Sum to N", {{"step 1", "hint", {0}}}, {}, 0, false};
    }
    Feedback submit_code(const std::string& id, const std::string& eid, std::size_t step,
                         const std::string& source) override {
        record("submit_code", id);
        last_exercise = eid;
        last_step = step;
        last_source = source;
        Feedback f;
        f.verdict.case_results = {true, true};
        f.verdict.all_passed = true;
        f.suggestions = "well done";
        f.next_action = NextAction::exercise_complete;
        return f;
    }
    LearningReport generate_report(const std::string& id) override {
        record("generate_report", id);
        LearningReport r;
        r.summary = "summary";
        r.content = "# Learning Report\n";
        r.path = "/tmp/x/report.md";
        stored_report = r.content;
        return r;
    }
    std::optional<std::string> report(const std::string& id) const override {
        check(id);
        return stored_report;
    }
    void close(const std::string& id) override {
        record("close", id);
        phase = Phase::closed;
    }
    std::vector<Event> events(const std::string& id, std::int64_t from, std::chrono::milliseconds wait) const override {
        check(id);
        auto first = std::max<std::int64_t>(from, 1);
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, wait, [&] { return static_cast<std::int64_t>(events_.size()) >= first; });
        if (static_cast<std::int64_t>(events_.size()) < first) return {};
        return {events_.begin() + (first - 1), events_.end()};
    }

private:
    SessionInfo known() const {
        SessionInfo info;
        info.session_id = "s-0001";
        info.phase = phase;
        info.profile = {"nurse", "learn loops", Level::low, {"loops"}};
        return info;
    }
    void check(const std::string& id) const {
        if (id != "s-0001") throw Error(ErrorKind::unknown_session, "unknown session '" + id + "'", {{"session_id", id}});
    }
    void record(std::string call, const std::string& id = "s-0001") {
        check(id);
        calls.push_back(std::move(call));
        if (next_error) {
            auto e = *next_error;
            next_error.reset();
            throw e;
        }
    }

    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    std::vector<Event> events_;
};

// Serves a SessionService on an ephemeral loopback port for one test.
struct Served {
    api::ApiServer server;
    int port;
    std::thread thread;

    static api::ServerConfig quick_poll() {
        api::ServerConfig config;
        config.stream_poll = std::chrono::milliseconds(50);
        return config;
    }

    explicit Served(SessionService& service)
        : server(service, quick_poll()),
          port(server.bind_any_port()),
          thread([this] { server.listen_after_bind(); }) {
        REQUIRE(port > 0);
        server.http().wait_until_ready();
    }
    ~Served() {
        server.stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        return c;
    }
};

json body_of(const httplib::Result& r) { return json::parse(r->body); }

} // namespace

TEST_CASE("every error kind maps to one api code and status", "[api]") {
    CHECK(api::http_status(api::ApiCode::bad_request) == 400);
    CHECK(api::http_status(api::ApiCode::not_found) == 404);
    CHECK(api::http_status(api::ApiCode::conflict) == 409);
    CHECK(api::http_status(api::ApiCode::turn_limit) == 429);
    CHECK(api::http_status(api::ApiCode::internal) == 500);
    CHECK(api::api_code(ErrorKind::missing_intake_field) == api::ApiCode::bad_request);
    CHECK(api::api_code(ErrorKind::unknown_session) == api::ApiCode::not_found);
    CHECK(api::api_code(ErrorKind::unknown_exercise) == api::ApiCode::not_found);
    CHECK(api::api_code(ErrorKind::invalid_phase) == api::ApiCode::conflict);
    CHECK(api::api_code(ErrorKind::turn_limit_reached) == api::ApiCode::turn_limit);
    CHECK(api::api_code(ErrorKind::sandbox_setup_failure) == api::ApiCode::internal);

    auto body = api::error_body(Error(ErrorKind::turn_limit_reached, "turn limit of 20 reached", {{"max_turns", 20}}));
    CHECK(body["code"] == "turn_limit");
    CHECK(body["message"] == "turn limit of 20 reached");
    CHECK(body["detail"]["max_turns"] == 20);
    CHECK(body["detail"]["kind"] == "turn_limit_reached");
}

TEST_CASE("bind address and workspace come from the environment", "[api]") {
    ::setenv("CODEEDU_BIND_ADDR", "0.0.0.0:9123", 1);
    ::setenv("CODEEDU_WORKSPACE_ROOT", "/srv/codeedu", 1);
    auto config = api::config_from_env();
    CHECK(config.host == "0.0.0.0");
    CHECK(config.port == 9123);
    CHECK(config.workspace_root == "/srv/codeedu");
    ::setenv("CODEEDU_BIND_ADDR", "localhost:notaport", 1);
    CHECK_THROWS_AS(api::config_from_env(), Error);
    ::unsetenv("CODEEDU_BIND_ADDR");
    ::unsetenv("CODEEDU_WORKSPACE_ROOT");
    config = api::config_from_env();
    CHECK(config.host == "127.0.0.1");
    CHECK(config.port == 8080);
}

TEST_CASE("session endpoints pass requests through unchanged", "[api]") {
    StubService stub;
    Served served(stub);
    auto c = served.client();

    json intake = {{"background", "nurse"}, {"goals", "learn loops"}, {"level", "low"}};
    auto r = c.Post("/sessions", intake.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
    CHECK(body_of(r)["session_id"] == "s-0001");
    CHECK(stub.last_intake == intake);

    r = c.Get("/sessions/s-0001");
    CHECK(r->status == 200);
    CHECK(body_of(r)["phase"] == "studying");

    r = c.Post("/sessions/s-0001/messages", R"({"text":"what is a loop?"})", "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r) == json{{"answer", "an answer"}, {"turn_count", 3}, {"stop_suggested", false}});
    CHECK(stub.last_text == "what is a loop?");

    r = c.Post("/sessions/s-0001/material", "", "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["sections"][0]["source_refs"][0] == "https://docs.example.org/loops");

    r = c.Post("/sessions/s-0001/exercises", R"({"exercise_id":"factorial"})", "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["exercise_id"] == "factorial");

    r = c.Post("/sessions/s-0001/exercises/factorial/submissions", R"j({"step_index":0,"source":"print(1)"})j",
               "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["next_action"] == "exercise_complete");
    CHECK(body_of(r)["verdict"]["case_results"] == json::array({true, true}));
    CHECK(stub.last_exercise == "factorial");
    CHECK(stub.last_source == "print(1)");

    r = c.Get("/sessions/s-0001/report");
    CHECK(r->status == 404);
    CHECK(body_of(r)["code"] == "not_found");

    r = c.Post("/sessions/s-0001/report", "", "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["content"] == "# Learning Report\n");
    for (int i = 0; i < 2; ++i) {
        r = c.Get("/sessions/s-0001/report");
        CHECK(r->status == 200);
        CHECK(r->body == "# Learning Report\n");
        CHECK(r->get_header_value("Content-Disposition").find("attachment") != std::string::npos);
    }

    r = c.Post("/sessions/s-0001/close", "", "application/json");
    CHECK(body_of(r)["phase"] == "closed");

    CHECK(stub.calls == std::vector<std::string>{"start_session", "answer_question", "generate_material",
                                                 "start_exercise", "submit_code", "generate_report", "close"});
}

TEST_CASE("service errors become api errors", "[api]") {
    StubService stub;
    Served served(stub);
    auto c = served.client();

    stub.next_error = Error(ErrorKind::missing_intake_field, "intake lacks 'background'", {{"field", "background"}});
    auto r = c.Post("/sessions", R"({"goals":"x"})", "application/json");
    CHECK(r->status == 400);
    CHECK(body_of(r)["code"] == "bad_request");
    CHECK(body_of(r)["detail"]["field"] == "background");

    r = c.Get("/sessions/s-0404");
    CHECK(r->status == 404);
    CHECK(body_of(r)["detail"]["kind"] == "unknown_session");
    CHECK(c.Post("/sessions/s-0404/messages", R"({"text":"hi"})", "application/json")->status == 404);

    stub.next_error = Error(ErrorKind::turn_limit_reached, "turn limit of 20 reached");
    r = c.Post("/sessions/s-0001/messages", R"({"text":"hi"})", "application/json");
    CHECK(r->status == 429);
    CHECK(body_of(r)["code"] == "turn_limit");

    stub.next_error = Error(ErrorKind::invalid_phase, "submit_code needs phase exercising");
    CHECK(c.Post("/sessions/s-0001/exercises/x/submissions", R"({"step_index":0,"source":"p"})", "application/json")
              ->status == 409);

    stub.next_error = Error(ErrorKind::unknown_exercise, "unknown exercise 'x'");
    CHECK(c.Post("/sessions/s-0001/exercises/x/submissions", R"({"step_index":0,"source":"p"})", "application/json")
              ->status == 404);

    stub.next_error = Error(ErrorKind::sandbox_setup_failure, "cannot create scratch directory", {{"errno", 13}});
    r = c.Post("/sessions/s-0001/exercises/x/submissions", R"({"step_index":0,"source":"p"})", "application/json");
    CHECK(r->status == 500);
    CHECK(body_of(r)["code"] == "internal");
    CHECK(body_of(r)["detail"]["kind"] == "sandbox_setup_failure");

    stub.next_error = Error(ErrorKind::provider_unreachable, "connect to 10.0.0.7:443 failed");
    r = c.Post("/sessions/s-0001/messages", R"({"text":"hi"})", "application/json");
    CHECK(r->status == 500);
    CHECK(body_of(r)["message"].get<std::string>().find("10.0.0.7") == std::string::npos);

    CHECK(c.Post("/sessions/s-0001/messages", "{not json", "application/json")->status == 400);
    CHECK(c.Post("/sessions/s-0001/messages", R"({"text":5})", "application/json")->status == 400);
    CHECK(c.Post("/sessions/s-0001/exercises/x/submissions", R"({"step_index":-1,"source":"p"})", "application/json")
              ->status == 400);
    CHECK(c.Get("/sessions/s-0001/events?from=abc")->status == 400);
    r = c.Get("/no/such/route");
    CHECK(r->status == 404);
    CHECK(body_of(r)["code"] == "not_found");
}

TEST_CASE("event streams replay from a sequence number and then tail", "[api]") {
    StubService stub;
    for (auto kind : {"intake", "material", "question"}) stub.push_event(kind);
    Served served(stub);
    auto c = served.client();

    auto r = c.Get("/sessions/s-0001/events?from=0&follow=0");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type").rfind("text/event-stream", 0) == 0);
    CHECK(r->body == api::sse_frame(stub.events("s-0001", 1, {})[0]) + api::sse_frame(stub.events("s-0001", 2, {})[0]) +
                         api::sse_frame(stub.events("s-0001", 3, {})[0]));
    CHECK(r->body.rfind("id: 1\nevent: intake\ndata: {", 0) == 0);

    r = c.Get("/sessions/s-0001/events?from=3&follow=0");
    CHECK(r->body == api::sse_frame(stub.events("s-0001", 3, {})[0]));
    r = c.Get("/sessions/s-0001/events?follow=0", {{"Last-Event-ID", "1"}});
    CHECK(r->body.rfind("id: 2\n", 0) == 0);
    CHECK(c.Get("/sessions/s-0404/events")->status == 404);

    // Live tail: frames after the backlog arrive as they are logged.
    std::string received;
    std::jthread producer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(150));
        stub.push_event("answer");
    });
    auto tail = c.Get("/sessions/s-0001/events?from=2", [&](const char* data, std::size_t n) {
        received.append(data, n);
        return received.find("id: 4\n") == std::string::npos || received.find("\n\n", received.find("id: 4\n")) ==
                                                                     std::string::npos;
    });
    CHECK(received.find("id: 2\n") != std::string::npos);
    CHECK(received.find("id: 4\nevent: answer\n") != std::string::npos);
    CHECK(received.find("id: 1\n") == std::string::npos);

    // A closed session ends the stream after its last frame.
    stub.push_event("close");
    stub.phase = Phase::closed;
    r = c.Get("/sessions/s-0001/events?from=5");
    CHECK(r->status == 200);
    CHECK(r->body.rfind("id: 5\nevent: close\n", 0) == 0);
}

TEST_CASE("the api over a real orchestrator enforces the turn cap and serves report bytes", "[api][session]") {
    TempDir workspace;
    auto provider = std::make_shared<llm::MockProvider>();
    auto reply = [](std::string text) {
        llm::ScriptedFixture f;
        f.mode = llm::ScriptedFixture::Mode::substring;
        f.fallback = std::move(text);
        return f;
    };
    provider->set_fixture("tutor", reply("A loop repeats a block."));
    provider->set_fixture("report_analyst", reply("Good progress.\nRecommendations: keep practising."));
    provider->set_fixture("programmer", reply("Looks right."));
    provider->set_fixture("stop_check", reply("NO"));
    llm::Gateway gateway;
    gateway.register_provider("mock", provider);
    std::vector<std::string> roles{"planner", "researcher", "report_analyst", "programmer", "tutor"};
    for (auto& b : llm::default_bindings("mock", "scripted", roles)) gateway.bind(b);
    auto executor = testing::echo_executor();
    auto registry = std::make_shared<tools::ToolRegistry>(executor, tools::CrawlerConfig{workspace.path(), false, ""});
    OrchestratorConfig config;
    config.workspace_root = workspace.path();
    config.problems = eval::load_problems(testing::data_dir() / "problems" / "toy.jsonl", 10);
    Orchestrator orchestrator(config, gateway, registry,
                              agents::AgentPool::with_defaults(testing::asset_dir() / "prompts", *registry), executor);
    Served served(orchestrator);
    auto c = served.client();

    auto r = c.Post("/sessions", R"({"background":"nurse","goals":"learn loops"})", "application/json");
    REQUIRE(r->status == 201);
    auto id = body_of(r)["session_id"].get<std::string>();
    CHECK(c.Post("/sessions", R"({"background":"nurse","goals":"learn loops"})", "application/json")->status == 201);
    CHECK(c.Post("/sessions", R"({"goals":"learn loops"})", "application/json")->status == 400);

    for (int i = 1; i <= 20; ++i) {
        r = c.Post(("/sessions/" + id + "/messages").c_str(), json{{"text", "q" + std::to_string(i)}}.dump(),
                   "application/json");
        REQUIRE(r->status == 200);
        CHECK(body_of(r)["turn_count"] == i);
    }
    r = c.Post(("/sessions/" + id + "/messages").c_str(), R"({"text":"q21"})", "application/json");
    CHECK(r->status == 429);
    CHECK(body_of(r)["code"] == "turn_limit");

    CHECK(c.Post(("/sessions/" + id + "/report").c_str(), "", "application/json")->status == 409);
    CHECK(c.Post(("/sessions/" + id + "/exercises").c_str(), "{}", "application/json")->status == 200);
    CHECK(c.Post(("/sessions/" + id + "/exercises/nope/submissions").c_str(), R"({"step_index":0,"source":"p"})",
                 "application/json")
              ->status == 404);
    CHECK(c.Post(("/sessions/" + id + "/report").c_str(), "", "application/json")->status == 200);

    auto first = c.Get(("/sessions/" + id + "/report").c_str());
    auto second = c.Get(("/sessions/" + id + "/report").c_str());
    std::ifstream file(workspace.path() / "sessions" / id / "report.md", std::ios::binary);
    std::string on_disk{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
    CHECK(first->body == on_disk);
    CHECK(second->body == on_disk);

    // Every frame arrives once, in order, without gaps.
    r = c.Get(("/sessions/" + id + "/events?follow=0").c_str());
    std::int64_t expected = 1;
    for (std::size_t at = r->body.find("id: "); at != std::string::npos; at = r->body.find("\nid: ", at + 1)) {
        auto start = r->body[at] == '\n' ? at + 5 : at + 4;
        CHECK(std::stoll(r->body.substr(start)) == expected++);
    }
    CHECK(expected - 1 == orchestrator.info(id).event_count);
}
