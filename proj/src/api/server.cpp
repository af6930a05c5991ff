#include "codeedu/api/server.hpp"

#include <cstdlib>

namespace codeedu::api {

using nlohmann::json;
using session::Phase;

namespace {

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) fail(ErrorKind::schema_mismatch, "request body is not valid JSON");
    if (!body.is_object()) fail(ErrorKind::schema_mismatch, "request body must be a JSON object");
    return body;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& error) {
    send_json(res, error_body(error), http_status(api_code(error.kind())));
}

// Runs a handler, turning every failure into an ApiError body.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const std::exception&) {
            send_json(res, {{"code", "internal"}, {"message", "internal error"}, {"detail", {{"kind", "internal"}}}},
                      500);
        }
    };
}

std::string text_field(const json& body, const char* field) {
    if (!body.contains(field) || !body[field].is_string())
        fail(ErrorKind::schema_mismatch, std::string("'") + field + "' must be text", {{"field", field}});
    return body[field].get<std::string>();
}

std::int64_t parse_seq(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        auto v = std::stoll(text, &used);
        if (used == text.size() && v >= 0) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::schema_mismatch, std::string(what) + " must be a non-negative integer", {{"field", what}});
}

} // namespace

std::string_view to_string(ApiCode code) {
    switch (code) {
        case ApiCode::bad_request: return "bad_request";
        case ApiCode::not_found: return "not_found";
        case ApiCode::conflict: return "conflict";
        case ApiCode::turn_limit: return "turn_limit";
        case ApiCode::internal: return "internal";
    }
    return "internal";
}

int http_status(ApiCode code) {
    switch (code) {
        case ApiCode::bad_request: return 400;
        case ApiCode::not_found: return 404;
        case ApiCode::conflict: return 409;
        case ApiCode::turn_limit: return 429;
        case ApiCode::internal: return 500;
    }
    return 500;
}

ApiCode api_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::precondition:
        case ErrorKind::missing_intake_field:
        case ErrorKind::schema_mismatch:
        case ErrorKind::path_escape: return ApiCode::bad_request;
        case ErrorKind::not_found:
        case ErrorKind::unknown_session:
        case ErrorKind::unknown_exercise: return ApiCode::not_found;
        case ErrorKind::invalid_phase: return ApiCode::conflict;
        case ErrorKind::turn_limit_reached: return ApiCode::turn_limit;
        default: return ApiCode::internal;
    }
}

json error_body(const Error& error) {
    auto code = api_code(error.kind());
    json detail = error.detail().is_object() ? error.detail() : json::object();
    detail["kind"] = codeedu::to_string(error.kind());
    // Internal failures keep their kind but not their host-side message.
    std::string message = code == ApiCode::internal && error.kind() != ErrorKind::sandbox_setup_failure
                              ? "internal error: " + std::string(codeedu::to_string(error.kind()))
                              : error.what();
    return {{"code", to_string(code)}, {"message", message}, {"detail", detail}};
}

ServerConfig config_from_env() {
    ServerConfig config;
    if (const char* bind = std::getenv("CODEEDU_BIND_ADDR"); bind && *bind) {
        std::string addr = bind;
        auto colon = addr.rfind(':');
        if (colon == std::string::npos) {
            config.host = addr;
        } else {
            config.host = addr.substr(0, colon);
            try {
                config.port = std::stoi(addr.substr(colon + 1));
            } catch (const std::exception&) {
                fail(ErrorKind::config, "CODEEDU_BIND_ADDR port is not a number: " + addr);
            }
        }
        if (config.port <= 0 || config.port > 65535) fail(ErrorKind::config, "CODEEDU_BIND_ADDR port out of range");
    }
    if (const char* root = std::getenv("CODEEDU_WORKSPACE_ROOT"); root && *root) config.workspace_root = root;
    return config;
}

std::string sse_frame(const session::Event& event) {
    return "id: " + std::to_string(event.seq) + "\nevent: " + event.kind + "\ndata: " + json(event).dump() + "\n\n";
}

json material_json(const session::LearningMaterial& m) {
    json sections = json::array();
    for (const auto& s : m.sections)
        sections.push_back({{"heading", s.heading}, {"body", s.body}, {"source_refs", s.source_refs}});
    return {{"topic", m.topic}, {"sections", sections}, {"generated_for", m.generated_for}, {"markdown", m.markdown}};
}

json exercise_json(const session::Exercise& e) {
    json steps = json::array();
    for (const auto& s : e.steps) steps.push_back({{"prompt", s.prompt}, {"hint", s.hint}, {"cases", s.cases.size()}});
    return {{"exercise_id", e.exercise_id},
            {"statement", e.statement},
            {"steps", steps},
            {"current_step", e.current_step},
            {"complete", e.complete}};
}

json feedback_json(const session::Feedback& f) {
    return {{"verdict", f.verdict},
            {"passed", f.verdict.passed_count()},
            {"total", f.verdict.case_results.size()},
            {"suggestions", f.suggestions},
            {"next_action", session::to_string(f.next_action)},
            {"stop_suggested", f.stop_suggested}};
}

json report_json(const session::LearningReport& r) {
    json submissions = json::array();
    for (const auto& s : r.submissions)
        submissions.push_back({{"exercise_id", s.exercise_id},
                               {"step_index", s.step_index},
                               {"passed", s.passed},
                               {"total", s.total},
                               {"all_passed", s.all_passed},
                               {"next_action", s.next_action}});
    json timeline = json::array();
    for (const auto& [phase, ts] : r.timeline) timeline.push_back({{"phase", phase}, {"ts", ts}});
    return {{"summary", r.summary},         {"timeline", timeline}, {"questions", r.questions},
            {"submissions", submissions}, {"recommendations", r.recommendations},
            {"path", r.path.filename().string()}, {"content", r.content}};
}

ApiServer::ApiServer(session::SessionService& service, ServerConfig config)
    : service_(service), config_(std::move(config)) {
    routes();
}

void ApiServer::routes() {
    auto& svc = service_;

    server_.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        auto info = svc.start_session(parse_body(req));
        send_json(res, info, 201);
    }));

    server_.Get("/sessions/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, svc.info(req.path_params.at("id")));
    }));

    server_.Post("/sessions/:id/messages", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto answer = svc.answer_question(req.path_params.at("id"), text_field(body, "text"));
        send_json(res, {{"answer", answer.text},
                        {"turn_count", answer.turn_count},
                        {"stop_suggested", answer.stop_suggested}});
    }));

    server_.Post("/sessions/:id/material", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, material_json(svc.generate_material(req.path_params.at("id"))));
    }));

    server_.Post("/sessions/:id/exercises", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        std::optional<std::string> exercise;
        if (body.contains("exercise_id") && !body["exercise_id"].is_null()) exercise = text_field(body, "exercise_id");
        send_json(res, exercise_json(svc.start_exercise(req.path_params.at("id"), exercise)));
    }));

    server_.Post("/sessions/:id/exercises/:eid/submissions",
                 guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                     auto body = parse_body(req);
                     if (!body.contains("step_index") || !body["step_index"].is_number_unsigned())
                         fail(ErrorKind::schema_mismatch, "'step_index' must be a non-negative integer",
                              {{"field", "step_index"}});
                     auto feedback = svc.submit_code(req.path_params.at("id"), req.path_params.at("eid"),
                                                     body["step_index"].get<std::size_t>(), text_field(body, "source"));
                     send_json(res, feedback_json(feedback));
                 }));

    server_.Post("/sessions/:id/report", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, report_json(svc.generate_report(req.path_params.at("id"))));
    }));

    server_.Get("/sessions/:id/report", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto report = svc.report(id);
        if (!report) fail(ErrorKind::not_found, "no report has been generated for session '" + id + "'");
        res.set_header("Content-Disposition", "attachment; filename=\"report-" + id + ".md\"");
        res.set_content(*report, "text/markdown; charset=utf-8");
    }));

    server_.Post("/sessions/:id/close", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        svc.close(id);
        send_json(res, svc.info(id));
    }));

    auto poll = config_.stream_poll;
    server_.Get("/sessions/:id/events", guarded([&svc, poll](const httplib::Request& req, httplib::Response& res) {
        auto id = req.path_params.at("id");
        svc.info(id);  // unknown sessions are refused before the stream opens
        std::int64_t from = 0;
        if (req.has_param("from")) from = parse_seq(req.get_param_value("from"), "from");
        // A reconnecting EventSource reports the last frame it saw.
        if (req.has_header("Last-Event-ID"))
            from = std::max(from, parse_seq(req.get_header_value("Last-Event-ID"), "Last-Event-ID") + 1);
        bool follow = !(req.has_param("follow") && req.get_param_value("follow") == "0");

        auto next = std::make_shared<std::int64_t>(std::max<std::int64_t>(from, 1));
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream", [&svc, id, next, follow, poll](std::size_t, httplib::DataSink& sink) {
                try {
                    auto events = svc.events(id, *next, follow ? poll : std::chrono::milliseconds(0));
                    for (const auto& e : events) {
                        auto frame = sse_frame(e);
                        if (!sink.write(frame.data(), frame.size())) return false;
                        *next = e.seq + 1;
                    }
                    if (!follow || (events.empty() && svc.info(id).phase == Phase::closed)) {
                        sink.done();
                        return true;
                    }
                    if (events.empty() && !sink.is_writable()) return false;
                    return true;
                } catch (const std::exception&) {
                    return false;
                }
            });
    }));

    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 404)
            send_json(res, {{"code", "not_found"}, {"message", "no such endpoint"}, {"detail", {{"kind", "not_found"}}}},
                      404);
    });
}

bool ApiServer::listen() { return server_.listen(config_.host, config_.port); }

int ApiServer::bind_any_port() { return server_.bind_to_any_port(config_.host); }

bool ApiServer::listen_after_bind() { return server_.listen_after_bind(); }

void ApiServer::stop() { server_.stop(); }

} // namespace codeedu::api
