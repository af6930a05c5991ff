#pragma once

#include "codeedu/error.hpp"
#include "codeedu/session/orchestrator.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <string>

namespace codeedu::api {

enum class ApiCode { bad_request, not_found, conflict, turn_limit, internal };

std::string_view to_string(ApiCode code);
int http_status(ApiCode code);
ApiCode api_code(ErrorKind kind);

// {code, message, detail}; detail always carries the underlying error kind.
nlohmann::json error_body(const Error& error);

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path workspace_root = "workspace";
    // How long an event stream waits for new events before checking whether
    // the client is still there.
    std::chrono::milliseconds stream_poll{500};
};

// CODEEDU_BIND_ADDR ("host:port" or "host") and CODEEDU_WORKSPACE_ROOT
// override the defaults.
ServerConfig config_from_env();

// "id: <seq>\nevent: <kind>\ndata: <event json>\n\n"
std::string sse_frame(const session::Event& event);

nlohmann::json material_json(const session::LearningMaterial& material);
nlohmann::json exercise_json(const session::Exercise& exercise);
nlohmann::json feedback_json(const session::Feedback& feedback);
nlohmann::json report_json(const session::LearningReport& report);

// HTTP facade over a SessionService. Handlers only translate: every effect
// comes from the wrapped service.
class ApiServer {
public:
    ApiServer(session::SessionService& service, ServerConfig config = {});

    httplib::Server& http() { return server_; }

    // Blocks until stop(). Returns false when the address cannot be bound.
    bool listen();
    // Binds an ephemeral port on the configured host; returns it or -1.
    int bind_any_port();
    bool listen_after_bind();
    void stop();

private:
    void routes();

    session::SessionService& service_;
    ServerConfig config_;
    httplib::Server server_;
};

} // namespace codeedu::api
