#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace codeedu {

// One error vocabulary shared by every module. The service layer maps these
// onto HTTP status codes, so adding a kind means updating api::status_for().
enum class ErrorKind {
    precondition,
    config,
    // llm-gateway
    provider_unreachable,
    rate_limited,
    provider_error,
    fixture_exhausted,
    fixture_ambiguous,
    duplicate_provider,
    // tool-pool
    unknown_tool,
    schema_mismatch,
    sandbox_setup_failure,
    path_escape,
    not_found,
    network_unavailable,
    // agent-pool
    capability_mismatch,
    tool_failure,
    step_cap_exceeded,
    duplicate_agent,
    // planner
    decomposition_failure,
    no_capable_agent,
    unknown_task,
    cycle,
    // session
    missing_intake_field,
    invalid_phase,
    turn_limit_reached,
    unknown_exercise,
    unknown_session,
    // eval
    undefined_baseline,
    unparseable_rating,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, nlohmann::json detail = nullptr)
        : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    nlohmann::json detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              nlohmann::json detail = nullptr) {
    throw Error(kind, message, std::move(detail));
}

inline void require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorKind::precondition, message);
}

} // namespace codeedu
