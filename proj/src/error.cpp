#include "codeedu/error.hpp"

namespace codeedu {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::config: return "config";
        case ErrorKind::provider_unreachable: return "provider_unreachable";
        case ErrorKind::rate_limited: return "rate_limited";
        case ErrorKind::provider_error: return "provider_error";
        case ErrorKind::fixture_exhausted: return "fixture_exhausted";
        case ErrorKind::fixture_ambiguous: return "fixture_ambiguous";
        case ErrorKind::duplicate_provider: return "duplicate_provider";
        case ErrorKind::unknown_tool: return "unknown_tool";
        case ErrorKind::schema_mismatch: return "schema_mismatch";
        case ErrorKind::sandbox_setup_failure: return "sandbox_setup_failure";
        case ErrorKind::path_escape: return "path_escape";
        case ErrorKind::not_found: return "not_found";
        case ErrorKind::network_unavailable: return "network_unavailable";
        case ErrorKind::capability_mismatch: return "capability_mismatch";
        case ErrorKind::tool_failure: return "tool_failure";
        case ErrorKind::step_cap_exceeded: return "step_cap_exceeded";
        case ErrorKind::duplicate_agent: return "duplicate_agent";
        case ErrorKind::decomposition_failure: return "decomposition_failure";
        case ErrorKind::no_capable_agent: return "no_capable_agent";
        case ErrorKind::unknown_task: return "unknown_task";
        case ErrorKind::cycle: return "cycle";
        case ErrorKind::missing_intake_field: return "missing_intake_field";
        case ErrorKind::invalid_phase: return "invalid_phase";
        case ErrorKind::turn_limit_reached: return "turn_limit_reached";
        case ErrorKind::unknown_exercise: return "unknown_exercise";
        case ErrorKind::unknown_session: return "unknown_session";
        case ErrorKind::undefined_baseline: return "undefined_baseline";
        case ErrorKind::unparseable_rating: return "unparseable_rating";
    }
    return "unknown";
}

} // namespace codeedu
