#pragma once

#include "codeedu/llm/gateway.hpp"

#include <string>
#include <string_view>

namespace codeedu::session {

inline constexpr const char* stop_check_role = "stop_check";

// Yes/no question to the stop-check binding (the tutor binding when none is
// configured): are the student's objectives met after `turn` turns? A mock
// provider that does not script the stop check, an error, or any reply other
// than YES/STOP means no.
bool objectives_met(const llm::Gateway& gateway, std::string_view goals, int turn, std::string_view recent);

} // namespace codeedu::session
