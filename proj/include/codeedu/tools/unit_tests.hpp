#pragma once

#include "codeedu/tools/sandbox.hpp"

#include <span>

namespace codeedu::tools {

bool outputs_match(const TestCase& test_case, std::string_view actual);

// One fresh execution per case. Crashes, timeouts and memory blow-ups are
// failing verdicts, never errors.
TestReport run_unit_tests(const CodeExecutor& executor, const std::string& source,
                          std::span<const TestCase> cases, const SandboxPolicy& policy,
                          const std::filesystem::path& scratch_parent);

} // namespace codeedu::tools
