#include "codeedu/tools/unit_tests.hpp"

#include "codeedu/error.hpp"

#include <charconv>
#include <optional>
#include <cmath>
#include <sstream>

namespace codeedu::tools {

namespace {

std::string normalize_whitespace(std::string_view text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        auto end = line.find_last_not_of(" \t\r");
        lines.push_back(end == std::string::npos ? std::string{} : line.substr(0, end + 1));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

std::vector<std::string> tokens(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::optional<double> parse_number(const std::string& token) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

} // namespace

bool outputs_match(const TestCase& test_case, std::string_view actual) {
    switch (test_case.comparison) {
        case Comparison::exact:
            return actual == test_case.expected_output;
        case Comparison::whitespace_normalized:
            return normalize_whitespace(actual) == normalize_whitespace(test_case.expected_output);
        case Comparison::numeric: {
            auto want = tokens(test_case.expected_output);
            auto got = tokens(actual);
            if (want.size() != got.size()) return false;
            for (std::size_t i = 0; i < want.size(); ++i) {
                auto a = parse_number(want[i]);
                auto b = parse_number(got[i]);
                if (a && b) {
                    if (!(std::fabs(*a - *b) <= test_case.tolerance)) return false;
                } else if (want[i] != got[i]) {
                    return false;
                }
            }
            return true;
        }
    }
    return false;
}

TestReport run_unit_tests(const CodeExecutor& executor, const std::string& source,
                          std::span<const TestCase> cases, const SandboxPolicy& policy,
                          const std::filesystem::path& scratch_parent) {
    require(!cases.empty(), "run_unit_tests needs at least one case");
    TestReport report;
    report.all_passed = true;
    for (const auto& test_case : cases) {
        auto result = executor.execute({source, test_case.input, policy, scratch_parent});
        CaseRun run;
        run.verdict = result.verdict;
        run.passed = result.verdict == Verdict::ok && outputs_match(test_case, result.stdout_text);
        run.stdout_text = std::move(result.stdout_text);
        run.stderr_text = std::move(result.stderr_text);
        run.elapsed = result.elapsed;
        report.case_results.push_back(run.passed);
        report.all_passed = report.all_passed && run.passed;
        report.runs.push_back(std::move(run));
    }
    return report;
}

} // namespace codeedu::tools
