#pragma once

#include "codeedu/tools/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace codeedu::eval {

// One guided step of an exercise: a prompt, a hint and the indices of the
// test cases it is graded on.
struct ProblemStep {
    std::string prompt;
    std::string hint;
    std::vector<std::size_t> cases;

    bool operator==(const ProblemStep&) const = default;
};

struct Problem {
    std::string problem_id;
    std::string title;
    std::string statement;
    std::string concepts;
    std::optional<std::string> sample_code;
    std::optional<std::string> reference_solution;
    std::vector<tools::TestCase> test_cases;
    std::string difficulty;
    std::vector<std::string> topics;
    std::vector<ProblemStep> steps;  // empty: two default steps

    bool operator==(const Problem&) const = default;
};

// Explicit steps, or: first case only, then every case.
std::vector<ProblemStep> exercise_steps(const Problem& problem);

// Statement non-empty, case count equals `cases_per_problem` (when given),
// step indices in range, final step covers every case.
void validate(const Problem& problem, std::optional<std::size_t> cases_per_problem = std::nullopt);

void to_json(nlohmann::json& j, const Problem& p);
void from_json(const nlohmann::json& j, Problem& p);

// JSON-lines, one problem per line; blank lines skipped. Duplicate ids are
// rejected.
std::vector<Problem> load_problems(const std::filesystem::path& path,
                                   std::optional<std::size_t> cases_per_problem = std::nullopt);

} // namespace codeedu::eval
