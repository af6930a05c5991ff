#include "codeedu/eval/problem.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <set>

namespace codeedu::eval {

std::vector<ProblemStep> exercise_steps(const Problem& problem) {
    if (!problem.steps.empty()) return problem.steps;
    std::vector<std::size_t> all(problem.test_cases.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return {
        {"Write a first version that handles the first example: " + problem.statement,
         "Read the input exactly as described and print only the answer.", {0}},
        {"Make your solution pass every test case.", "Check edge cases such as empty or minimal inputs.", all},
    };
}

void validate(const Problem& problem, std::optional<std::size_t> cases_per_problem) {
    auto where = "problem '" + problem.problem_id + "'";
    require(!problem.problem_id.empty(), "problem needs an id");
    require(!problem.statement.empty(), where + " has an empty statement");
    require(!problem.test_cases.empty(), where + " has no test cases");
    if (cases_per_problem && problem.test_cases.size() != *cases_per_problem)
        fail(ErrorKind::precondition, where + " has " + std::to_string(problem.test_cases.size()) +
                                          " test cases, expected " + std::to_string(*cases_per_problem));
    std::set<std::size_t> covered;
    for (const auto& step : problem.steps) {
        require(!step.prompt.empty() && !step.cases.empty(), where + " has an empty step");
        for (auto c : step.cases) {
            require(c < problem.test_cases.size(), where + " step refers to a missing test case");
            covered.insert(c);
        }
    }
    if (!problem.steps.empty()) {
        const auto& last = problem.steps.back().cases;
        require(std::set<std::size_t>(last.begin(), last.end()).size() == problem.test_cases.size(),
                where + " final step must cover every test case");
    }
}

void to_json(nlohmann::json& j, const Problem& p) {
    j = {{"problem_id", p.problem_id}, {"title", p.title},        {"statement", p.statement},
         {"concepts", p.concepts},     {"test_cases", p.test_cases}, {"difficulty", p.difficulty},
         {"topics", p.topics}};
    if (p.sample_code) j["sample_code"] = *p.sample_code;
    if (p.reference_solution) j["reference_solution"] = *p.reference_solution;
    if (!p.steps.empty()) {
        j["steps"] = nlohmann::json::array();
        for (const auto& s : p.steps) j["steps"].push_back({{"prompt", s.prompt}, {"hint", s.hint}, {"cases", s.cases}});
    }
}

void from_json(const nlohmann::json& j, Problem& p) {
    p.problem_id = j.at("problem_id").get<std::string>();
    p.title = j.value("title", p.problem_id);
    p.statement = j.at("statement").get<std::string>();
    p.concepts = j.value("concepts", std::string{});
    p.sample_code.reset();
    p.reference_solution.reset();
    if (j.contains("sample_code") && !j["sample_code"].is_null()) p.sample_code = j["sample_code"].get<std::string>();
    if (j.contains("reference_solution") && !j["reference_solution"].is_null())
        p.reference_solution = j["reference_solution"].get<std::string>();
    p.test_cases = j.at("test_cases").get<std::vector<tools::TestCase>>();
    p.difficulty = j.value("difficulty", std::string{});
    p.topics = j.value("topics", std::vector<std::string>{});
    p.steps.clear();
    for (const auto& s : j.value("steps", nlohmann::json::array()))
        p.steps.push_back({s.at("prompt").get<std::string>(), s.value("hint", std::string{}),
                           s.at("cases").get<std::vector<std::size_t>>()});
}

std::vector<Problem> load_problems(const std::filesystem::path& path, std::optional<std::size_t> cases_per_problem) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::not_found, "cannot open problem set " + path.string());
    std::vector<Problem> problems;
    std::set<std::string> ids;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Problem problem;
        try {
            problem = nlohmann::json::parse(line).get<Problem>();
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::precondition, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        validate(problem, cases_per_problem);
        if (!ids.insert(problem.problem_id).second)
            fail(ErrorKind::precondition, "duplicate problem id '" + problem.problem_id + "'");
        problems.push_back(std::move(problem));
    }
    require(!problems.empty(), "problem set " + path.string() + " is empty");
    return problems;
}

} // namespace codeedu::eval
