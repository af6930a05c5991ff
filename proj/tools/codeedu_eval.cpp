// Offline evaluation: pre-test, tutoring episode and post-test for every
// (tutor, level, fold), written to results.json, results.csv and
// quality.json.

#include "codeedu/error.hpp"
#include "codeedu/eval/harness.hpp"
#include "codeedu/tools/sandbox.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace codeedu;

namespace {

std::vector<std::string> expand(const std::string& value, std::vector<std::string> all) {
    if (value == "all") return all;
    return {value};
}

eval::EvalEnvironment live_environment(const fs::path& config_path, const fs::path& corpus, const std::string& search,
                                       const fs::path& work,
                                       std::shared_ptr<const tools::CodeExecutor> executor) {
    eval::EvalEnvironment env;
    env.gateway = std::make_shared<llm::Gateway>(llm::Gateway::from_config(llm::ProviderConfig::load(config_path)));
    env.gateway->validate_roles(eval::eval_roles());
    env.executor = executor;
    tools::CrawlerConfig crawler{corpus, corpus.empty(), search};
    env.tools = std::make_shared<tools::ToolRegistry>(std::move(executor), crawler);
    env.prompts_dir = fs::path(CODEEDU_ASSET_DIR) / "prompts";
    env.rubric = eval::load_rubric(fs::path(CODEEDU_ASSET_DIR) / "rubric" / "judge.txt");
    env.work_dir = work;
    return env;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CodeEdu evaluation harness"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "Run the cross-validated evaluation");

    eval::EvalConfig config;
    fs::path problems_path = fs::path(CODEEDU_DATA_DIR) / "problems" / "toy.jsonl";
    fs::path fixtures = fs::path(CODEEDU_DATA_DIR) / "fixtures" / "toy";
    fs::path provider_config, corpus, out = "eval-out";
    std::string search_endpoint;
    std::string tutor = "all", level = "all";
    bool no_judge = false;

    run->add_option("--problems", problems_path, "Problem set (JSON lines)")->check(CLI::ExistingFile);
    run->add_option("--fixtures", fixtures, "Scripted LLM fixtures and crawl corpus (mock mode)");
    run->add_option("--provider-config", provider_config, "Provider config; switches to live models")
        ->check(CLI::ExistingFile);
    run->add_option("--corpus", corpus, "Offline crawl corpus for live mode");
    run->add_option("--search-endpoint", search_endpoint, "Search service for live crawling");
    run->add_option("--n", config.problems, "Number of problems, 0 for all");
    run->add_option("--k", config.submissions, "Submissions per test phase");
    run->add_option("--m", config.cases, "Test cases per problem");
    run->add_option("--t", config.max_turns, "Maximum tutoring turns");
    run->add_option("--folds", config.folds, "Cross-validation folds");
    run->add_option("--seed", config.seed, "Fold shuffle seed");
    run->add_option("--workers", config.workers, "Episodes run in parallel");
    run->add_option("--tutor", tutor, "codeedu, baseline or all")
        ->check(CLI::IsMember({"codeedu", "baseline", "all"}));
    run->add_option("--level", level, "low, medium, high or all")
        ->check(CLI::IsMember({"low", "medium", "high", "all"}));
    run->add_flag("--no-judge", no_judge, "Skip material quality rating");
    run->add_option("--out", out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        config.tutors.clear();
        for (const auto& t : expand(tutor, {"codeedu", "baseline"})) config.tutors.push_back(eval::tutor_from_string(t));
        config.levels.clear();
        for (const auto& l : expand(level, {"low", "medium", "high"})) config.levels.push_back(session::level_from_string(l));
        config.judge_materials = !no_judge;

        tools::SandboxConfig sandbox;
        sandbox.shim_path = fs::path(CODEEDU_ASSET_DIR) / "runner" / "python_shim.py";
        sandbox.max_concurrent = std::max(config.workers, 1);
        auto executor = std::make_shared<tools::ProcessSandbox>(sandbox);

        fs::path work = out / "work";
        auto env = provider_config.empty() ? eval::mock_environment(fixtures, work, executor)
                                           : live_environment(provider_config, corpus, search_endpoint, work, executor);
        auto problems = eval::load_problems(problems_path, config.cases);

        eval::Evaluator evaluator(config, env);
        auto results = evaluator.cross_validate(problems);
        eval::write_results(results, out);
        std::cout << eval::results_json(results)["aggregate"].dump(2) << '\n'
                  << "wrote " << (out / "results.json").string() << '\n';
    } catch (const Error& e) {
        std::cerr << "codeedu-eval: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "codeedu-eval: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
