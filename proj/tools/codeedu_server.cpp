// HTTP server for live tutoring sessions.

#include "codeedu/api/server.hpp"
#include "codeedu/error.hpp"
#include "codeedu/llm/mock_provider.hpp"
#include "codeedu/tools/sandbox.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

namespace fs = std::filesystem;
using namespace codeedu;

namespace {

api::ApiServer* running = nullptr;

void on_signal(int) {
    if (running) running->stop();
}

llm::Gateway mock_gateway(const fs::path& fixtures) {
    auto provider = fs::is_directory(fixtures) ? llm::MockProvider::from_directory(fixtures)
                                               : std::make_shared<llm::MockProvider>();
    // Roles without a fixture get a fixed reply instead of an error.
    llm::ScriptedFixture fallback;
    fallback.mode = llm::ScriptedFixture::Mode::substring;
    fallback.fallback = "This is an offline demo reply.";
    provider->set_fixture(llm::MockProvider::default_role, fallback);
    llm::Gateway gateway;
    gateway.register_provider("mock", provider);
    std::vector<std::string> roles{agents::roles::planner, agents::roles::researcher, agents::roles::report_analyst,
                                   agents::roles::programmer, agents::roles::tutor};
    for (auto& b : llm::default_bindings("mock", "scripted", roles)) gateway.bind(b);
    return gateway;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CodeEdu tutoring server"};
    fs::path provider_config, fixtures = fs::path(CODEEDU_DATA_DIR) / "fixtures" / "toy" / "llm";
    fs::path corpus, problems = fs::path(CODEEDU_DATA_DIR) / "problems" / "toy.jsonl";
    std::string search_endpoint;
    int max_turns = 20;
    app.add_option("--provider-config", provider_config, "Provider config for live models; mock fixtures otherwise")
        ->envname("CODEEDU_PROVIDER_CONFIG")
        ->check(CLI::ExistingFile);
    app.add_option("--fixtures", fixtures, "Scripted LLM fixtures for mock mode");
    app.add_option("--corpus", corpus, "Offline crawl corpus; live crawling when empty");
    app.add_option("--search-endpoint", search_endpoint, "Search service for live crawling");
    app.add_option("--problems", problems, "Exercise set (JSON lines)")->check(CLI::ExistingFile);
    app.add_option("--max-turns", max_turns, "Dialogue turns per session");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = api::config_from_env();
        auto gateway = provider_config.empty() ? mock_gateway(fixtures)
                                               : llm::Gateway::from_config(llm::ProviderConfig::load(provider_config));
        if (!provider_config.empty()) {
            std::vector<std::string> roles{agents::roles::planner, agents::roles::researcher,
                                           agents::roles::report_analyst, agents::roles::programmer,
                                           agents::roles::tutor};
            gateway.validate_roles(roles);
        }
        if (corpus.empty() && provider_config.empty()) corpus = fs::path(CODEEDU_DATA_DIR) / "fixtures" / "toy" / "corpus";

        tools::SandboxConfig sandbox;
        sandbox.shim_path = fs::path(CODEEDU_ASSET_DIR) / "runner" / "python_shim.py";
        auto executor = std::make_shared<tools::ProcessSandbox>(sandbox);
        auto registry = std::make_shared<tools::ToolRegistry>(
            executor, tools::CrawlerConfig{corpus, corpus.empty(), search_endpoint});

        session::OrchestratorConfig oc;
        oc.workspace_root = config.workspace_root;
        oc.max_turns = max_turns;
        oc.problems = eval::load_problems(problems);
        session::Orchestrator orchestrator(
            oc, gateway, registry, agents::AgentPool::with_defaults(fs::path(CODEEDU_ASSET_DIR) / "prompts", *registry),
            executor);

        api::ApiServer server(orchestrator, config);
        running = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "codeedu-server listening on " << config.host << ":" << config.port << " (workspace "
                  << config.workspace_root.string() << ", " << (provider_config.empty() ? "mock" : "live")
                  << " models)\n";
        if (!server.listen()) {
            std::cerr << "codeedu-server: cannot bind " << config.host << ":" << config.port << '\n';
            return 1;
        }
    } catch (const Error& e) {
        std::cerr << "codeedu-server: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
