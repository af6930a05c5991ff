// Acceptance checks: one PASS/FAIL/SKIP line per criterion, exit status 1
// when any criterion fails.

#include "codeedu/error.hpp"
#include "codeedu/eval/harness.hpp"
#include "codeedu/llm/mock_provider.hpp"
#include "codeedu/planner/planner.hpp"
#include "codeedu/session/orchestrator.hpp"
#include "codeedu/tools/unit_tests.hpp"
#include "test_support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/select.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>

using namespace codeedu;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Failed {
    std::string why;
};
struct Skipped {
    std::string why;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failed{what};
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

json oracles() {
    std::ifstream in(testing::data_dir() / "oracles" / "oracles.json");
    return json::parse(in);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::shared_ptr<const tools::CodeExecutor> sandbox() {
    static tools::ProcessSandbox instance(testing::python_sandbox_config());
    return {&instance, [](const tools::CodeExecutor*) {}};
}

const std::vector<eval::Problem>& toy_problems() {
    static auto problems = eval::load_problems(testing::data_dir() / "problems" / "toy.jsonl", 10);
    return problems;
}

eval::OutcomeMatrix matrix_from(const json& cells) {
    eval::OutcomeMatrix m(cells.size(), cells[0].size(), cells[0][0].size());
    for (std::size_t n = 0; n < cells.size(); ++n)
        for (std::size_t k = 0; k < cells[n].size(); ++k)
            for (std::size_t c = 0; c < cells[n][k].size(); ++c) m.set(n, k, c, cells[n][k][c].get<bool>());
    return m;
}

// Brute force over a flat bit vector laid out problem-major: counts fully
// passing samples and passing cells with no reference to OutcomeMatrix.
std::pair<double, double> enumerate_metrics(const std::vector<int>& bits, std::size_t n, std::size_t k,
                                            std::size_t m) {
    std::size_t solved = 0, passing = 0;
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t full_samples = 0;
        for (std::size_t b = 0; b < k; ++b) {
            std::size_t ok = 0;
            for (std::size_t c = 0; c < m; ++c) ok += static_cast<std::size_t>(bits[(a * k + b) * m + c]);
            passing += ok;
            full_samples += ok == m ? 1 : 0;
        }
        solved += full_samples > 0 ? 1 : 0;
    }
    return {static_cast<double>(solved) / static_cast<double>(n),
            static_cast<double>(passing) / static_cast<double>(n * k * m)};
}

llm::ScriptedFixture fallback_only(std::string text, std::vector<llm::ScriptedFixture::Entry> entries = {}) {
    llm::ScriptedFixture f;
    f.mode = llm::ScriptedFixture::Mode::substring;
    f.entries = std::move(entries);
    f.fallback = std::move(text);
    return f;
}

// Orchestrator over the toy researcher fixture and corpus, with plain
// replies for the other roles.
struct SessionRig {
    testing::TempDir workspace;
    std::shared_ptr<llm::MockProvider> provider;
    llm::Gateway gateway;
    std::shared_ptr<tools::ToolRegistry> registry;
    std::unique_ptr<session::Orchestrator> orchestrator;

    SessionRig(std::shared_ptr<const tools::CodeExecutor> executor, int max_turns) {
        provider = llm::MockProvider::from_directory(testing::data_dir() / "fixtures" / "toy" / "llm");
        provider->set_fixture("tutor", fallback_only("Accumulate a running total inside the loop."));
        provider->set_fixture("programmer", fallback_only("Check the loop bounds."));
        provider->set_fixture("report_analyst",
                              fallback_only("Steady progress.\nRecommendations: practise nested loops."));
        provider->set_fixture("stop_check", fallback_only("NO"));
        gateway.register_provider("mock", provider);
        std::vector<std::string> roles{"planner", "researcher", "report_analyst", "programmer", "tutor", "stop_check"};
        for (auto& b : llm::default_bindings("mock", "scripted", roles)) gateway.bind(b);
        registry = std::make_shared<tools::ToolRegistry>(
            executor, tools::CrawlerConfig{testing::data_dir() / "fixtures" / "toy" / "corpus", false, ""});
        session::OrchestratorConfig config;
        config.workspace_root = workspace.path();
        config.max_turns = max_turns;
        config.problems = toy_problems();
        orchestrator = std::make_unique<session::Orchestrator>(
            config, gateway, registry,
            agents::AgentPool::with_defaults(testing::asset_dir() / "prompts", *registry), executor);
    }

    std::string start() {
        return orchestrator
            ->start_session({{"background", "retired accountant"},
                             {"goals", "learn loops"},
                             {"level", "low"},
                             {"preferred_topics", {"loops"}}})
            .session_id;
    }
};

// --- criteria -------------------------------------------------------------

void metric_oracle_equivalence() {
    auto start = Clock::now();
    std::mt19937_64 rng(20261019);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng() % 6, k = 1 + rng() % 4, m = 1 + rng() % 5;
        // Skew some matrices towards all-true so fully passing samples occur.
        unsigned threshold = static_cast<unsigned>(rng() % 11);
        std::vector<int> bits(n * k * m);
        eval::OutcomeMatrix matrix(n, k, m);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < k; ++b)
                for (std::size_t c = 0; c < m; ++c) {
                    int v = rng() % 10 < threshold ? 1 : 0;
                    bits[(a * k + b) * m + c] = v;
                    matrix.set(a, b, c, v != 0);
                }
        auto [pass, recall] = enumerate_metrics(bits, n, k, m);
        expect(eval::pass_at_k(matrix) == pass, "pass_at_k differs from enumeration at trial " + std::to_string(trial));
        expect(eval::recall_at_k(matrix) == recall,
               "recall_at_k differs from enumeration at trial " + std::to_string(trial));
    }
    auto took = seconds_since(start);
    expect(took < 5.0, "took " + std::to_string(took) + " s");
}

void hand_checkable_metric_fixtures() {
    auto o = oracles();
    for (const auto& e : o["pass_at_k"])
        expect(eval::pass_at_k(matrix_from(e["matrix"])) == e["expected"].get<double>(),
               "pass_at_k: " + e["name"].get<std::string>());
    for (const auto& e : o["recall_at_k"])
        expect(eval::recall_at_k(matrix_from(e["matrix"])) == e["expected"].get<double>(),
               "recall_at_k: " + e["name"].get<std::string>());
    for (const auto& e : o["tir"]) {
        auto pre = e["pre"].get<double>(), post = e["post"].get<double>();
        if (e.contains("error")) {
            try {
                eval::tir(pre, post);
                throw Failed{"tir with zero baseline did not fail"};
            } catch (const Error& err) {
                expect(err.kind() == ErrorKind::undefined_baseline, "tir error kind");
            }
        } else {
            expect(eval::tir(pre, post) == e["expected"].get<double>(), "tir " + e.dump());
        }
    }
    // The off-by-one verdict pattern matches a plain interpreter run.
    const auto& off = o["off_by_one"];
    testing::TempDir scratch;
    const eval::Problem* problem = nullptr;
    for (const auto& p : toy_problems())
        if (p.problem_id == off["problem_id"]) problem = &p;
    expect(problem != nullptr, "toy problem missing");
    auto report = tools::run_unit_tests(*sandbox(), off["source"].get<std::string>(), problem->test_cases, {},
                                        scratch.path());
    expect(nlohmann::json(report.case_results) == off["case_results"], "off-by-one verdicts");
}

void protocol_constants() {
    auto protocol = oracles()["protocol"];
    eval::EvalConfig config;
    expect(config.max_turns == protocol["T"] && config.submissions == protocol["K"] && config.cases == protocol["M"] &&
               config.folds == protocol["folds"],
           "default config is not T=20, K=3, M=10, folds=5");

    // Turn cap: the 21st message is refused.
    SessionRig rig(testing::echo_executor(), config.max_turns);
    auto id = rig.start();
    for (int i = 1; i <= config.max_turns; ++i) rig.orchestrator->answer_question(id, "question " + std::to_string(i));
    try {
        rig.orchestrator->answer_question(id, "one too many");
        throw Failed{"message 21 was accepted"};
    } catch (const Error& e) {
        expect(e.kind() == ErrorKind::turn_limit_reached, "message 21 refused with the wrong error");
    }

    // Exactly K submissions, each run against exactly M cases.
    std::vector<std::string> attempts;
    for (int k = 1; k <= config.submissions; ++k)
        attempts.push_back("```python\nprint(" + std::to_string(k) + ")\n```");
    auto provider = std::make_shared<llm::MockProvider>(llm::ScriptedFixture::sequence(attempts));
    auto counting = std::make_shared<testing::StubExecutor>([](const tools::ExecutionRequest&) {
        tools::ExecutionResult r;
        r.stdout_text = "0\n";
        return r;
    });
    testing::TempDir work;
    eval::EvalEnvironment env = eval::mock_environment(testing::data_dir() / "fixtures" / "toy", work.path(), counting);
    env.gateway->register_provider("attempts", provider);
    env.gateway->bind({eval::student_role, "attempts", "scripted"});
    eval::Evaluator evaluator(config, env);
    const auto& problem = toy_problems().front();
    auto student = eval::build_student(session::Level::low, problem, env.gateway->binding_for(eval::student_role));
    eval::StudentSession session(student, *env.gateway);
    auto row = evaluator.pretest(session, problem);
    expect(row.size() == static_cast<std::size_t>(config.submissions), "pre-test graded " + std::to_string(row.size()) +
                                                                            " submissions");
    for (const auto& r : row) expect(r.size() == config.cases, "a submission was graded on the wrong case count");
    expect(counting->calls == config.submissions * static_cast<int>(config.cases),
           "executor ran " + std::to_string(counting->calls.load()) + " times");

    // Five disjoint folds covering every problem, identical across reruns.
    auto sizes = oracles()["fold_sizes"];
    for (std::size_t n : {10u, 11u, 100u}) {
        auto folds = eval::make_folds(n, config.folds, 42);
        expect(folds == eval::make_folds(n, config.folds, 42), "folds differ across reruns");
        std::set<std::size_t> seen;
        std::vector<std::size_t> got;
        for (const auto& f : folds) {
            got.push_back(f.size());
            for (auto i : f) expect(seen.insert(i).second, "folds overlap");
        }
        expect(seen.size() == n, "folds do not cover every problem");
        expect(json(got) == sizes[std::to_string(n) + "/5"], "fold sizes for N=" + std::to_string(n));
    }
}

void end_to_end_mock_pipeline() {
    testing::TempDir root;
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        auto start = Clock::now();
        auto out = root.path() / ("run" + std::to_string(run));
        eval::EvalConfig config;
        config.seed = 20241019;
        auto env = eval::mock_environment(testing::data_dir() / "fixtures" / "toy", out / "work", sandbox());
        eval::Evaluator evaluator(config, env);
        auto results = evaluator.cross_validate(toy_problems());
        eval::write_results(results, out);
        auto took = seconds_since(start);
        expect(took < 60.0, "run " + std::to_string(run + 1) + " took " + std::to_string(took) + " s");
        expect(results.aggregate.size() == 8, "expected 2 tutors x (3 levels + mean) aggregate rows");
        outputs.push_back(read_file(out / "results.json"));
    }
    expect(!outputs[0].empty(), "results.json is empty");
    expect(outputs[0] == outputs[1], "results.json differs between runs with the same seed");
}

std::set<std::string> tree(const fs::path& root) {
    std::set<std::string> out;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        out.insert(it->path().string());
    }
    return out;
}

void sandbox_safety_suite() {
    testing::TempDir scratch;
    const auto& box = *sandbox();

    // Infinite loop.
    tools::SandboxPolicy policy;
    policy.wall_clock_limit = std::chrono::seconds(2);
    auto start = Clock::now();
    auto looped = box.execute({"while True:\n    pass\n", "", policy, scratch.path()});
    auto took = seconds_since(start);
    expect(looped.verdict == tools::Verdict::timeout, "infinite loop was not reported as a timeout");
    expect(took < 2.0 + 2.0, "infinite loop stopped after " + std::to_string(took) + " s");

    // Network canary.
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    expect(listener >= 0, "cannot open canary socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    expect(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 && ::listen(listener, 4) == 0 &&
               ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) == 0,
           "cannot start canary listener");
    auto port = std::to_string(ntohs(addr.sin_port));
    auto net = box.execute({"import socket\n"
                            "try:\n"
                            "    s = socket.create_connection(('127.0.0.1', " + port + "), timeout=1)\n"
                            "    s.sendall(b'leak')\n"
                            "    print('connected')\n"
                            "except OSError:\n"
                            "    print('blocked')\n",
                            "", {}, scratch.path()});
    timeval tv{0, 300000};
    fd_set fds;
    FD_ZERO(&fds);
    FD_SET(listener, &fds);
    int pending = ::select(listener + 1, &fds, nullptr, nullptr, &tv);
    ::close(listener);
    expect(pending == 0, "the canary listener saw a connection");
    expect(net.stdout_text == "blocked\n", "network attempt reported: " + net.stdout_text);

    // Writes outside the scratch directory.
    testing::TempDir outside;
    auto before = tree(outside.path());
    auto parent_before = tree(scratch.path());
    auto target = (outside.path() / "escaped.txt").string();
    auto writes = box.execute({"refused = 0\n"
                               "for p in ['" + target + "', '/tmp/codeedu-acceptance-probe', '../escaped.txt']:\n"
                               "    try:\n"
                               "        open(p, 'w').write('x')\n"
                               "    except OSError:\n"
                               "        refused += 1\n"
                               "open('inside.txt', 'w').write('ok')\n"
                               "print(refused)\n",
                               "", {}, scratch.path()});
    expect(writes.stdout_text == "3\n", "writes refused: " + writes.stdout_text);
    expect(tree(outside.path()) == before, "a file appeared outside the scratch directory");
    expect(!fs::exists("/tmp/codeedu-acceptance-probe"), "a file appeared in /tmp");
    auto after = tree(scratch.path());
    for (const auto& p : after)
        expect(parent_before.count(p) || p.rfind(writes.scratch_dir.string(), 0) == 0,
               "unexpected file next to the scratch directory: " + p);
}

void session_workflow_suite() {
    // All four functions: material, Q&A, exercise submission, report.
    SessionRig rig(sandbox(), 20);
    auto& o = *rig.orchestrator;
    auto id = rig.start();
    auto material = o.generate_material(id);
    expect(material.sections.size() >= 2, "material has fewer than two sections");
    std::vector<std::string> questions = {"What does range(1, n + 1) produce?", "How do I keep a running total?"};
    for (const auto& q : questions) o.answer_question(id, q);
    o.start_exercise(id, std::string("sum-to-n"));
    o.submit_code(id, "sum-to-n", 0, "n = int(input())\nprint(sum(range(1, n)) + 1)\n");
    auto reference = *toy_problems().front().reference_solution;
    o.submit_code(id, "sum-to-n", 0, reference);
    auto last = o.submit_code(id, "sum-to-n", 1, reference);
    expect(last.next_action == session::NextAction::exercise_complete, "final step did not complete the exercise");
    auto report = o.generate_report(id);
    auto parsed = session::parse_report(read_file(report.path));
    expect(parsed.questions == questions, "report questions differ from the logged ones");
    std::size_t logged_submissions = 0;
    for (const auto& e : o.events(id, 0)) logged_submissions += e.kind == "submission" ? 1 : 0;
    expect(parsed.submissions.size() == logged_submissions && logged_submissions == 3,
           "report lists " + std::to_string(parsed.submissions.size()) + " of " +
               std::to_string(logged_submissions) + " submissions");
    expect(parsed.submissions[0].find("verdict failed") != std::string::npos &&
               parsed.submissions[2].find("verdict passed") != std::string::npos,
           "report submission verdicts");

    // Phase machine property over 1000 random operation sequences.
    auto stub = std::make_shared<testing::StubExecutor>([](const tools::ExecutionRequest& r) {
        tools::ExecutionResult result;
        result.stdout_text = r.source == "good" ? "0\n" : "x\n";
        return result;
    });
    SessionRig prop(stub, 6);
    std::mt19937_64 rng(7);
    const auto& problems = toy_problems();
    for (int trial = 0; trial < 1000; ++trial) {
        auto sid = prop.start();
        auto& p = *prop.orchestrator;
        auto phase = p.info(sid).phase;
        int ops = 1 + static_cast<int>(rng() % 10);
        for (int i = 0; i < ops; ++i) {
            auto before = p.info(sid);
            bool refused = false;
            try {
                switch (rng() % 6) {
                    case 0: p.generate_material(sid); break;
                    case 1: p.answer_question(sid, "q"); break;
                    case 2: p.start_exercise(sid, problems[rng() % problems.size()].problem_id); break;
                    case 3:
                        p.submit_code(sid, before.current_exercise.value_or("sum-to-n"), rng() % 2,
                                      rng() % 2 ? "good" : "bad");
                        break;
                    case 4: p.generate_report(sid); break;
                    default: p.close(sid); break;
                }
            } catch (const Error&) {
                refused = true;
            }
            auto after = p.info(sid).phase;
            if (refused) {
                expect(after == before.phase, "a refused operation changed the phase");
                continue;
            }
            expect(after == phase || session::transition_allowed(phase, after),
                   "illegal transition " + std::string(session::to_string(phase)) + " -> " +
                       std::string(session::to_string(after)));
            phase = after;
        }
    }
}

planner::TaskSpec plan_task(std::string id, std::set<planner::TaskId> deps = {}, int priority = 5,
                            planner::TaskType type = planner::TaskType::coding_exercise) {
    return {std::move(id), type, "", json::object(), std::move(deps), priority};
}

void planner_properties() {
    // Acyclicity under random mutation sequences.
    std::mt19937 rng(20261019);
    for (int trial = 0; trial < 1000; ++trial) {
        planner::PlanState plan;
        int created = 0;
        for (int step = 0; step < 30; ++step) {
            try {
                if (created < 3 || rng() % 3 == 0)
                    plan.add_task(plan_task("n" + std::to_string(created++)));
                else
                    plan.add_dependency("n" + std::to_string(rng() % created), "n" + std::to_string(rng() % created));
            } catch (const Error& e) {
                expect(e.kind() == ErrorKind::cycle || e.kind() == ErrorKind::precondition,
                       "unexpected mutation error " + std::string(to_string(e.kind())));
            }
            expect(plan.is_acyclic(), "cycle admitted at trial " + std::to_string(trial));
        }
    }

    // Liveness on random DAGs of up to 20 nodes.
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng() % 20);
        std::vector<planner::TaskSpec> tasks;
        for (int i = 0; i < n; ++i) {
            std::set<planner::TaskId> deps;
            for (int j = 0; j < i; ++j)
                if (rng() % 4 == 0) deps.insert("n" + std::to_string(j));
            tasks.push_back(plan_task("n" + std::to_string(i), deps, static_cast<int>(rng() % 3)));
        }
        planner::PlanState plan(tasks);
        int completed = 0;
        while (!plan.all_settled()) {
            auto ready = planner::next_ready(plan);
            expect(!ready.empty(), "no ready task while work remains at trial " + std::to_string(trial));
            plan = planner::on_event(plan, planner::TaskCompleted{ready.front().task_id, "programmer"});
            ++completed;
        }
        expect(completed == n, "not every task completed");
    }

    // Assignment determinism under agent order and repeated calls.
    auto agents = agents::default_agents(testing::asset_dir() / "prompts");
    auto twin = agents.front();
    for (const auto& a : agents)
        if (a.agent_id == "programmer") twin = a;
    twin.agent_id = "pair_programmer";
    agents.push_back(twin);
    for (int trial = 0; trial < 1000; ++trial) {
        auto type = planner::all_task_types[rng() % planner::all_task_types.size()];
        std::map<std::string, int> load;
        for (const auto& a : agents) load[a.agent_id] = static_cast<int>(rng() % 3);
        auto shuffled = agents;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto t = plan_task("x", {}, 5, type);
        std::string first;
        try {
            first = planner::assign(t, agents, {}, load);
        } catch (const Error& e) {
            expect(e.kind() == ErrorKind::no_capable_agent, "unexpected assign error");
            continue;
        }
        expect(planner::assign(t, shuffled, {}, load) == first, "assignment depends on agent order");
        expect(planner::assign(t, agents, {}, load) == first, "assignment changed between calls");
    }
}

void live_smoke_test() {
    const char* path = std::getenv("CODEEDU_LIVE_PROVIDER_CONFIG");
    if (!path || !*path) throw Skipped{"CODEEDU_LIVE_PROVIDER_CONFIG is not set"};
    auto provider_config = llm::ProviderConfig::load(path);
    for (const auto& p : provider_config.providers) {
        const char* key = std::getenv(llm::api_key_variable(p.id).c_str());
        if (!key || !*key) throw Skipped{llm::api_key_variable(p.id) + " is not set"};
    }
    int improved = 0;
    std::vector<eval::Problem> two(toy_problems().begin(), toy_problems().begin() + 2);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        testing::TempDir work;
        eval::EvalEnvironment env;
        env.gateway = std::make_shared<llm::Gateway>(llm::Gateway::from_config(provider_config));
        env.gateway->validate_roles(eval::eval_roles());
        env.executor = sandbox();
        env.tools = std::make_shared<tools::ToolRegistry>(
            sandbox(), tools::CrawlerConfig{testing::data_dir() / "fixtures" / "toy" / "corpus", false, ""});
        env.prompts_dir = testing::asset_dir() / "prompts";
        env.rubric = eval::load_rubric(testing::asset_dir() / "rubric" / "judge.txt");
        env.work_dir = work.path();
        eval::EvalConfig config;
        config.problems = 2;
        config.folds = 2;
        config.seed = seed;
        config.tutors = {eval::TutorKind::codeedu};
        config.levels = {session::Level::low};
        config.judge_materials = false;
        eval::Evaluator evaluator(config, env);
        auto results = evaluator.cross_validate(two);
        const auto& row = results.aggregate.front();
        std::cout << "  seed " << seed << ": pre pass " << row.pre.pass << ", post pass " << row.post.pass << '\n';
        if (row.post.pass >= row.pre.pass) ++improved;
    }
    expect(improved >= 1, "post-test pass fell below pre-test pass for every seed");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"metric oracle equivalence (1000 random matrices vs enumeration, < 5 s)", metric_oracle_equivalence},
        {"hand-checkable metric fixtures", hand_checkable_metric_fixtures},
        {"protocol constants T=20 K=3 M=10 folds=5", protocol_constants},
        {"end-to-end mock pipeline (< 60 s, bit-identical results.json)", end_to_end_mock_pipeline},
        {"sandbox safety suite (timeout, network canary, write confinement)", sandbox_safety_suite},
        {"session workflow suite (report completeness, 1000 phase sequences)", session_workflow_suite},
        {"planner properties (determinism, acyclicity, liveness; 1000 trials)", planner_properties},
        {"live smoke test (optional, env-gated)", live_smoke_test},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        auto start = Clock::now();
        try {
            check();
            std::cout << "PASS " << name << " [" << seconds_since(start) << " s]" << std::endl;
        } catch (const Skipped& s) {
            std::cout << "SKIP " << name << ": " << s.why << std::endl;
        } catch (const Failed& f) {
            ++failures;
            std::cout << "FAIL " << name << ": " << f.why << std::endl;
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL " << name << ": unexpected error: " << e.what() << std::endl;
        }
    }
    return failures == 0 ? 0 : 1;
}
