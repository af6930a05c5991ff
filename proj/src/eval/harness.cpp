#include "codeedu/eval/harness.hpp"

#include "codeedu/agents/agent_pool.hpp"
#include "codeedu/error.hpp"
#include "codeedu/llm/mock_provider.hpp"
#include "codeedu/session/orchestrator.hpp"
#include "codeedu/session/stop_check.hpp"
#include "codeedu/tools/unit_tests.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

namespace codeedu::eval {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs fn(0..count-1) on up to `workers` threads; the first failure by index
// is rethrown after every job has finished.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    pool.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

PhaseScores score(const std::vector<OutcomeRow>& rows, std::size_t k, std::size_t m) {
    OutcomeMatrix matrix(rows.size(), k, m);
    for (std::size_t n = 0; n < rows.size(); ++n) matrix.set_row(n, rows[n]);
    return {pass_at_k(matrix), recall_at_k(matrix)};
}

PhaseScores mean(const std::vector<PhaseScores>& values) {
    PhaseScores out;
    for (const auto& v : values) {
        out.pass += v.pass;
        out.recall += v.recall;
    }
    out.pass /= static_cast<double>(values.size());
    out.recall /= static_cast<double>(values.size());
    return out;
}

nlohmann::json scores_json(const PhaseScores& s) { return {{"pass", s.pass}, {"recall", s.recall}}; }

nlohmann::json level_json(const std::optional<Level>& level) {
    return level ? nlohmann::json(session::to_string(*level)) : nlohmann::json("mean");
}

nlohmann::json tir_entry(double pre, double post) {
    try {
        return tir(pre, post);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_baseline) throw;
        return nullptr;
    }
}

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string_view to_string(TutorKind tutor) { return tutor == TutorKind::codeedu ? "codeedu" : "baseline"; }

TutorKind tutor_from_string(std::string_view text) {
    if (text == "codeedu") return TutorKind::codeedu;
    if (text == "baseline") return TutorKind::baseline;
    fail(ErrorKind::precondition, "tutor must be codeedu or baseline, got '" + std::string(text) + "'");
}

void EvalConfig::validate(std::size_t problem_count) const {
    require(submissions > 0 && cases > 0 && max_turns > 0 && folds > 0 && workers > 0,
            "K, M, T, folds and workers must be positive");
    require(!tutors.empty() && !levels.empty(), "at least one tutor and one level are needed");
    std::size_t n = problems == 0 ? problem_count : problems;
    require(n > 0 && n <= problem_count, "problem count must be between 1 and the size of the problem set");
    require(folds <= n, "folds must not exceed the number of problems");
    tools::validate(policy);
}

nlohmann::json EvalConfig::to_json() const {
    nlohmann::json t = nlohmann::json::array(), l = nlohmann::json::array();
    for (auto tutor : tutors) t.push_back(eval::to_string(tutor));
    for (auto level : levels) l.push_back(session::to_string(level));
    return {{"N", problems}, {"K", submissions}, {"M", cases},  {"T", max_turns},
            {"folds", folds}, {"seed", seed},      {"tutors", t}, {"levels", l}};
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
    require(folds > 0 && folds <= n, "folds must be between 1 and the number of problems");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // Fisher-Yates over mt19937_64 directly: std::shuffle and the standard
    // distributions differ between library implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t base = n / folds, extra = n % folds, at = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::size_t size = base + (f < extra ? 1 : 0);
        out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                      order.begin() + static_cast<std::ptrdiff_t>(at + size));
        std::sort(out[f].begin(), out[f].end());
        at += size;
    }
    return out;
}

Grader::Grader(std::shared_ptr<const tools::CodeExecutor> executor, fs::path scratch, tools::SandboxPolicy policy)
    : executor_(std::move(executor)), scratch_(std::move(scratch)), policy_(policy) {
    require(executor_ != nullptr, "grader needs an executor");
}

std::vector<bool> Grader::grade(const std::string& source, const std::vector<tools::TestCase>& cases) {
    auto key = source + '\x1f' + nlohmann::json(cases).dump();
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto report = tools::run_unit_tests(*executor_, source, cases, policy_, scratch_);
    std::lock_guard lock(mutex_);
    executions_ += cases.size();
    cache_.emplace(key, report.case_results);
    return report.case_results;
}

std::size_t Grader::executions() const {
    std::lock_guard lock(mutex_);
    return executions_;
}

std::vector<std::string> eval_roles() {
    return {agents::roles::planner, agents::roles::researcher, agents::roles::report_analyst,
            agents::roles::programmer, agents::roles::tutor,     baseline_tutor_role,
            student_role,           judge_role};
}

EvalEnvironment mock_environment(const fs::path& fixtures_dir, const fs::path& work_dir,
                                 std::shared_ptr<const tools::CodeExecutor> executor) {
    EvalEnvironment env;
    env.gateway = std::make_shared<llm::Gateway>();
    env.gateway->register_provider("mock", llm::MockProvider::from_directory(fixtures_dir / "llm"));
    for (auto& binding : llm::default_bindings("mock", "scripted", eval_roles())) env.gateway->bind(binding);
    env.executor = executor;
    env.tools = std::make_shared<tools::ToolRegistry>(std::move(executor),
                                                      tools::CrawlerConfig{fixtures_dir / "corpus", false, ""});
    env.prompts_dir = fs::path(CODEEDU_ASSET_DIR) / "prompts";
    env.rubric = read_text(fs::path(CODEEDU_ASSET_DIR) / "rubric" / "judge.txt");
    env.work_dir = work_dir;
    return env;
}

Evaluator::Evaluator(EvalConfig config, EvalEnvironment env)
    : config_(std::move(config)),
      env_(std::move(env)),
      grader_(env_.executor, env_.work_dir / "grading", config_.policy) {
    require(env_.gateway && env_.executor && env_.tools, "evaluation environment is incomplete");
    fs::create_directories(env_.work_dir);
}

OutcomeRow Evaluator::test_phase(StudentSession& student, const Problem& problem, std::string_view phase,
                                 std::string_view tutor) {
    require(problem.test_cases.size() == config_.cases,
            "problem '" + problem.problem_id + "' does not have exactly M test cases");
    OutcomeRow row;
    for (int k = 1; k <= config_.submissions; ++k) {
        auto code = extract_code(student.submit(phase, tutor, k));
        // A reply without code is a failing submission.
        row.push_back(code ? grader_.grade(*code, problem.test_cases) : std::vector<bool>(config_.cases, false));
    }
    return row;
}

OutcomeRow Evaluator::pretest(StudentSession& student, const Problem& problem) {
    return test_phase(student, problem, "pre", "none");
}

EpisodeResult Evaluator::run_episode(StudentSession& student, const SimulatedStudent& profile, TutorKind tutor,
                                     const Problem& problem, const llm::Gateway& gateway) {
    EpisodeResult result;
    auto topic = problem.topics.empty() ? problem.title : problem.topics.front();
    auto goals = "Solve the problem '" + problem.title + "': " + problem.statement;
    std::optional<std::string> last_reply;

    if (tutor == TutorKind::codeedu) {
        session::OrchestratorConfig oc;
        oc.workspace_root = env_.work_dir / "episodes" / (std::string(session::to_string(profile.level)) + "-" +
                                                          problem.problem_id);
        oc.max_turns = config_.max_turns;
        oc.policy = config_.policy;
        session::Orchestrator orchestrator(oc, gateway, env_.tools,
                                           agents::AgentPool::with_defaults(env_.prompts_dir, *env_.tools),
                                           env_.executor);
        auto info = orchestrator.start_session({{"background", "simulated " + std::string(session::to_string(profile.level)) +
                                                                   "-level programming student"},
                                                {"goals", goals},
                                                {"level", session::to_string(profile.level)},
                                                {"preferred_topics", {topic}}});
        result.material = orchestrator.generate_material(info.session_id).markdown;
        for (int turn = 1; turn <= config_.max_turns; ++turn) {
            auto question = student.ask(turn, last_reply);
            auto answer = orchestrator.answer_question(info.session_id, question);
            result.dialogue.push_back(llm::ChatMessage::user(question));
            result.dialogue.push_back(llm::ChatMessage::assistant(answer.text, agents::roles::tutor));
            last_reply = answer.text;
            result.tutoring_turns = turn;
            if (answer.stop_suggested) {
                result.stopped_early = turn < config_.max_turns;
                break;
            }
        }
    } else {
        auto binding = gateway.binding_for(baseline_tutor_role);
        auto prompt = read_text(env_.prompts_dir / (std::string(baseline_tutor_role) + ".txt"));
        std::vector<llm::ChatMessage> chat{
            llm::ChatMessage::system(prompt + "\nThe student is working on this problem:\n" + problem.statement)};
        for (int turn = 1; turn <= config_.max_turns; ++turn) {
            auto question = student.ask(turn, last_reply);
            chat.push_back(llm::ChatMessage::user(question));
            auto reply = gateway.complete(binding, chat).text;
            chat.push_back(llm::ChatMessage::assistant(reply, baseline_tutor_role));
            last_reply = reply;
            result.tutoring_turns = turn;
            std::string recent;
            for (std::size_t i = chat.size() >= 6 ? chat.size() - 6 : 1; i < chat.size(); ++i)
                recent += std::string(llm::to_string(chat[i].role)) + ": " + chat[i].content + "\n";
            if (session::objectives_met(gateway, goals, turn, recent)) {
                result.stopped_early = turn < config_.max_turns;
                break;
            }
        }
        result.dialogue.assign(chat.begin() + 1, chat.end());
        std::vector<llm::ChatMessage> ask{
            llm::ChatMessage::system(prompt),
            llm::ChatMessage::user("[material topic=" + topic + "] Write short learning material on " + topic +
                                   " for a " + std::string(session::to_string(profile.level)) +
                                   "-level student working on '" + problem.title + "'."),
        };
        result.material = gateway.complete(binding, ask).text;
    }

    if (config_.judge_materials && result.material) {
        session::StudentProfile judged{"simulated student", goals, profile.level, {topic}};
        result.quality = judge_materials(gateway, gateway.binding_for(judge_role), env_.rubric, *result.material, judged);
    }
    result.post = test_phase(student, problem, "post", to_string(tutor));
    return result;
}

RunResults Evaluator::cross_validate(const std::vector<Problem>& all_problems) {
    config_.validate(all_problems.size());
    std::vector<Problem> problems(all_problems.begin(),
                                  all_problems.begin() + static_cast<std::ptrdiff_t>(
                                                             config_.problems ? config_.problems : all_problems.size()));
    for (const auto& p : problems) {
        validate(p, config_.cases);
    }
    std::error_code ec;
    fs::remove_all(env_.work_dir / "episodes", ec);

    RunResults results;
    results.config = config_.to_json();
    results.config["N"] = problems.size();
    auto folds = make_folds(problems.size(), config_.folds, config_.seed);
    auto K = static_cast<std::size_t>(config_.submissions);

    for (auto tutor : config_.tutors) {
        std::vector<AggregateResult> per_level;
        for (auto level : config_.levels) {
            std::vector<PhaseScores> pre_folds, post_folds;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                const auto& fold = folds[f];
                std::vector<OutcomeRow> pre(fold.size()), post(fold.size());
                std::vector<std::optional<QualityScores>> quality(fold.size());
                parallel_for(fold.size(), config_.workers, [&](std::size_t i) {
                    const auto& problem = problems[fold[i]];
                    auto gateway = env_.gateway->fork_session();
                    auto profile = build_student(level, problem, gateway.binding_for(student_role));
                    StudentSession student(profile, gateway);
                    pre[i] = pretest(student, problem);
                    auto episode = run_episode(student, profile, tutor, problem, gateway);
                    post[i] = std::move(episode.post);
                    quality[i] = std::move(episode.quality);
                });

                FoldResult fr;
                fr.fold = f;
                fr.tutor = tutor;
                fr.level = level;
                for (auto idx : fold) fr.problem_ids.push_back(problems[idx].problem_id);
                fr.pre = score(pre, K, config_.cases);
                fr.post = score(post, K, config_.cases);
                pre_folds.push_back(fr.pre);
                post_folds.push_back(fr.post);
                results.per_fold.push_back(fr);
                for (std::size_t i = 0; i < fold.size(); ++i) {
                    if (!quality[i]) continue;
                    results.quality.push_back({tutor, level, problems[fold[i]].problem_id, quality[i]->ia,
                                               quality[i]->cc, quality[i]->interactivity, quality[i]->per});
                }
            }
            AggregateResult agg{tutor, level, mean(pre_folds), mean(post_folds)};
            results.aggregate.push_back(agg);
            per_level.push_back(agg);
        }
        std::vector<PhaseScores> pres, posts;
        for (const auto& a : per_level) {
            pres.push_back(a.pre);
            posts.push_back(a.post);
        }
        results.aggregate.push_back({tutor, std::nullopt, mean(pres), mean(posts)});
    }
    return results;
}

nlohmann::json results_json(const RunResults& results) {
    nlohmann::json per_fold = nlohmann::json::array(), aggregate = nlohmann::json::array(),
                   tirs = nlohmann::json::array();
    for (const auto& f : results.per_fold)
        per_fold.push_back({{"fold", f.fold},
                            {"tutor", to_string(f.tutor)},
                            {"level", session::to_string(f.level)},
                            {"problems", f.problem_ids},
                            {"pre", scores_json(f.pre)},
                            {"post", scores_json(f.post)}});
    for (const auto& a : results.aggregate) {
        aggregate.push_back({{"tutor", to_string(a.tutor)},
                             {"level", level_json(a.level)},
                             {"pre", scores_json(a.pre)},
                             {"post", scores_json(a.post)}});
        nlohmann::json t = {{"tutor", to_string(a.tutor)},
                            {"level", level_json(a.level)},
                            {"pass", tir_entry(a.pre.pass, a.post.pass)},
                            {"recall", tir_entry(a.pre.recall, a.post.recall)}};
        if (t["pass"].is_null()) t["pass_error"] = "undefined_baseline";
        if (t["recall"].is_null()) t["recall_error"] = "undefined_baseline";
        tirs.push_back(t);
    }
    return {{"config", results.config}, {"per_fold", per_fold}, {"aggregate", aggregate}, {"tir", tirs}};
}

nlohmann::json quality_json(const RunResults& results) {
    nlohmann::json records = nlohmann::json::array();
    std::map<std::string, std::array<double, 5>> sums;
    std::map<std::string, int> counts;
    for (const auto& q : results.quality) {
        records.push_back({{"tutor", to_string(q.tutor)},
                           {"level", session::to_string(q.level)},
                           {"problem_id", q.problem_id},
                           {"IA", q.ia},
                           {"CC", q.cc},
                           {"INT", q.interactivity},
                           {"PER", q.per}});
        auto& s = sums[std::string(to_string(q.tutor))];
        s[0] += q.ia;
        s[1] += q.cc;
        s[2] += q.interactivity;
        s[3] += q.per;
        s[4] += (q.ia + q.cc + q.interactivity + q.per) / 4.0;
        ++counts[std::string(to_string(q.tutor))];
    }
    static const char* names[] = {"IA", "CC", "INT", "PER", "average"};
    nlohmann::json means = nlohmann::json::object();
    for (const auto& [tutor, s] : sums)
        for (int i = 0; i < 5; ++i) means[tutor][names[i]] = s[static_cast<std::size_t>(i)] / counts[tutor];
    nlohmann::json doc = {{"records", records}, {"mean", means}};
    if (means.contains("codeedu") && means.contains("baseline")) {
        nlohmann::json improvement;
        for (const char* n : names) improvement[n] = tir_entry(means["baseline"][n], means["codeedu"][n]);
        doc["improvement_percent"] = improvement;
    }
    return doc;
}

void write_results(const RunResults& results, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "results.json") << results_json(results).dump(2) << '\n';
    std::ofstream(out_dir / "quality.json") << quality_json(results).dump(2) << '\n';

    std::ofstream csv(out_dir / "results.csv");
    csv << "tutor,level,fold,phase,pass,recall\n";
    for (const auto& f : results.per_fold) {
        for (auto [phase, s] : {std::pair{"pre", f.pre}, std::pair{"post", f.post}})
            csv << to_string(f.tutor) << ',' << session::to_string(f.level) << ',' << f.fold << ',' << phase << ','
                << csv_number(s.pass) << ',' << csv_number(s.recall) << '\n';
    }
    for (const auto& a : results.aggregate) {
        auto level = a.level ? std::string(session::to_string(*a.level)) : std::string("mean");
        for (auto [phase, s] : {std::pair{"pre", a.pre}, std::pair{"post", a.post}})
            csv << to_string(a.tutor) << ',' << level << ",all," << phase << ',' << csv_number(s.pass) << ','
                << csv_number(s.recall) << '\n';
    }
}

} // namespace codeedu::eval
