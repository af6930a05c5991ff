#pragma once

#include "codeedu/eval/judge.hpp"
#include "codeedu/eval/metrics.hpp"
#include "codeedu/eval/problem.hpp"
#include "codeedu/eval/student.hpp"
#include "codeedu/tools/registry.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace codeedu::eval {

enum class TutorKind { codeedu, baseline };

std::string_view to_string(TutorKind tutor);
TutorKind tutor_from_string(std::string_view text);

inline constexpr const char* baseline_tutor_role = "baseline_tutor";

struct EvalConfig {
    std::size_t problems = 0;  // 0: every problem in the set
    int submissions = 3;       // K
    std::size_t cases = 10;    // M
    int max_turns = 20;        // T
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    int workers = 4;
    std::vector<TutorKind> tutors = {TutorKind::codeedu, TutorKind::baseline};
    std::vector<Level> levels = {Level::low, Level::medium, Level::high};
    bool judge_materials = true;
    tools::SandboxPolicy policy;

    // All counts positive and folds <= problem count.
    void validate(std::size_t problem_count) const;
    nlohmann::json to_json() const;
};

// Seeded shuffle of 0..n-1 cut into `folds` disjoint folds; the first
// n % folds folds hold one extra problem. Indices inside a fold are sorted.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

// Runs submissions against test cases, remembering verdicts per
// (source, cases) so repeated submissions are graded once.
class Grader {
public:
    Grader(std::shared_ptr<const tools::CodeExecutor> executor, std::filesystem::path scratch,
           tools::SandboxPolicy policy);

    std::vector<bool> grade(const std::string& source, const std::vector<tools::TestCase>& cases);
    std::size_t executions() const;

private:
    std::shared_ptr<const tools::CodeExecutor> executor_;
    std::filesystem::path scratch_;
    tools::SandboxPolicy policy_;
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<bool>> cache_;
    std::size_t executions_ = 0;
};

// Everything an evaluation run calls into; gateway state is forked per
// episode.
struct EvalEnvironment {
    std::shared_ptr<llm::Gateway> gateway;
    std::shared_ptr<const tools::CodeExecutor> executor;
    std::shared_ptr<const tools::ToolInvoker> tools;
    std::filesystem::path prompts_dir;
    std::string rubric;
    std::filesystem::path work_dir;
};

// Gateway over the scripted fixtures in <fixtures>/llm and an offline crawler
// over <fixtures>/corpus.
EvalEnvironment mock_environment(const std::filesystem::path& fixtures_dir, const std::filesystem::path& work_dir,
                                 std::shared_ptr<const tools::CodeExecutor> executor);

// Every role an evaluation needs a binding for.
std::vector<std::string> eval_roles();

using OutcomeRow = std::vector<std::vector<bool>>;  // K x M

struct EpisodeResult {
    OutcomeRow post;
    int tutoring_turns = 0;
    bool stopped_early = false;
    std::vector<llm::ChatMessage> dialogue;  // tutor-side view: student as user
    std::optional<std::string> material;
    std::optional<QualityScores> quality;
};

struct PhaseScores {
    double pass = 0;
    double recall = 0;
};

struct FoldResult {
    std::size_t fold = 0;
    TutorKind tutor = TutorKind::codeedu;
    Level level = Level::low;
    std::vector<std::string> problem_ids;
    PhaseScores pre;
    PhaseScores post;
};

struct AggregateResult {
    TutorKind tutor = TutorKind::codeedu;
    std::optional<Level> level;  // nullopt: mean over levels
    PhaseScores pre;
    PhaseScores post;
};

struct QualityRecord {
    TutorKind tutor = TutorKind::codeedu;
    Level level = Level::low;
    std::string problem_id;
    int ia = 0, cc = 0, interactivity = 0, per = 0;
};

struct RunResults {
    nlohmann::json config;
    std::vector<FoldResult> per_fold;
    std::vector<AggregateResult> aggregate;
    std::vector<QualityRecord> quality;
};

class Evaluator {
public:
    Evaluator(EvalConfig config, EvalEnvironment env);

    // K submissions before any tutoring, graded on all M cases.
    OutcomeRow pretest(StudentSession& student, const Problem& problem);

    // Up to T tutoring turns (early stop honoured), then K graded
    // submissions. `student` carries its own forked gateway.
    EpisodeResult run_episode(StudentSession& student, const SimulatedStudent& profile, TutorKind tutor,
                              const Problem& problem, const llm::Gateway& gateway);

    RunResults cross_validate(const std::vector<Problem>& problems);

    const Grader& grader() const { return grader_; }

private:
    OutcomeRow test_phase(StudentSession& student, const Problem& problem, std::string_view phase,
                          std::string_view tutor);

    EvalConfig config_;
    EvalEnvironment env_;
    Grader grader_;
};

// results.json {config, per_fold, aggregate, tir}, results.csv and
// quality.json.
void write_results(const RunResults& results, const std::filesystem::path& out_dir);
nlohmann::json results_json(const RunResults& results);
nlohmann::json quality_json(const RunResults& results);

} // namespace codeedu::eval
