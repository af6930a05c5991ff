#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace codeedu::tools {

struct SandboxPolicy {
    std::chrono::milliseconds wall_clock_limit{10'000};
    std::uint64_t memory_limit = 256ull << 20;
    std::uint64_t output_limit = 16ull << 20;  // per captured stream and per written file
    bool network_allowed = false;
};

void validate(const SandboxPolicy& policy);

enum class Verdict { ok, runtime_error, timeout, memory_exceeded };

std::string_view to_string(Verdict verdict);

struct ExecutionResult {
    std::string stdout_text;
    std::string stderr_text;
    int exit_status = 0;       // exit code, or 128 + signal when killed
    Verdict verdict = Verdict::ok;
    std::chrono::milliseconds elapsed{0};
    std::filesystem::path scratch_dir;
};

enum class Comparison { exact, whitespace_normalized, numeric };

struct TestCase {
    std::string input;
    std::string expected_output;
    Comparison comparison = Comparison::whitespace_normalized;
    double tolerance = 1e-6;  // numeric only
};

struct CaseRun {
    bool passed = false;
    Verdict verdict = Verdict::ok;
    std::string stdout_text;
    std::string stderr_text;
    std::chrono::milliseconds elapsed{0};
};

struct TestReport {
    std::vector<bool> case_results;
    bool all_passed = false;
    std::vector<CaseRun> runs;

    std::size_t passed_count() const;
};

struct CrawlEntry {
    std::string url;
    std::string title;
    std::string snippet;
    std::string fetched_text;
};

// Entries are in relevance order; rank is position + 1.
struct CrawlResult {
    std::vector<CrawlEntry> entries;
};

enum class ParamType { string, integer, boolean };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::string;
    bool required = true;
};

struct ToolDescriptor {
    std::string name;
    std::string description;
    std::vector<ParamSpec> input_schema;
};

Comparison comparison_from_string(std::string_view text);
std::string_view to_string(Comparison comparison);

void to_json(nlohmann::json& j, const TestCase& c);
void from_json(const nlohmann::json& j, TestCase& c);
void to_json(nlohmann::json& j, const TestReport& r);
void to_json(nlohmann::json& j, const ExecutionResult& r);
void to_json(nlohmann::json& j, const CrawlEntry& e);
void from_json(const nlohmann::json& j, CrawlEntry& e);
void to_json(nlohmann::json& j, const ToolDescriptor& d);

} // namespace codeedu::tools
