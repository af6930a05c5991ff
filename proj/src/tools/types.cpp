#include "codeedu/tools/types.hpp"

#include "codeedu/error.hpp"

#include <algorithm>

namespace codeedu::tools {

std::size_t TestReport::passed_count() const {
    return static_cast<std::size_t>(std::count(case_results.begin(), case_results.end(), true));
}

Comparison comparison_from_string(std::string_view text) {
    if (text == "exact") return Comparison::exact;
    if (text == "whitespace" || text == "whitespace_normalized") return Comparison::whitespace_normalized;
    if (text == "numeric") return Comparison::numeric;
    fail(ErrorKind::precondition, "unknown comparison mode: " + std::string(text));
}

std::string_view to_string(Comparison comparison) {
    switch (comparison) {
        case Comparison::exact: return "exact";
        case Comparison::whitespace_normalized: return "whitespace";
        case Comparison::numeric: return "numeric";
    }
    return "whitespace";
}

void to_json(nlohmann::json& j, const TestCase& c) {
    j = {{"input", c.input}, {"expected_output", c.expected_output}, {"comparison", to_string(c.comparison)}};
    if (c.comparison == Comparison::numeric) j["tolerance"] = c.tolerance;
}

void from_json(const nlohmann::json& j, TestCase& c) {
    c.input = j.value("input", std::string{});
    if (!j.contains("expected_output")) fail(ErrorKind::precondition, "test case lacks expected_output");
    c.expected_output = j.at("expected_output").get<std::string>();
    c.comparison = comparison_from_string(j.value("comparison", std::string{"whitespace"}));
    if (c.comparison == Comparison::numeric) {
        if (!j.contains("tolerance")) fail(ErrorKind::precondition, "numeric test case needs a tolerance");
        c.tolerance = j.at("tolerance").get<double>();
    }
}

void to_json(nlohmann::json& j, const TestReport& r) {
    j = {{"case_results", r.case_results}, {"all_passed", r.all_passed}, {"runs", nlohmann::json::array()}};
    for (const auto& run : r.runs) {
        j["runs"].push_back({{"passed", run.passed},
                             {"verdict", to_string(run.verdict)},
                             {"stdout", run.stdout_text},
                             {"stderr", run.stderr_text},
                             {"elapsed_ms", run.elapsed.count()}});
    }
}

void to_json(nlohmann::json& j, const ExecutionResult& r) {
    j = {{"stdout", r.stdout_text},
         {"stderr", r.stderr_text},
         {"exit_status", r.exit_status},
         {"verdict", to_string(r.verdict)},
         {"elapsed_ms", r.elapsed.count()}};
}

void to_json(nlohmann::json& j, const CrawlEntry& e) {
    j = {{"url", e.url}, {"title", e.title}, {"snippet", e.snippet}, {"text", e.fetched_text}};
}

void from_json(const nlohmann::json& j, CrawlEntry& e) {
    e.url = j.at("url").get<std::string>();
    e.title = j.value("title", std::string{});
    e.snippet = j.value("snippet", std::string{});
    e.fetched_text = j.value("text", std::string{});
}

void to_json(nlohmann::json& j, const ToolDescriptor& d) {
    j = {{"name", d.name}, {"description", d.description}, {"parameters", nlohmann::json::array()}};
    for (const auto& p : d.input_schema) {
        const char* type = p.type == ParamType::string ? "string" : p.type == ParamType::integer ? "integer" : "boolean";
        j["parameters"].push_back({{"name", p.name}, {"type", type}, {"required", p.required}});
    }
}

} // namespace codeedu::tools
