#pragma once

#include "codeedu/tools/crawler.hpp"
#include "codeedu/tools/sandbox.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace codeedu::llm {
class Gateway;
}

namespace codeedu::tools {

inline constexpr std::string_view web_crawler_tool = "web_crawler";
inline constexpr std::string_view file_io_tool = "file_io";
inline constexpr std::string_view code_interpreter_tool = "code_interpreter";
inline constexpr std::string_view deep_research_tool = "deep_research";

// Per-invocation state: which session workspace file_io and the sandbox may
// touch, and which gateway/role answers deep_research.
struct ToolContext {
    std::filesystem::path workspace_root;
    const llm::Gateway* gateway = nullptr;
    std::string agent_role;
    SandboxPolicy policy;
};

// Unit for file_io writes, text for reads and research, structured results
// for the interpreter and the crawler.
using ToolResult = std::variant<std::monostate, std::string, ExecutionResult, CrawlResult>;

nlohmann::json result_to_json(const ToolResult& result);

class Tool {
public:
    virtual ~Tool() = default;
    virtual const ToolDescriptor& descriptor() const = 0;
    virtual ToolResult invoke(const nlohmann::json& arguments, const ToolContext& context) const = 0;
};

// Throws schema_mismatch on a missing required parameter, a wrong JSON type
// or an undeclared parameter.
void validate_arguments(const ToolDescriptor& descriptor, const nlohmann::json& arguments);

class ToolInvoker {
public:
    virtual ~ToolInvoker() = default;
    virtual std::vector<ToolDescriptor> descriptors() const = 0;
    virtual bool contains(std::string_view name) const = 0;
    virtual ToolResult invoke(std::string_view name, const nlohmann::json& arguments,
                              const ToolContext& context) const = 0;
};

// Immutable after construction; the four default tools are always present.
class ToolRegistry : public ToolInvoker {
public:
    ToolRegistry(std::shared_ptr<const CodeExecutor> executor, CrawlerConfig crawler,
                 std::vector<std::shared_ptr<const Tool>> extra_tools = {});

    std::vector<ToolDescriptor> descriptors() const override;
    bool contains(std::string_view name) const override;
    ToolResult invoke(std::string_view name, const nlohmann::json& arguments,
                      const ToolContext& context) const override;

    const CodeExecutor& executor() const { return *executor_; }

private:
    void add(std::shared_ptr<const Tool> tool);

    std::shared_ptr<const CodeExecutor> executor_;
    std::map<std::string, std::shared_ptr<const Tool>, std::less<>> tools_;
};

} // namespace codeedu::tools
