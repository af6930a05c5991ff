#include "codeedu/tools/registry.hpp"

#include "codeedu/error.hpp"
#include "codeedu/llm/gateway.hpp"
#include "codeedu/tools/file_io.hpp"
#include "codeedu/tools/research.hpp"

namespace codeedu::tools {

namespace {

class WebCrawlerTool : public Tool {
public:
    explicit WebCrawlerTool(CrawlerConfig config) : crawler_(std::move(config)) {}

    const ToolDescriptor& descriptor() const override { return descriptor_; }

    ToolResult invoke(const nlohmann::json& args, const ToolContext&) const override {
        int max_results = args.contains("max_results") ? args["max_results"].get<int>() : 5;
        return crawler_.crawl(args["query"].get<std::string>(), max_results);
    }

private:
    Crawler crawler_;
    ToolDescriptor descriptor_{std::string(web_crawler_tool),
                               "Searches the internet and returns the most relevant results.",
                               {{"query", ParamType::string, true}, {"max_results", ParamType::integer, false}}};
};

class FileIoTool : public Tool {
public:
    const ToolDescriptor& descriptor() const override { return descriptor_; }

    ToolResult invoke(const nlohmann::json& args, const ToolContext& context) const override {
        auto mode = args["mode"].get<std::string>();
        if (mode != "read" && mode != "write")
            fail(ErrorKind::schema_mismatch, "file_io mode must be read or write");
        std::optional<std::string> content;
        if (args.contains("content")) content = args["content"].get<std::string>();
        auto out = file_io(context.workspace_root, mode == "read" ? FileMode::read : FileMode::write,
                           args["path"].get<std::string>(), content);
        if (out) return *out;
        return std::monostate{};
    }

private:
    ToolDescriptor descriptor_{std::string(file_io_tool),
                               "Reads files from the session workspace and writes content to files.",
                               {{"mode", ParamType::string, true},
                                {"path", ParamType::string, true},
                                {"content", ParamType::string, false}}};
};

class CodeInterpreterTool : public Tool {
public:
    explicit CodeInterpreterTool(std::shared_ptr<const CodeExecutor> executor) : executor_(std::move(executor)) {}

    const ToolDescriptor& descriptor() const override { return descriptor_; }

    ToolResult invoke(const nlohmann::json& args, const ToolContext& context) const override {
        require(!context.workspace_root.empty(), "code_interpreter needs a workspace");
        ExecutionRequest request{args["source"].get<std::string>(),
                                 args.value("stdin", std::string{}), context.policy,
                                 context.workspace_root / "sandbox"};
        return executor_->execute(request);
    }

private:
    std::shared_ptr<const CodeExecutor> executor_;
    ToolDescriptor descriptor_{std::string(code_interpreter_tool),
                               "Executes Python 3 code within a secure, isolated environment.",
                               {{"source", ParamType::string, true}, {"stdin", ParamType::string, false}}};
};

class DeepResearchTool : public Tool {
public:
    const ToolDescriptor& descriptor() const override { return descriptor_; }

    ToolResult invoke(const nlohmann::json& args, const ToolContext& context) const override {
        require(context.gateway != nullptr, "deep_research needs a gateway");
        auto binding = context.gateway->binding_for(context.agent_role.empty() ? "tutor" : context.agent_role);
        return deep_research(*context.gateway, binding, args.value("context", std::string{}),
                             args["question"].get<std::string>());
    }

private:
    ToolDescriptor descriptor_{std::string(deep_research_tool),
                               "Generates personalized explanations based on contextual information.",
                               {{"question", ParamType::string, true}, {"context", ParamType::string, false}}};
};

bool matches(ParamType type, const nlohmann::json& value) {
    switch (type) {
        case ParamType::string: return value.is_string();
        case ParamType::integer: return value.is_number_integer();
        case ParamType::boolean: return value.is_boolean();
    }
    return false;
}

} // namespace

nlohmann::json result_to_json(const ToolResult& result) {
    return std::visit(
        [](const auto& r) -> nlohmann::json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {{"ok", true}};
            } else if constexpr (std::is_same_v<T, std::string>) {
                return {{"text", r}};
            } else if constexpr (std::is_same_v<T, ExecutionResult>) {
                return r;
            } else {
                return {{"results", r.entries}};
            }
        },
        result);
}

void validate_arguments(const ToolDescriptor& descriptor, const nlohmann::json& arguments) {
    if (!arguments.is_object())
        fail(ErrorKind::schema_mismatch, descriptor.name + ": arguments must be an object");
    for (const auto& param : descriptor.input_schema) {
        if (!arguments.contains(param.name)) {
            if (param.required)
                fail(ErrorKind::schema_mismatch, descriptor.name + ": missing argument '" + param.name + "'");
            continue;
        }
        if (!matches(param.type, arguments[param.name]))
            fail(ErrorKind::schema_mismatch, descriptor.name + ": argument '" + param.name + "' has the wrong type");
    }
    for (const auto& [key, value] : arguments.items()) {
        bool declared = false;
        for (const auto& param : descriptor.input_schema) declared = declared || param.name == key;
        if (!declared) fail(ErrorKind::schema_mismatch, descriptor.name + ": unexpected argument '" + key + "'");
    }
}

ToolRegistry::ToolRegistry(std::shared_ptr<const CodeExecutor> executor, CrawlerConfig crawler,
                           std::vector<std::shared_ptr<const Tool>> extra_tools)
    : executor_(std::move(executor)) {
    require(executor_ != nullptr, "tool registry needs a code executor");
    add(std::make_shared<WebCrawlerTool>(std::move(crawler)));
    add(std::make_shared<FileIoTool>());
    add(std::make_shared<CodeInterpreterTool>(executor_));
    add(std::make_shared<DeepResearchTool>());
    for (auto& tool : extra_tools) add(std::move(tool));
}

void ToolRegistry::add(std::shared_ptr<const Tool> tool) {
    const auto& name = tool->descriptor().name;
    if (!tools_.emplace(name, tool).second) fail(ErrorKind::config, "tool '" + name + "' registered twice");
}

std::vector<ToolDescriptor> ToolRegistry::descriptors() const {
    std::vector<ToolDescriptor> out;
    for (const auto& [name, tool] : tools_) out.push_back(tool->descriptor());
    return out;
}

bool ToolRegistry::contains(std::string_view name) const { return tools_.find(name) != tools_.end(); }

ToolResult ToolRegistry::invoke(std::string_view name, const nlohmann::json& arguments,
                                const ToolContext& context) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) fail(ErrorKind::unknown_tool, "unknown tool '" + std::string(name) + "'");
    validate_arguments(it->second->descriptor(), arguments);
    return it->second->invoke(arguments, context);
}

} // namespace codeedu::tools
