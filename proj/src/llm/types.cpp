#include "codeedu/llm/types.hpp"

#include "codeedu/error.hpp"

namespace codeedu::llm {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
    }
    return "user";
}

Role role_from_string(std::string_view text) {
    if (text == "system") return Role::system;
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    if (text == "tool") return Role::tool;
    fail(ErrorKind::precondition, "unknown chat role: " + std::string(text));
}

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::error: return "error";
    }
    return "error";
}

void validate(const ChatMessage& message) {
    if ((message.role == Role::user || message.role == Role::assistant) && message.content.empty()) {
        fail(ErrorKind::precondition,
             std::string(to_string(message.role)) + " message must have content");
    }
}

void validate(const ModelBinding& binding) {
    require(!binding.agent_role.empty(), "binding needs an agent role");
    require(!binding.provider_id.empty(), "binding '" + binding.agent_role + "' needs a provider");
    require(binding.temperature >= 0.0 && binding.temperature <= 2.0,
            "binding '" + binding.agent_role + "' temperature outside [0,2]");
    require(binding.max_output_tokens > 0,
            "binding '" + binding.agent_role + "' max_output_tokens must be positive");
}

void to_json(nlohmann::json& j, const ChatMessage& m) {
    j = {{"role", to_string(m.role)}, {"content", m.content}};
    if (m.author_agent) j["author_agent"] = *m.author_agent;
}

void from_json(const nlohmann::json& j, ChatMessage& m) {
    m.role = role_from_string(j.at("role").get<std::string>());
    m.content = j.at("content").get<std::string>();
    if (j.contains("author_agent") && !j["author_agent"].is_null())
        m.author_agent = j["author_agent"].get<std::string>();
    else
        m.author_agent.reset();
}

void to_json(nlohmann::json& j, const ModelBinding& b) {
    j = {{"agent_role", b.agent_role},
         {"provider_id", b.provider_id},
         {"model_name", b.model_name},
         {"temperature", b.temperature},
         {"max_output_tokens", b.max_output_tokens}};
}

void from_json(const nlohmann::json& j, ModelBinding& b) {
    b.agent_role = j.at("agent_role").get<std::string>();
    b.provider_id = j.at("provider_id").get<std::string>();
    b.model_name = j.value("model_name", std::string{});
    b.temperature = j.value("temperature", 0.7);
    b.max_output_tokens = j.value("max_output_tokens", 1024);
}

} // namespace codeedu::llm
