#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codeedu::llm {

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    std::optional<std::string> author_agent;

    static ChatMessage system(std::string text) { return {Role::system, std::move(text), std::nullopt}; }
    static ChatMessage user(std::string text) { return {Role::user, std::move(text), std::nullopt}; }
    static ChatMessage assistant(std::string text, std::optional<std::string> author = std::nullopt) {
        return {Role::assistant, std::move(text), std::move(author)};
    }
    static ChatMessage tool(std::string text) { return {Role::tool, std::move(text), std::nullopt}; }

    bool operator==(const ChatMessage&) const = default;
};

// Throws precondition when a user/assistant message is empty.
void validate(const ChatMessage& message);

struct ModelBinding {
    std::string agent_role;
    std::string provider_id;
    std::string model_name;
    double temperature = 0.7;
    int max_output_tokens = 1024;

    bool operator==(const ModelBinding&) const = default;
};

void validate(const ModelBinding& binding);

enum class FinishReason { stop, length, error };

std::string_view to_string(FinishReason reason);

struct Usage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct CompletionResult {
    std::string text;
    FinishReason finish_reason = FinishReason::stop;
    Usage usage;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const ModelBinding& b);
void from_json(const nlohmann::json& j, ModelBinding& b);

} // namespace codeedu::llm
