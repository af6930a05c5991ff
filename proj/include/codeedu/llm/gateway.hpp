#pragma once

#include "codeedu/llm/http_provider.hpp"
#include "codeedu/llm/provider.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace codeedu::llm {

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{200};  // doubled after every retry
};

struct ProviderConfig {
    std::vector<ProviderEndpoint> providers;
    std::vector<ModelBinding> bindings;

    static ProviderConfig from_json(const nlohmann::json& j);
    static ProviderConfig load(const std::filesystem::path& path);
};

// Role used for bindings that are not agents (simulated students, the judge,
// the baseline tutor) when no explicit binding exists.
inline constexpr const char* fallback_binding_role = "default";

class Gateway {
public:
    Gateway() = default;

    void register_provider(const std::string& provider_id, std::shared_ptr<Provider> provider);
    void register_provider(const ProviderEndpoint& endpoint);
    bool has_provider(const std::string& provider_id) const;

    void bind(ModelBinding binding);
    // Exact binding for the role, else the "default" binding re-labelled with
    // the role. Throws config when neither exists.
    ModelBinding binding_for(const std::string& agent_role) const;
    bool has_binding(const std::string& agent_role) const;
    // Every listed role must have its own binding pointing at a registered
    // provider.
    void validate_roles(std::span<const std::string> roles) const;

    CompletionResult complete(const ModelBinding& binding,
                              std::span<const ChatMessage> messages) const;

    // Whether the provider behind the role's binding scripts that role.
    bool scripted_for(const std::string& agent_role) const;
    bool scripted_for(const ModelBinding& binding) const;

    // Copy sharing stateless providers and holding fresh per-session state for
    // stateful ones.
    Gateway fork_session() const;

    RetryPolicy& retry_policy() { return retry_; }
    const RetryPolicy& retry_policy() const { return retry_; }

    static Gateway from_config(const ProviderConfig& config);

private:
    std::shared_ptr<Provider> provider_for(const std::string& provider_id) const;

    std::map<std::string, std::shared_ptr<Provider>> providers_;
    std::map<std::string, ModelBinding> bindings_;
    RetryPolicy retry_;
};

// Bindings for every role on one provider. Programmer runs at 0.2, the rest
// at 0.7.
std::vector<ModelBinding> default_bindings(const std::string& provider_id,
                                           const std::string& model_name,
                                           std::span<const std::string> roles);

} // namespace codeedu::llm
