#include "codeedu/llm/gateway.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <set>
#include <thread>

namespace codeedu::llm {

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j) {
    ProviderConfig config;
    try {
        for (const auto& p : j.at("providers")) {
            ProviderEndpoint endpoint;
            endpoint.id = p.at("id").get<std::string>();
            endpoint.base_url = p.at("base_url").get<std::string>();
            endpoint.model_names = p.value("model_names", std::vector<std::string>{});
            config.providers.push_back(std::move(endpoint));
        }
        std::set<std::string> seen;
        for (const auto& b : j.at("bindings")) {
            auto binding = b.get<ModelBinding>();
            if (!seen.insert(binding.agent_role).second)
                fail(ErrorKind::config, "duplicate binding for role '" + binding.agent_role + "'");
            config.bindings.push_back(std::move(binding));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("bad provider config: ") + e.what());
    }
    return config;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open provider config " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::config, "provider config is not JSON: " + std::string(e.what()));
    }
}

void Gateway::register_provider(const std::string& provider_id, std::shared_ptr<Provider> provider) {
    require(!provider_id.empty() && provider != nullptr, "provider needs an id and an instance");
    if (providers_.count(provider_id))
        fail(ErrorKind::duplicate_provider, "provider '" + provider_id + "' already registered");
    providers_.emplace(provider_id, std::move(provider));
}

void Gateway::register_provider(const ProviderEndpoint& endpoint) {
    register_provider(endpoint.id, std::make_shared<HttpProvider>(endpoint));
}

bool Gateway::has_provider(const std::string& provider_id) const {
    return providers_.count(provider_id) > 0;
}

void Gateway::bind(ModelBinding binding) {
    validate(binding);
    bindings_.insert_or_assign(binding.agent_role, std::move(binding));
}

bool Gateway::has_binding(const std::string& agent_role) const {
    return bindings_.count(agent_role) > 0;
}

ModelBinding Gateway::binding_for(const std::string& agent_role) const {
    if (auto it = bindings_.find(agent_role); it != bindings_.end()) return it->second;
    if (auto it = bindings_.find(fallback_binding_role); it != bindings_.end()) {
        ModelBinding b = it->second;
        b.agent_role = agent_role;
        return b;
    }
    fail(ErrorKind::config, "no model binding for role '" + agent_role + "'");
}

void Gateway::validate_roles(std::span<const std::string> roles) const {
    for (const auto& role : roles) {
        auto it = bindings_.find(role);
        if (it == bindings_.end())
            fail(ErrorKind::config, "agent role '" + role + "' has no model binding");
        if (!providers_.count(it->second.provider_id))
            fail(ErrorKind::config, "binding for '" + role + "' names unregistered provider '" +
                                        it->second.provider_id + "'");
    }
}

std::shared_ptr<Provider> Gateway::provider_for(const std::string& provider_id) const {
    auto it = providers_.find(provider_id);
    if (it == providers_.end())
        fail(ErrorKind::provider_unreachable, "provider '" + provider_id + "' is not registered",
             {{"retries", 0}});
    return it->second;
}

bool Gateway::scripted_for(const std::string& agent_role) const {
    return scripted_for(binding_for(agent_role));
}

bool Gateway::scripted_for(const ModelBinding& binding) const {
    return provider_for(binding.provider_id)->scripted_for(binding.agent_role);
}

CompletionResult Gateway::complete(const ModelBinding& binding,
                                   std::span<const ChatMessage> messages) const {
    require(!messages.empty(), "complete needs at least one message");
    for (const auto& m : messages) validate(m);
    auto provider = provider_for(binding.provider_id);

    auto delay = retry_.base_delay;
    for (int attempt = 0;; ++attempt) {
        try {
            return provider->complete(binding, messages);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::provider_unreachable) throw;
            if (attempt >= retry_.max_retries)
                fail(ErrorKind::provider_unreachable,
                     std::string(e.what()) + " (after " + std::to_string(attempt) + " retries)",
                     {{"retries", attempt}});
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

Gateway Gateway::fork_session() const {
    Gateway copy;
    for (const auto& [id, provider] : providers_) copy.providers_.emplace(id, provider->for_session());
    copy.bindings_ = bindings_;
    copy.retry_ = retry_;
    return copy;
}

Gateway Gateway::from_config(const ProviderConfig& config) {
    Gateway gateway;
    for (const auto& endpoint : config.providers) gateway.register_provider(endpoint);
    for (const auto& binding : config.bindings) gateway.bind(binding);
    return gateway;
}

std::vector<ModelBinding> default_bindings(const std::string& provider_id,
                                           const std::string& model_name,
                                           std::span<const std::string> roles) {
    std::vector<ModelBinding> out;
    for (const auto& role : roles) {
        ModelBinding b;
        b.agent_role = role;
        b.provider_id = provider_id;
        b.model_name = model_name;
        b.temperature = role == "programmer" ? 0.2 : 0.7;
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace codeedu::llm
