#pragma once

#include "codeedu/llm/provider.hpp"

#include <string>
#include <vector>

namespace codeedu::llm {

struct ProviderEndpoint {
    std::string id;
    std::string base_url;                 // e.g. https://api.openai.com/v1
    std::vector<std::string> model_names;
};

// Environment variable holding the API key for a provider:
// CODEEDU_PROVIDER_<ID>_KEY with the id upper-cased and non-alphanumerics
// replaced by '_'.
std::string api_key_variable(std::string_view provider_id);

// OpenAI-compatible chat-completions client. One attempt per call; retries
// live in the Gateway.
class HttpProvider : public Provider, public std::enable_shared_from_this<HttpProvider> {
public:
    explicit HttpProvider(ProviderEndpoint endpoint);

    CompletionResult complete(const ModelBinding& binding,
                              std::span<const ChatMessage> messages) override;
    std::shared_ptr<Provider> for_session() override { return shared_from_this(); }

    const ProviderEndpoint& endpoint() const { return endpoint_; }

private:
    ProviderEndpoint endpoint_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

} // namespace codeedu::llm
