#include "codeedu/llm/http_provider.hpp"

#include "codeedu/error.hpp"

#include <httplib.h>

#include <cctype>
#include <cstdlib>

namespace codeedu::llm {

std::string api_key_variable(std::string_view provider_id) {
    std::string name = "CODEEDU_PROVIDER_";
    for (char c : provider_id) {
        auto uc = static_cast<unsigned char>(c);
        name += std::isalnum(uc) ? static_cast<char>(std::toupper(uc)) : '_';
    }
    return name + "_KEY";
}

HttpProvider::HttpProvider(ProviderEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    const std::string& url = endpoint_.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        fail(ErrorKind::config, "provider '" + endpoint_.id + "' base_url lacks a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.rfind("https://", 0) == 0)
        fail(ErrorKind::config, "built without TLS support; cannot reach " + url);
#endif
}

CompletionResult HttpProvider::complete(const ModelBinding& binding,
                                        std::span<const ChatMessage> messages) {
    nlohmann::json body = {{"model", binding.model_name},
                           {"temperature", binding.temperature},
                           {"max_tokens", binding.max_output_tokens},
                           {"messages", nlohmann::json::array()}};
    for (const auto& m : messages)
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_variable(endpoint_.id).c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res)
        fail(ErrorKind::provider_unreachable,
             "provider '" + endpoint_.id + "' unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429)
        fail(ErrorKind::rate_limited, "provider '" + endpoint_.id + "' rate limited the request");
    if (res->status >= 500)
        fail(ErrorKind::provider_unreachable,
             "provider '" + endpoint_.id + "' returned HTTP " + std::to_string(res->status));
    if (res->status != 200)
        fail(ErrorKind::provider_error,
             "provider '" + endpoint_.id + "' returned HTTP " + std::to_string(res->status),
             {{"body", res->body}});

    try {
        auto reply = nlohmann::json::parse(res->body);
        const auto& choice = reply.at("choices").at(0);
        CompletionResult result;
        const auto& content = choice.at("message").at("content");
        result.text = content.is_string() ? content.get<std::string>() : std::string{};
        auto finish = choice.value("finish_reason", std::string{"stop"});
        result.finish_reason = finish == "length" ? FinishReason::length
                             : finish == "stop"   ? FinishReason::stop
                                                  : FinishReason::error;
        if (result.finish_reason == FinishReason::stop && result.text.empty())
            result.finish_reason = FinishReason::error;
        if (reply.contains("usage")) {
            result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
            result.usage.completion_tokens = reply["usage"].value("completion_tokens", 0);
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::provider_error,
             "provider '" + endpoint_.id + "' sent an unreadable reply: " + e.what());
    }
}

} // namespace codeedu::llm
