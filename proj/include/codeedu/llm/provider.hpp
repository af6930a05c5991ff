#pragma once

#include "codeedu/llm/types.hpp"

#include <memory>
#include <span>

namespace codeedu::llm {

class Provider {
public:
    virtual ~Provider() = default;

    virtual CompletionResult complete(const ModelBinding& binding,
                                      std::span<const ChatMessage> messages) = 0;

    // Stateful providers (the scripted mock) hand out a fresh instance per
    // session so fixture consumption never leaks across sessions. Stateless
    // providers return themselves.
    virtual std::shared_ptr<Provider> for_session() = 0;

    // True when a request for `agent_role` is explicitly scripted. Live
    // providers answer every role.
    virtual bool scripted_for(std::string_view /*agent_role*/) const { return true; }
};

} // namespace codeedu::llm
