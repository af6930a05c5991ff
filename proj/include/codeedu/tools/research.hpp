#pragma once

#include "codeedu/llm/gateway.hpp"

#include <string>

namespace codeedu::tools {

std::vector<llm::ChatMessage> research_prompt(const std::string& context, const std::string& question);

// Personalized explanation grounded in `context`.
std::string deep_research(const llm::Gateway& gateway, const llm::ModelBinding& binding,
                          const std::string& context, const std::string& question);

} // namespace codeedu::tools
