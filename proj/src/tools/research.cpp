#include "codeedu/tools/research.hpp"

#include "codeedu/error.hpp"

namespace codeedu::tools {

std::vector<llm::ChatMessage> research_prompt(const std::string& context, const std::string& question) {
    std::string user = "Context:\n";
    user += context.empty() ? "(none)" : context;
    user += "\n\nQuestion:\n" + question +
            "\n\nExplain the answer for this learner, grounded in the context where it applies.";
    return {llm::ChatMessage::system("You are a research engine that writes personalized, accurate "
                                     "explanations of programming concepts."),
            llm::ChatMessage::user(std::move(user))};
}

std::string deep_research(const llm::Gateway& gateway, const llm::ModelBinding& binding,
                          const std::string& context, const std::string& question) {
    require(!question.empty(), "deep_research question must be non-empty");
    auto messages = research_prompt(context, question);
    return gateway.complete(binding, messages).text;
}

} // namespace codeedu::tools
