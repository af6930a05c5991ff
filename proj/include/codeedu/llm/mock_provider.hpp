#pragma once

#include "codeedu/llm/provider.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace codeedu::llm {

// Scripted responses for the mock provider.
//
// Index mode (default) hands entries out in order, one per request, and fails
// with fixture_exhausted once they run out. Substring mode matches the last
// request message against each unconsumed entry's substring; two different
// matching substrings in one request is fixture_ambiguous. Entries marked
// `repeat` are never consumed. When nothing matches, the optional fallback
// answers instead.
struct ScriptedFixture {
    enum class Mode { index, substring };

    struct Entry {
        std::string match;     // substring mode only
        std::string response;
        bool repeat = false;   // substring mode only
    };

    Mode mode = Mode::index;
    std::vector<Entry> entries;
    std::optional<std::string> fallback;

    static ScriptedFixture sequence(std::vector<std::string> responses);
    static ScriptedFixture from_json(const nlohmann::json& j);
    static ScriptedFixture load(const std::filesystem::path& path);
};

struct RecordedRequest {
    ModelBinding binding;
    std::vector<ChatMessage> messages;
};

// Offline provider replaying ScriptedFixtures keyed by agent role. A request
// uses the fixture registered for binding.agent_role, else the "default"
// fixture. Each instance serializes its requests.
class MockProvider : public Provider {
public:
    static constexpr const char* default_role = "default";

    MockProvider() = default;
    explicit MockProvider(ScriptedFixture fixture);
    explicit MockProvider(std::map<std::string, ScriptedFixture> fixtures);

    // Loads <dir>/<role>.json for every JSON file in dir.
    static std::shared_ptr<MockProvider> from_directory(const std::filesystem::path& dir);

    void set_fixture(const std::string& role, ScriptedFixture fixture);

    CompletionResult complete(const ModelBinding& binding,
                              std::span<const ChatMessage> messages) override;
    std::shared_ptr<Provider> for_session() override;
    bool scripted_for(std::string_view agent_role) const override;

    std::vector<RecordedRequest> requests() const;

private:
    struct State {
        ScriptedFixture fixture;
        std::size_t next_index = 0;
        std::vector<bool> consumed;
    };

    std::string respond(State& state, std::span<const ChatMessage> messages);

    std::map<std::string, ScriptedFixture> templates_;
    std::map<std::string, State> states_;
    std::vector<RecordedRequest> requests_;
    mutable std::mutex mutex_;
};

} // namespace codeedu::llm
