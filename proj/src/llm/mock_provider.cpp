#include "codeedu/llm/mock_provider.hpp"

#include "codeedu/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace codeedu::llm {

namespace {

int word_count(std::string_view text) {
    int n = 0;
    bool in_word = false;
    for (char c : text) {
        bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

} // namespace

ScriptedFixture ScriptedFixture::sequence(std::vector<std::string> responses) {
    ScriptedFixture f;
    for (auto& r : responses) f.entries.push_back({"", std::move(r), false});
    return f;
}

ScriptedFixture ScriptedFixture::from_json(const nlohmann::json& j) {
    ScriptedFixture f;
    auto mode = j.value("mode", std::string{"index"});
    if (mode == "index") {
        f.mode = Mode::index;
    } else if (mode == "substring") {
        f.mode = Mode::substring;
    } else {
        fail(ErrorKind::config, "fixture mode must be index or substring, got " + mode);
    }
    for (const auto& e : j.at("entries")) {
        Entry entry;
        if (e.is_string()) {
            entry.response = e.get<std::string>();
        } else {
            entry.match = e.value("match", std::string{});
            entry.response = e.at("response").get<std::string>();
            entry.repeat = e.value("repeat", false);
        }
        if (entry.response.empty()) fail(ErrorKind::config, "fixture response must be non-empty");
        if (f.mode == Mode::substring && entry.match.empty())
            fail(ErrorKind::config, "substring fixture entry needs a non-empty match");
        f.entries.push_back(std::move(entry));
    }
    if (j.contains("fallback") && !j["fallback"].is_null()) {
        f.fallback = j["fallback"].get<std::string>();
        if (f.fallback->empty()) fail(ErrorKind::config, "fixture fallback must be non-empty");
    }
    return f;
}

ScriptedFixture ScriptedFixture::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open fixture " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "bad fixture " + path.string() + ": " + e.what());
    }
}

MockProvider::MockProvider(ScriptedFixture fixture) {
    templates_.emplace(default_role, std::move(fixture));
}

MockProvider::MockProvider(std::map<std::string, ScriptedFixture> fixtures)
    : templates_(std::move(fixtures)) {}

std::shared_ptr<MockProvider> MockProvider::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        fail(ErrorKind::config, "fixture directory not found: " + dir.string());
    std::map<std::string, ScriptedFixture> fixtures;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        fixtures.emplace(entry.path().stem().string(), ScriptedFixture::load(entry.path()));
    }
    return std::make_shared<MockProvider>(std::move(fixtures));
}

void MockProvider::set_fixture(const std::string& role, ScriptedFixture fixture) {
    std::lock_guard lock(mutex_);
    states_.erase(role);
    templates_.insert_or_assign(role, std::move(fixture));
}

bool MockProvider::scripted_for(std::string_view agent_role) const {
    std::lock_guard lock(mutex_);
    return templates_.count(std::string(agent_role)) > 0;
}

std::shared_ptr<Provider> MockProvider::for_session() {
    std::lock_guard lock(mutex_);
    return std::make_shared<MockProvider>(templates_);
}

std::vector<RecordedRequest> MockProvider::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

CompletionResult MockProvider::complete(const ModelBinding& binding,
                                        std::span<const ChatMessage> messages) {
    std::lock_guard lock(mutex_);
    requests_.push_back({binding, {messages.begin(), messages.end()}});

    std::string key = binding.agent_role;
    if (!templates_.count(key)) key = default_role;
    auto tmpl = templates_.find(key);
    if (tmpl == templates_.end())
        fail(ErrorKind::fixture_exhausted, "no fixture scripted for role '" + binding.agent_role + "'");

    auto [it, inserted] = states_.try_emplace(key);
    if (inserted) {
        it->second.fixture = tmpl->second;
        it->second.consumed.assign(tmpl->second.entries.size(), false);
    }

    CompletionResult result;
    result.text = respond(it->second, messages);
    result.finish_reason = FinishReason::stop;
    for (const auto& m : messages) result.usage.prompt_tokens += word_count(m.content);
    result.usage.completion_tokens = word_count(result.text);
    return result;
}

std::string MockProvider::respond(State& state, std::span<const ChatMessage> messages) {
    const auto& entries = state.fixture.entries;
    if (state.fixture.mode == ScriptedFixture::Mode::index) {
        if (state.next_index >= entries.size())
            fail(ErrorKind::fixture_exhausted,
                 "fixture exhausted after " + std::to_string(entries.size()) + " responses");
        return entries[state.next_index++].response;
    }

    const std::string& request = messages.back().content;
    std::optional<std::size_t> hit;
    std::set<std::string> matched;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (state.consumed[i]) continue;
        if (request.find(entries[i].match) == std::string::npos) continue;
        matched.insert(entries[i].match);
        if (!hit) hit = i;
    }
    if (matched.size() > 1) {
        std::ostringstream os;
        for (const auto& m : matched) os << " '" << m << "'";
        fail(ErrorKind::fixture_ambiguous, "request matches several fixture entries:" + os.str());
    }
    if (hit) {
        if (!entries[*hit].repeat) state.consumed[*hit] = true;
        return entries[*hit].response;
    }
    if (state.fixture.fallback) return *state.fixture.fallback;
    fail(ErrorKind::fixture_exhausted, "no fixture entry matches the request");
}

} // namespace codeedu::llm
