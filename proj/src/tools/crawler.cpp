#include "codeedu/tools/crawler.hpp"

#include "codeedu/error.hpp"

#include <httplib.h>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace codeedu::tools {

namespace fs = std::filesystem;

std::string normalize_query(std::string_view query) {
    std::string out;
    bool pending_space = false;
    for (char c : query) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string query_key(std::string_view query) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (char c : normalize_query(query)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash;
    return os.str();
}

CrawlResult Crawler::crawl(const std::string& query, int max_results) const {
    require(!normalize_query(query).empty(), "crawl query must be non-empty");
    require(max_results > 0, "max_results must be positive");
    CrawlResult result = config_.live ? crawl_live(query, max_results) : crawl_offline(query);
    if (result.entries.size() > static_cast<std::size_t>(max_results))
        result.entries.resize(static_cast<std::size_t>(max_results));
    return result;
}

CrawlResult Crawler::crawl_offline(const std::string& query) const {
    CrawlResult result;
    fs::path file = config_.corpus_dir / (query_key(query) + ".json");
    std::ifstream in(file);
    if (!in) return result;
    try {
        auto doc = nlohmann::json::parse(in);
        // A hash collision with another query is treated as no fixture.
        if (normalize_query(doc.at("query").get<std::string>()) != normalize_query(query)) return result;
        result.entries = doc.at("results").get<std::vector<CrawlEntry>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "bad crawl fixture " + file.string() + ": " + e.what());
    }
    return result;
}

CrawlResult Crawler::crawl_live(const std::string& query, int max_results) const {
    if (config_.search_endpoint.empty())
        fail(ErrorKind::network_unavailable, "live crawling needs a search endpoint");
    const std::string& url = config_.search_endpoint;
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string host = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(20);
    httplib::Params params{{"q", query}, {"n", std::to_string(max_results)}};
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res || res->status != 200)
        fail(ErrorKind::network_unavailable,
             "search endpoint unavailable: " + (res ? "HTTP " + std::to_string(res->status)
                                                    : httplib::to_string(res.error())));
    CrawlResult result;
    try {
        result.entries = nlohmann::json::parse(res->body).at("results").get<std::vector<CrawlEntry>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::network_unavailable, std::string("unreadable search response: ") + e.what());
    }
    return result;
}

fs::path Crawler::write_fixture(const fs::path& corpus_dir, const std::string& query,
                                const CrawlResult& result) {
    fs::create_directories(corpus_dir);
    fs::path file = corpus_dir / (query_key(query) + ".json");
    nlohmann::json doc = {{"query", query}, {"results", result.entries}};
    std::ofstream(file) << doc.dump(2) << '\n';
    return file;
}

} // namespace codeedu::tools
