#pragma once

#include "codeedu/tools/types.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace codeedu::tools {

struct CrawlerConfig {
    // One JSON file per query: <corpus_dir>/<query_key(query)>.json holding
    // {query, results: [{url, title, snippet, text}]}.
    std::filesystem::path corpus_dir;
    bool live = false;
    // Live mode: GET <search_endpoint>?q=<query>&n=<max> answering
    // {results: [...]} in the corpus entry shape, already ranked.
    std::string search_endpoint;
};

// Lower-cased, whitespace-collapsed query.
std::string normalize_query(std::string_view query);
// 16 hex digits of FNV-1a 64 over the normalized query.
std::string query_key(std::string_view query);

class Crawler {
public:
    explicit Crawler(CrawlerConfig config) : config_(std::move(config)) {}

    CrawlResult crawl(const std::string& query, int max_results) const;

    // Writes a corpus file for the query; used to build fixture corpora.
    static std::filesystem::path write_fixture(const std::filesystem::path& corpus_dir,
                                               const std::string& query,
                                               const CrawlResult& result);

private:
    CrawlResult crawl_offline(const std::string& query) const;
    CrawlResult crawl_live(const std::string& query, int max_results) const;

    CrawlerConfig config_;
};

} // namespace codeedu::tools
