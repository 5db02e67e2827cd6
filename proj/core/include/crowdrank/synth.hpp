#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crowdrank/corpus.hpp"
#include "crowdrank/eval.hpp"

namespace crowdrank {

/// Seeded synthetic test collection. Each query gets a cluster of relevant
/// posts around a hidden event time, an off-peak cluster of lexically
/// similar non-relevant posts, uniform background posts, and external
/// snapshots (news, page views, edits) whose peaks line up with the event.
/// A fraction of queries is atemporal: no matching news and no relevance
/// cluster.
struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t num_queries = 200;
    std::size_t candidates_per_query = 500;
    double temporal_fraction = 0.7;
    std::size_t relevant_per_query = 40;
    std::size_t noise_docs = 5000;  ///< posts matching no query
};

struct SynthFiles {
    std::filesystem::path corpus;           // corpus.jsonl
    std::filesystem::path queries;          // queries.tsv (all)
    std::filesystem::path train_queries;    // train_queries.tsv
    std::filesystem::path test_queries;     // test_queries.tsv
    std::filesystem::path qrels;            // qrels.txt
    std::filesystem::path news;             // news.csv
    std::filesystem::path news_tz;          // news_tz.csv
    std::filesystem::path wiki_views;       // wiki_views.csv
    std::filesystem::path wiki_revisions;   // wiki_revisions.csv
    std::filesystem::path wiki_search;      // wiki_search.tsv
    std::filesystem::path bots;             // bots.txt

    static SynthFiles in(const std::filesystem::path& dir);
};

struct SynthSummary {
    std::size_t documents = 0;
    std::size_t queries = 0;
    std::size_t temporal_queries = 0;
};

/// Generates the collection into `dir` (created if needed). Output is a
/// pure function of the config.
SynthSummary generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace crowdrank
