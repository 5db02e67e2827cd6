#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crowdrank {

/// Seconds since the Unix epoch (UTC).
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

/// A timestamped short post with author metadata.
struct Document {
    std::string doc_id;
    Timestamp timestamp = 0;
    std::string text;
    std::uint64_t num_statuses = 0;
    std::uint64_t num_followers = 0;
    bool is_retweet = false;
    std::string language = "en";
    /// Always tokenize(text); filled by make_document / the corpus reader.
    std::vector<std::string> tokens;
};

/// Builds a document and derives its token list.
Document make_document(std::string doc_id, Timestamp timestamp, std::string text,
                       std::uint64_t num_statuses = 0, std::uint64_t num_followers = 0,
                       bool is_retweet = false, std::string language = "en");

struct Query {
    std::string query_id;
    std::string text;
    Timestamp query_time = 0;
};

/// Lowercase, split on runs of non-alphanumeric bytes, drop empties.
std::vector<std::string> tokenize(std::string_view text);

/// Retweet and language filter applied at ingestion time.
bool admit_document(const Document& doc);

struct CollectionStats {
    std::size_t num_docs = 0;
    double avg_doc_length = 0.0;
    std::unordered_map<std::string, std::uint64_t> doc_freq;
    std::unordered_map<std::string, std::uint64_t> collection_freq;
    std::uint64_t total_terms = 0;
    Timestamp latest_timestamp = 0;

    std::uint64_t df(const std::string& term) const;
    std::uint64_t cf(const std::string& term) const;
};

struct Posting {
    std::uint32_t doc;  ///< index into InvertedIndex::documents()
    std::uint32_t tf;
};

/// Immutable after construction; safe to share across threads.
class InvertedIndex {
public:
    InvertedIndex() = default;

    const std::vector<Document>& documents() const noexcept { return docs_; }
    const CollectionStats& stats() const noexcept { return stats_; }
    bool empty() const noexcept { return docs_.empty(); }

    /// Postings for a term, ordered by document position. Empty if unseen.
    std::span<const Posting> postings(const std::string& term) const;

    /// Sorted vocabulary (deterministic iteration order for persistence).
    std::vector<std::string> vocabulary() const;

    const Document* find(const std::string& doc_id) const;

private:
    friend InvertedIndex build_index(std::vector<Document> docs);

    std::vector<Document> docs_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::size_t> by_id_;
    CollectionStats stats_;
};

/// Throws InvalidArgument naming the id on a duplicate doc_id.
InvertedIndex build_index(std::vector<Document> docs);

struct Candidate {
    const Document* doc = nullptr;
    double ql_log_score = 0.0;
};

inline constexpr std::size_t kDefaultCandidateDepth = 1000;
inline constexpr double kDefaultDirichletMu = 2500.0;

/// Dirichlet query-likelihood retrieval over documents published no later
/// than the query time and matching at least one query term. Sorted by
/// (score desc, doc_id desc), truncated to k.
std::vector<Candidate> retrieve_candidates(const Query& query, const InvertedIndex& index,
                                           std::size_t k = kDefaultCandidateDepth,
                                           double mu = kDefaultDirichletMu);

/// Order used for every ranked list: score descending, then doc_id descending.
inline bool ranks_before(double score_a, const std::string& id_a, double score_b,
                         const std::string& id_b) {
    if (score_a != score_b) return score_a > score_b;
    return id_a > id_b;
}

// Corpus snapshot: one JSON object per line with fields doc_id, timestamp,
// text, num_statuses, num_followers, is_retweet, language.
std::vector<Document> read_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus(std::istream& in, const std::string& source = "<corpus>");
void write_corpus(std::ostream& out, std::span<const Document> docs);

// Query file: `query_id<TAB>query_time<TAB>text` per line; '#' lines ignored.
std::vector<Query> read_queries(const std::filesystem::path& path);
std::vector<Query> parse_queries(std::istream& in, const std::string& source = "<queries>");
void write_queries(std::ostream& out, std::span<const Query> queries);

// Index dump: collection statistics followed by postings, sorted by term.
void write_index(std::ostream& out, const InvertedIndex& index);

struct IndexSummary {
    CollectionStats stats;
    std::unordered_map<std::string, std::vector<std::pair<std::string, std::uint32_t>>> postings;
};
IndexSummary parse_index(std::istream& in, const std::string& source = "<index>");

}  // namespace crowdrank
