#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdrank/corpus.hpp"
#include "crowdrank/density.hpp"
#include "crowdrank/signals.hpp"
#include "crowdrank/textscore.hpp"

namespace crowdrank {

/// Canonical feature order. The first 13 are non-temporal.
enum class Feature : std::size_t {
    BM25,
    LMDir,
    IDF,
    Length,
    NumURLs,
    HasURLs,
    NumHashtags,
    HasHashtags,
    NumMentions,
    HasMentions,
    IsReply,
    NumStatuses,
    NumFollowers,
    Recency,
    TF,
    WV,
    WE,
    News,
};

inline constexpr std::size_t kNumFeatures = 18;
inline constexpr std::size_t kNumNonTemporal = 13;

std::string_view feature_name(Feature f);
/// Throws InvalidArgument on an unknown name.
Feature parse_feature(std::string_view name);

inline constexpr bool is_temporal(Feature f) { return static_cast<std::size_t>(f) >= kNumNonTemporal; }

/// All 18 features in canonical order.
std::vector<Feature> all_features();
/// The 13 non-temporal features.
std::vector<Feature> non_temporal_features();

/// The density-backed feature for a signal source.
Feature feature_for(SourceKind kind);

/// Values indexed by Feature in canonical order.
struct FeatureVector {
    std::array<double, kNumFeatures> values{};

    double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Surface counts from raw text: URLs, hashtags, mentions, reply flag, length.
/// Only the count-derived entries are filled.
FeatureVector count_features(const Document& doc);

struct FeatureRow {
    std::string doc_id;
    Timestamp timestamp = 0;
    FeatureVector raw;
    FeatureVector normalized;
    int label = 0;  ///< graded relevance; > 0 means relevant
};

struct QueryFeatureSet {
    std::string query_id;
    std::vector<FeatureRow> rows;

    bool has_relevant() const;
};

using SourceSet = std::set<SourceKind>;

struct FeatureConfig {
    Bm25Config bm25;
    DirichletConfig dirichlet;
    RecencyConfig recency;
    BoundaryCorrection correction = BoundaryCorrection::Reflection;
    /// Sources treated as missing: their column is zero for every row.
    SourceSet disabled;
};

/// Per-source signals for one query; null entries are missing sources.
struct QuerySignals {
    const TemporalSignal* news = nullptr;
    const TemporalSignal* wiki_views = nullptr;
    const TemporalSignal* wiki_edits = nullptr;
    const TemporalSignal* twitter_feedback = nullptr;

    const TemporalSignal* get(SourceKind kind) const;
    static QuerySignals from(const SignalMap& signals, const std::string& query_id);
};

/// Density domain for a query: earliest candidate or signal time through
/// the query time, widened to at least one hour.
TimeDomain query_domain(const Query& query, std::span<const Candidate> candidates,
                        const QuerySignals& signals);

QueryFeatureSet assemble_features(const Query& query, std::span<const Candidate> candidates,
                                  const QuerySignals& signals, const CollectionStats& stats,
                                  const FeatureConfig& cfg = {});

/// Min-max scaling of the non-temporal columns to [0,1]; constant columns map to 0.
void normalize_non_temporal(QueryFeatureSet& set);

/// Zero out the column of every disabled source in both raw and normalized values.
void apply_disabled_sources(QueryFeatureSet& set, const SourceSet& disabled);

/// CSV with header `query_id,doc_id,label,<18 feature names>`; values are
/// the normalized features the ranker consumes.
void write_feature_csv(std::ostream& out, std::span<const QueryFeatureSet> sets);
std::vector<QueryFeatureSet> parse_feature_csv(std::istream& in, const std::string& source = "<features>");
std::vector<QueryFeatureSet> read_feature_csv(const std::filesystem::path& path);

}  // namespace crowdrank
