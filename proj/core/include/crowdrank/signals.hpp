#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdrank/corpus.hpp"
#include "crowdrank/textscore.hpp"

namespace crowdrank {

enum class SourceKind { News, WikiViews, WikiEdits, TwitterFeedback };

inline constexpr std::array<SourceKind, 4> kAllSources = {
    SourceKind::News, SourceKind::WikiViews, SourceKind::WikiEdits, SourceKind::TwitterFeedback};

/// File/CLI spelling: news, wiki_views, wiki_edits, twitter_feedback.
std::string_view source_name(SourceKind kind);
/// Throws InvalidArgument on an unknown name.
SourceKind parse_source(std::string_view name);

struct SignalPoint {
    Timestamp t = 0;
    double w = 0.0;

    friend bool operator==(const SignalPoint&, const SignalPoint&) = default;
};

/// Unified crowd signal: (timestamp, weight) pairs mined from one source.
struct TemporalSignal {
    SourceKind source = SourceKind::News;
    std::string query_id;
    std::vector<SignalPoint> points;

    bool empty() const noexcept { return points.empty(); }
    friend bool operator==(const TemporalSignal&, const TemporalSignal&) = default;
};

/// Throws InvalidArgument unless weights are non-negative, at least one is
/// positive, and no point lies after `query_time`.
void validate_signal(const TemporalSignal& signal, Timestamp query_time);

// ---------------------------------------------------------------------------
// News

struct NewsHeadline {
    std::string site;
    Timestamp timestamp = 0;  ///< UTC, after the site offset is applied
    TermSet title_tokens;
};

inline constexpr double kDefaultMinJaccard = 0.1;

TemporalSignal extract_news_signal(const Query& query, std::span<const NewsHeadline> headlines,
                                   double min_jaccard = kDefaultMinJaccard);

/// Site name -> UTC offset in seconds (local = utc + offset).
using SiteOffsets = std::map<std::string, Timestamp>;

/// `site,timestamp,title` lines (optional header); the title is the rest of
/// the line. Timestamps are site-local and shifted to UTC using `offsets`.
std::vector<NewsHeadline> parse_news(std::istream& in, const SiteOffsets& offsets,
                                     const std::string& source = "<news>");
std::vector<NewsHeadline> read_news(const std::filesystem::path& path, const SiteOffsets& offsets);

/// `site,offset_hours` lines (optional header).
SiteOffsets parse_site_offsets(std::istream& in, const std::string& source = "<timezones>");

// ---------------------------------------------------------------------------
// Wikipedia

struct DailyViews {
    Timestamp day = 0;  ///< midnight UTC
    std::uint64_t count = 0;
};

struct Revision {
    Timestamp timestamp = 0;
    std::string editor;
    bool is_bot = false;
    std::string added_text;
};

struct WikiArticleData {
    std::string title;
    std::vector<DailyViews> daily_views;  ///< strictly increasing days
    std::vector<Revision> revisions;      ///< non-decreasing timestamps
};

/// Highest Jaccard(query, title) among at most the first 10 candidates;
/// earliest wins ties; nullopt if no candidate shares a term.
std::optional<std::string> select_wikipedia_article(const Query& query,
                                                    std::span<const std::string> candidate_titles);

TemporalSignal extract_wiki_views_signal(const Query& query, const WikiArticleData& article);

TemporalSignal extract_wiki_edits_signal(const Query& query, const WikiArticleData& article);

/// Text present in `current` but not in `previous`, by a line-level
/// multiset difference.
std::string positive_line_diff(std::string_view previous, std::string_view current);

/// Editor names on the list (case-insensitive) or ending in "bot".
class BotFilter {
public:
    BotFilter() = default;
    explicit BotFilter(std::vector<std::string> known_bots);
    bool is_bot(std::string_view editor) const;

private:
    std::vector<std::string> known_;  // lowercased
};

/// Snapshot of Wikipedia data. Files:
///   views:     `title,date,count` with date as YYYY-MM-DD
///   revisions: `title,timestamp,editor,is_bot,added_text` (added_text is
///              the rest of the line, with "\n" escapes for newlines)
///   search:    `query_id<TAB>title` in search-rank order
class WikiSnapshot {
public:
    void add_views(const std::string& title, DailyViews views);
    void add_revision(const std::string& title, Revision revision);
    void add_search_result(const std::string& query_id, const std::string& title);

    /// Sorts views/revisions; call once after loading.
    void finalize();

    std::vector<std::string> search(const std::string& query_id) const;
    /// Article data or an empty record for unknown titles.
    WikiArticleData article(const std::string& title) const;

    void load_views(std::istream& in, const std::string& source = "<wiki views>");
    void load_revisions(std::istream& in, const BotFilter& bots,
                        const std::string& source = "<wiki revisions>");
    void load_search(std::istream& in, const std::string& source = "<wiki search>");

private:
    std::map<std::string, WikiArticleData> articles_;
    std::map<std::string, std::vector<std::string>> search_;
};

/// Civil date "YYYY-MM-DD" to midnight UTC.
Timestamp parse_date(std::string_view date);
std::string format_date(Timestamp t);
/// Midnight UTC of the day containing t.
Timestamp midnight(Timestamp t);

// ---------------------------------------------------------------------------
// Corpus feedback

/// Weights proportional to the query likelihood exp(score), normalized to 1.
TemporalSignal extract_twitter_feedback_signal(const Query& query,
                                               std::span<const Candidate> candidates);

// ---------------------------------------------------------------------------
// Signal CSV: `query_id,source,timestamp,weight`

using SignalMap = std::map<std::string, std::vector<TemporalSignal>>;

SignalMap parse_signal_file(std::istream& in, const std::string& source = "<signals>");
SignalMap load_signal_file(const std::filesystem::path& path);
void write_signal_file(std::ostream& out, const SignalMap& signals);

/// Signal of a given kind for a query, or nullptr.
const TemporalSignal* find_signal(const SignalMap& signals, const std::string& query_id,
                                  SourceKind kind);

}  // namespace crowdrank
