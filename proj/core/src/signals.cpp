#include "crowdrank/signals.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"

namespace crowdrank {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_header(std::string_view line, std::string_view first_field) {
    return trim(line).substr(0, first_field.size()) == first_field;
}

bool parse_bool(std::string_view s) {
    auto v = to_lower(trim(s));
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw InvalidArgument("not a boolean: '" + v + "'");
}

std::string unescape_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == 'n') {
            out.push_back('\n');
            ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace

std::string_view source_name(SourceKind kind) {
    switch (kind) {
        case SourceKind::News: return "news";
        case SourceKind::WikiViews: return "wiki_views";
        case SourceKind::WikiEdits: return "wiki_edits";
        case SourceKind::TwitterFeedback: return "twitter_feedback";
    }
    return "unknown";
}

SourceKind parse_source(std::string_view name) {
    for (auto kind : kAllSources) {
        if (source_name(kind) == name) return kind;
    }
    throw InvalidArgument("unknown source '" + std::string(name) + "'");
}

void validate_signal(const TemporalSignal& signal, Timestamp query_time) {
    bool positive = signal.points.empty();
    for (const auto& p : signal.points) {
        if (!(p.w >= 0.0) || !std::isfinite(p.w)) {
            throw InvalidArgument("negative or non-finite weight in " +
                                  std::string(source_name(signal.source)) + " signal");
        }
        if (p.t > query_time) {
            throw InvalidArgument("future evidence in " + std::string(source_name(signal.source)) +
                                  " signal for query " + signal.query_id);
        }
        positive = positive || p.w > 0.0;
    }
    if (!positive) throw InvalidArgument("signal has no positive weight");
}

// ---------------------------------------------------------------------------
// News

TemporalSignal extract_news_signal(const Query& query, std::span<const NewsHeadline> headlines,
                                   double min_jaccard) {
    if (min_jaccard < 0.0 || min_jaccard > 1.0) throw InvalidArgument("min_jaccard must be in [0,1]");
    TemporalSignal signal{SourceKind::News, query.query_id, {}};
    const TermSet qterms = term_set(tokenize(query.text));
    for (const auto& h : headlines) {
        if (h.timestamp > query.query_time) continue;
        const double j = jaccard(qterms, h.title_tokens);
        // A zero-overlap headline carries no evidence even with min_jaccard = 0.
        if (j > 0.0 && j >= min_jaccard) signal.points.push_back({h.timestamp, j});
    }
    return signal;
}

SiteOffsets parse_site_offsets(std::istream& in, const std::string& source) {
    SiteOffsets offsets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || (lineno == 1 && is_header(line, "site"))) continue;
        auto f = split(line, ',');
        if (f.size() != 2) throw ParseError(source, lineno, "expected site,offset_hours");
        try {
            offsets[std::string(trim(f[0]))] =
                static_cast<Timestamp>(std::llround(parse_double(f[1]) * 3600.0));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return offsets;
}

std::vector<NewsHeadline> parse_news(std::istream& in, const SiteOffsets& offsets,
                                     const std::string& source) {
    std::vector<NewsHeadline> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || (lineno == 1 && is_header(line, "site,"))) continue;
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError(source, lineno, "expected site,timestamp,title");
        NewsHeadline h;
        h.site = std::string(trim(std::string_view(line).substr(0, c1)));
        try {
            h.timestamp = parse_int(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
        if (auto it = offsets.find(h.site); it != offsets.end()) h.timestamp -= it->second;
        h.title_tokens = term_set(tokenize(std::string_view(line).substr(c2 + 1)));
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<NewsHeadline> read_news(const std::filesystem::path& path, const SiteOffsets& offsets) {
    auto in = open_input(path);
    return parse_news(in, offsets, path.string());
}

// ---------------------------------------------------------------------------
// Wikipedia

std::optional<std::string> select_wikipedia_article(const Query& query,
                                                    std::span<const std::string> candidate_titles) {
    const TermSet qterms = term_set(tokenize(query.text));
    std::optional<std::string> best;
    double best_j = 0.0;
    const std::size_t limit = std::min<std::size_t>(candidate_titles.size(), 10);
    for (std::size_t i = 0; i < limit; ++i) {
        const double j = jaccard(qterms, term_set(tokenize(candidate_titles[i])));
        if (j > best_j) {
            best_j = j;
            best = candidate_titles[i];
        }
    }
    return best;
}

TemporalSignal extract_wiki_views_signal(const Query& query, const WikiArticleData& article) {
    TemporalSignal signal{SourceKind::WikiViews, query.query_id, {}};
    double total = 0.0;
    std::size_t days = 0;
    for (const auto& v : article.daily_views) {
        if (midnight(v.day) > query.query_time) continue;
        total += static_cast<double>(v.count);
        ++days;
    }
    if (days == 0 || total <= 0.0) return signal;
    const double mean = total / static_cast<double>(days);
    for (const auto& v : article.daily_views) {
        const Timestamp day = midnight(v.day);
        if (day > query.query_time) continue;
        signal.points.push_back({day, static_cast<double>(v.count) / mean});
    }
    return signal;
}

TemporalSignal extract_wiki_edits_signal(const Query& query, const WikiArticleData& article) {
    TemporalSignal signal{SourceKind::WikiEdits, query.query_id, {}};
    const TermSet title_terms = term_set(tokenize(article.title));
    TermSet counted;
    for (const auto& t : term_set(tokenize(query.text))) {
        if (!title_terms.contains(t)) counted.insert(t);
    }
    if (counted.empty()) return signal;
    for (const auto& rev : article.revisions) {
        if (rev.is_bot || rev.timestamp > query.query_time) continue;
        std::size_t tf = 0;
        for (const auto& tok : tokenize(rev.added_text)) tf += counted.contains(tok) ? 1 : 0;
        if (tf > 0) signal.points.push_back({rev.timestamp, static_cast<double>(tf)});
    }
    return signal;
}

std::string positive_line_diff(std::string_view previous, std::string_view current) {
    std::unordered_map<std::string_view, int> prior;
    for (auto line : split(previous, '\n')) ++prior[line];
    std::string added;
    for (auto line : split(current, '\n')) {
        auto it = prior.find(line);
        if (it != prior.end() && it->second > 0) {
            --it->second;
            continue;
        }
        if (trim(line).empty()) continue;
        if (!added.empty()) added.push_back('\n');
        added.append(line);
    }
    return added;
}

BotFilter::BotFilter(std::vector<std::string> known_bots) {
    for (auto& b : known_bots) known_.push_back(to_lower(trim(b)));
}

bool BotFilter::is_bot(std::string_view editor) const {
    const std::string name = to_lower(trim(editor));
    if (name.size() >= 3 && name.compare(name.size() - 3, 3, "bot") == 0) return true;
    return std::find(known_.begin(), known_.end(), name) != known_.end();
}

void WikiSnapshot::add_views(const std::string& title, DailyViews views) {
    auto& a = articles_[title];
    a.title = title;
    a.daily_views.push_back(views);
}

void WikiSnapshot::add_revision(const std::string& title, Revision revision) {
    auto& a = articles_[title];
    a.title = title;
    a.revisions.push_back(std::move(revision));
}

void WikiSnapshot::add_search_result(const std::string& query_id, const std::string& title) {
    search_[query_id].push_back(title);
}

void WikiSnapshot::finalize() {
    for (auto& [title, a] : articles_) {
        std::stable_sort(a.daily_views.begin(), a.daily_views.end(),
                         [](const DailyViews& x, const DailyViews& y) { return x.day < y.day; });
        for (std::size_t i = 1; i < a.daily_views.size(); ++i) {
            if (a.daily_views[i].day == a.daily_views[i - 1].day) {
                throw InvalidArgument("duplicate view day " + format_date(a.daily_views[i].day) +
                                      " for article " + title);
            }
        }
        std::stable_sort(a.revisions.begin(), a.revisions.end(),
                         [](const Revision& x, const Revision& y) { return x.timestamp < y.timestamp; });
    }
}

std::vector<std::string> WikiSnapshot::search(const std::string& query_id) const {
    auto it = search_.find(query_id);
    return it == search_.end() ? std::vector<std::string>{} : it->second;
}

WikiArticleData WikiSnapshot::article(const std::string& title) const {
    auto it = articles_.find(title);
    if (it == articles_.end()) return WikiArticleData{title, {}, {}};
    return it->second;
}

void WikiSnapshot::load_views(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || (lineno == 1 && is_header(line, "title,"))) continue;
        // Titles may contain commas; date and count are the last two fields.
        auto c2 = line.rfind(',');
        auto c1 = c2 == std::string::npos || c2 == 0 ? std::string::npos : line.rfind(',', c2 - 1);
        if (c1 == std::string::npos) throw ParseError(source, lineno, "expected title,date,count");
        try {
            DailyViews v;
            v.day = parse_date(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
            auto count = parse_int(std::string_view(line).substr(c2 + 1));
            if (count < 0) throw InvalidArgument("negative view count");
            v.count = static_cast<std::uint64_t>(count);
            add_views(std::string(trim(std::string_view(line).substr(0, c1))), v);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
}

void WikiSnapshot::load_revisions(std::istream& in, const BotFilter& bots, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || (lineno == 1 && is_header(line, "title,"))) continue;
        auto f = split(line, ',');
        if (f.size() < 5) throw ParseError(source, lineno, "expected title,timestamp,editor,is_bot,added_text");
        // added_text may itself contain commas: rejoin everything after field 4.
        std::size_t text_start = static_cast<std::size_t>(f[4].data() - line.data());
        try {
            Revision r;
            r.timestamp = parse_int(f[1]);
            r.editor = std::string(trim(f[2]));
            r.is_bot = parse_bool(f[3]) || bots.is_bot(r.editor);
            r.added_text = unescape_newlines(std::string_view(line).substr(text_start));
            add_revision(std::string(trim(f[0])), std::move(r));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
}

void WikiSnapshot::load_search(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split(line, '\t');
        if (f.size() != 2) throw ParseError(source, lineno, "expected query_id<TAB>title");
        add_search_result(std::string(trim(f[0])), std::string(trim(f[1])));
    }
}

Timestamp parse_date(std::string_view date) {
    using namespace std::chrono;
    date = trim(date);
    auto parts = split(date, '-');
    if (parts.size() != 3) throw InvalidArgument("bad date '" + std::string(date) + "'");
    const year_month_day ymd{year{static_cast<int>(parse_int(parts[0]))},
                             month{static_cast<unsigned>(parse_int(parts[1]))},
                             day{static_cast<unsigned>(parse_int(parts[2]))}};
    if (!ymd.ok()) throw InvalidArgument("bad date '" + std::string(date) + "'");
    return sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;
}

std::string format_date(Timestamp t) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{midnight(t) / kSecondsPerDay}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp midnight(Timestamp t) {
    Timestamp d = t / kSecondsPerDay;
    if (t % kSecondsPerDay < 0) --d;
    return d * kSecondsPerDay;
}

// ---------------------------------------------------------------------------
// Corpus feedback

TemporalSignal extract_twitter_feedback_signal(const Query& query,
                                               std::span<const Candidate> candidates) {
    TemporalSignal signal{SourceKind::TwitterFeedback, query.query_id, {}};
    if (candidates.empty()) return signal;
    double max_score = candidates.front().ql_log_score;
    for (const auto& c : candidates) max_score = std::max(max_score, c.ql_log_score);
    std::vector<double> p;
    p.reserve(candidates.size());
    double total = 0.0;
    for (const auto& c : candidates) {
        p.push_back(std::exp(c.ql_log_score - max_score));
        total += p.back();
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        signal.points.push_back({candidates[i].doc->timestamp, p[i] / total});
    }
    return signal;
}

// ---------------------------------------------------------------------------
// Signal CSV

SignalMap parse_signal_file(std::istream& in, const std::string& source) {
    SignalMap out;
    std::map<std::pair<std::string, SourceKind>, std::size_t> first_line;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty()) continue;
        if (!header_seen) {
            if (t != "query_id,source,timestamp,weight") {
                throw ParseError(source, lineno, "expected header query_id,source,timestamp,weight");
            }
            header_seen = true;
            continue;
        }
        auto f = split(t, ',');
        if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields");
        try {
            std::string qid(trim(f[0]));
            if (qid.empty()) throw InvalidArgument("empty query_id");
            SourceKind kind = parse_source(trim(f[1]));
            SignalPoint p{parse_int(f[2]), parse_double(f[3])};
            if (!(p.w >= 0.0)) throw InvalidArgument("weight must be >= 0");
            auto& sigs = out[qid];
            auto it = std::find_if(sigs.begin(), sigs.end(),
                                   [&](const TemporalSignal& s) { return s.source == kind; });
            if (it == sigs.end()) {
                sigs.push_back({kind, qid, {}});
                it = std::prev(sigs.end());
                first_line[{qid, kind}] = lineno;
            }
            it->points.push_back(p);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    for (auto& [qid, sigs] : out) {
        for (const auto& s : sigs) {
            bool positive = std::any_of(s.points.begin(), s.points.end(),
                                        [](const SignalPoint& p) { return p.w > 0.0; });
            if (!positive) {
                throw ParseError(source, first_line[{qid, s.source}],
                                 "signal " + std::string(source_name(s.source)) + " for " + qid +
                                     " has no positive weight");
            }
        }
        std::stable_sort(sigs.begin(), sigs.end(), [](const TemporalSignal& a, const TemporalSignal& b) {
            return static_cast<int>(a.source) < static_cast<int>(b.source);
        });
    }
    return out;
}

SignalMap load_signal_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_signal_file(in, path.string());
}

void write_signal_file(std::ostream& out, const SignalMap& signals) {
    out << "query_id,source,timestamp,weight\n";
    for (const auto& [qid, sigs] : signals) {
        for (const auto& s : sigs) {
            for (const auto& p : s.points) {
                out << qid << ',' << source_name(s.source) << ',' << p.t << ',' << format_double(p.w) << '\n';
            }
        }
    }
}

const TemporalSignal* find_signal(const SignalMap& signals, const std::string& query_id, SourceKind kind) {
    auto it = signals.find(query_id);
    if (it == signals.end()) return nullptr;
    for (const auto& s : it->second) {
        if (s.source == kind && !s.empty()) return &s;
    }
    return nullptr;
}

}  // namespace crowdrank
