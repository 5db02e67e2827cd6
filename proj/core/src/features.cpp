#include "crowdrank/features.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"

namespace crowdrank {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "BM25",        "LM.Dir",      "IDF",         "Length",   "NumURLs",      "HasURLs",
    "NumHashtags", "HasHashtags", "NumMentions", "HasMentions", "isReply",   "NumStatuses",
    "NumFollowers", "Recency",    "TF",          "WV",       "WE",           "News",
};

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

Feature parse_feature(std::string_view name) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        if (kFeatureNames[i] == name) return static_cast<Feature>(i);
    }
    throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

std::vector<Feature> all_features() {
    std::vector<Feature> out;
    for (std::size_t i = 0; i < kNumFeatures; ++i) out.push_back(static_cast<Feature>(i));
    return out;
}

std::vector<Feature> non_temporal_features() {
    std::vector<Feature> out;
    for (std::size_t i = 0; i < kNumNonTemporal; ++i) out.push_back(static_cast<Feature>(i));
    return out;
}

Feature feature_for(SourceKind kind) {
    switch (kind) {
        case SourceKind::News: return Feature::News;
        case SourceKind::WikiViews: return Feature::WV;
        case SourceKind::WikiEdits: return Feature::WE;
        case SourceKind::TwitterFeedback: return Feature::TF;
    }
    throw InvalidArgument("unknown source kind");
}

FeatureVector count_features(const Document& doc) {
    FeatureVector v;
    double urls = 0, hashtags = 0, mentions = 0;
    for (auto tok : split_whitespace(doc.text)) {
        if (starts_with(tok, "http")) ++urls;
        if (tok.size() > 1 && tok.front() == '#') ++hashtags;
        if (tok.size() > 1 && tok.front() == '@') ++mentions;
    }
    v[Feature::Length] = static_cast<double>(doc.tokens.size());
    v[Feature::NumURLs] = urls;
    v[Feature::HasURLs] = urls > 0 ? 1.0 : 0.0;
    v[Feature::NumHashtags] = hashtags;
    v[Feature::HasHashtags] = hashtags > 0 ? 1.0 : 0.0;
    v[Feature::NumMentions] = mentions;
    v[Feature::HasMentions] = mentions > 0 ? 1.0 : 0.0;
    v[Feature::IsReply] = !doc.text.empty() && doc.text.front() == '@' ? 1.0 : 0.0;
    return v;
}

bool QueryFeatureSet::has_relevant() const {
    return std::any_of(rows.begin(), rows.end(), [](const FeatureRow& r) { return r.label > 0; });
}

const TemporalSignal* QuerySignals::get(SourceKind kind) const {
    switch (kind) {
        case SourceKind::News: return news;
        case SourceKind::WikiViews: return wiki_views;
        case SourceKind::WikiEdits: return wiki_edits;
        case SourceKind::TwitterFeedback: return twitter_feedback;
    }
    return nullptr;
}

QuerySignals QuerySignals::from(const SignalMap& signals, const std::string& query_id) {
    QuerySignals qs;
    qs.news = find_signal(signals, query_id, SourceKind::News);
    qs.wiki_views = find_signal(signals, query_id, SourceKind::WikiViews);
    qs.wiki_edits = find_signal(signals, query_id, SourceKind::WikiEdits);
    qs.twitter_feedback = find_signal(signals, query_id, SourceKind::TwitterFeedback);
    return qs;
}

TimeDomain query_domain(const Query& query, std::span<const Candidate> candidates,
                        const QuerySignals& signals) {
    Timestamp lo = query.query_time;
    for (const auto& c : candidates) lo = std::min(lo, c.doc->timestamp);
    for (auto kind : kAllSources) {
        if (const auto* s = signals.get(kind)) {
            for (const auto& p : s->points) lo = std::min(lo, p.t);
        }
    }
    TimeDomain d{to_days(lo), to_days(query.query_time)};
    d.lo = std::min(d.lo, d.hi - 1.0 / 24.0);
    return d;
}

void normalize_non_temporal(QueryFeatureSet& set) {
    for (std::size_t f = 0; f < kNumNonTemporal; ++f) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : set.rows) {
            lo = std::min(lo, r.raw.values[f]);
            hi = std::max(hi, r.raw.values[f]);
        }
        for (auto& r : set.rows) {
            r.normalized.values[f] = hi > lo ? (r.raw.values[f] - lo) / (hi - lo) : 0.0;
        }
    }
}

void apply_disabled_sources(QueryFeatureSet& set, const SourceSet& disabled) {
    for (auto kind : disabled) {
        const Feature f = feature_for(kind);
        for (auto& r : set.rows) {
            r.raw[f] = 0.0;
            r.normalized[f] = 0.0;
        }
    }
}

QueryFeatureSet assemble_features(const Query& query, std::span<const Candidate> candidates,
                                  const QuerySignals& signals, const CollectionStats& stats,
                                  const FeatureConfig& cfg) {
    QueryFeatureSet set;
    set.query_id = query.query_id;
    if (candidates.empty()) return set;

    std::vector<Timestamp> times;
    times.reserve(candidates.size());
    for (const auto& c : candidates) times.push_back(c.doc->timestamp);

    const TimeDomain domain = query_domain(query, candidates, signals);
    std::map<SourceKind, std::vector<double>> temporal;
    for (auto kind : kAllSources) {
        const TemporalSignal* s = cfg.disabled.contains(kind) ? nullptr : signals.get(kind);
        std::optional<DensityEstimate> est;
        if (s != nullptr && !s->empty()) {
            validate_signal(*s, query.query_time);
            est.emplace(build_density(*s, domain, cfg.correction));
        }
        temporal[kind] = temporal_features(est ? &*est : nullptr, times);
    }

    set.rows.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Document& doc = *candidates[i].doc;
        FeatureRow row;
        row.doc_id = doc.doc_id;
        row.timestamp = doc.timestamp;
        row.raw = count_features(doc);
        row.raw[Feature::BM25] = bm25_score(query, doc, stats, cfg.bm25);
        row.raw[Feature::LMDir] = lm_dirichlet_score(query, doc, stats, cfg.dirichlet);
        row.raw[Feature::IDF] = idf_sum(query, doc, stats);
        row.raw[Feature::NumStatuses] = static_cast<double>(doc.num_statuses);
        row.raw[Feature::NumFollowers] = static_cast<double>(doc.num_followers);
        row.raw[Feature::Recency] = recency_prior(cfg.recency, query.query_time, doc.timestamp);
        for (auto kind : kAllSources) row.raw[feature_for(kind)] = temporal[kind][i];

        row.normalized = row.raw;
        row.normalized[Feature::Recency] = row.raw[Feature::Recency] / cfg.recency.lambda;
        set.rows.push_back(std::move(row));
    }
    normalize_non_temporal(set);
    return set;
}

void write_feature_csv(std::ostream& out, std::span<const QueryFeatureSet> sets) {
    out << "query_id,doc_id,label";
    for (auto name : kFeatureNames) out << ',' << name;
    out << '\n';
    for (const auto& set : sets) {
        for (const auto& r : set.rows) {
            out << set.query_id << ',' << r.doc_id << ',' << r.label;
            for (double v : r.normalized.values) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

std::vector<QueryFeatureSet> parse_feature_csv(std::istream& in, const std::string& source) {
    std::vector<QueryFeatureSet> sets;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty()) continue;
        auto f = split(t, ',');
        if (!header_seen) {
            if (f.size() != 3 + kNumFeatures || f[0] != "query_id" || f[1] != "doc_id" || f[2] != "label") {
                throw ParseError(source, lineno, "bad feature header");
            }
            for (std::size_t i = 0; i < kNumFeatures; ++i) {
                if (f[3 + i] != kFeatureNames[i]) {
                    throw ParseError(source, lineno, "feature column " + std::to_string(i) + " must be " +
                                                         std::string(kFeatureNames[i]));
                }
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 3 + kNumFeatures) throw ParseError(source, lineno, "wrong number of fields");
        try {
            std::string qid(f[0]);
            auto [it, inserted] = index.emplace(qid, sets.size());
            if (inserted) {
                sets.push_back({qid, {}});
            } else if (it->second != sets.size() - 1) {
                throw InvalidArgument("rows for query " + qid + " are not contiguous");
            }
            FeatureRow row;
            row.doc_id = std::string(f[1]);
            row.label = static_cast<int>(parse_int(f[2]));
            for (std::size_t i = 0; i < kNumFeatures; ++i) row.normalized.values[i] = parse_double(f[3 + i]);
            row.raw = row.normalized;
            sets[it->second].rows.push_back(std::move(row));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!header_seen) throw ParseError(source, lineno, "missing feature header");
    return sets;
}

std::vector<QueryFeatureSet> read_feature_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_feature_csv(in, path.string());
}

}  // namespace crowdrank
