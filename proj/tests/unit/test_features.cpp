#include <doctest.h>

#include <random>
#include <sstream>

#include "crowdrank/corpus.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/features.hpp"

using namespace crowdrank;

namespace {

constexpr Timestamp kQueryTime = 1'360'000'000;

struct Fixture {
    InvertedIndex index;
    Query query{"MB1", "barbara walters", kQueryTime};
    std::vector<Candidate> candidates;
    SignalMap signals;

    Fixture() {
        std::vector<Document> docs;
        std::mt19937 gen(4);
        std::uniform_int_distribution<int> age(0, 20 * 86400), followers(0, 5000);
        const char* texts[] = {"barbara walters news", "@bob barbara #tv http://x.co walters",
                               "walters", "barbara barbara talk", "other words entirely"};
        for (int i = 0; i < 40; ++i) {
            docs.push_back(make_document("d" + std::to_string(100 + i), kQueryTime - age(gen), texts[i % 5],
                                         static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(followers(gen))));
        }
        docs.push_back(make_document("now", kQueryTime, "barbara walters today"));
        index = build_index(docs);
        candidates = retrieve_candidates(query, index);
        auto& sigs = signals[query.query_id];
        sigs.push_back({SourceKind::News, query.query_id, {{kQueryTime - 3 * 86400, 0.8}, {kQueryTime - 86400, 1.0}}});
        sigs.push_back({SourceKind::WikiViews, query.query_id,
                        {{kQueryTime - 10 * 86400, 0.5}, {kQueryTime - 9 * 86400, 1.5}, {kQueryTime - 8 * 86400, 1.0}}});
        sigs.push_back({SourceKind::WikiEdits, query.query_id, {{kQueryTime - 5 * 86400, 2.0}}});
        sigs.push_back(extract_twitter_feedback_signal(query, candidates));
    }

    QueryFeatureSet assemble(const FeatureConfig& cfg = {}) const {
        return assemble_features(query, candidates, QuerySignals::from(signals, query.query_id), index.stats(),
                                 cfg);
    }
};

}  // namespace

TEST_CASE("feature catalogue") {
    CHECK(all_features().size() == kNumFeatures);
    CHECK(non_temporal_features().size() == kNumNonTemporal);
    for (auto f : all_features()) CHECK(parse_feature(feature_name(f)) == f);
    CHECK(feature_name(Feature::LMDir) == "LM.Dir");
    CHECK(feature_name(Feature::IsReply) == "isReply");
    CHECK(is_temporal(Feature::Recency));
    CHECK_FALSE(is_temporal(Feature::NumFollowers));
    CHECK(feature_for(SourceKind::News) == Feature::News);
    CHECK(feature_for(SourceKind::TwitterFeedback) == Feature::TF);
    CHECK_THROWS_AS(parse_feature("bm25"), InvalidArgument);
}

TEST_CASE("count_features") {
    auto a = count_features(make_document("d", 0, "hello world"));
    CHECK(a[Feature::NumURLs] == 0);
    CHECK(a[Feature::HasURLs] == 0);
    CHECK(a[Feature::Length] == 2);
    CHECK(a[Feature::IsReply] == 0);

    auto b = count_features(make_document("d", 0, "@bob hi #tag http://x.co"));
    CHECK(b[Feature::NumMentions] == 1);
    CHECK(b[Feature::HasMentions] == 1);
    CHECK(b[Feature::NumHashtags] == 1);
    CHECK(b[Feature::NumURLs] == 1);
    CHECK(b[Feature::HasURLs] == 1);
    CHECK(b[Feature::IsReply] == 1);

    auto c = count_features(make_document("d", 0, "#a #a"));
    CHECK(c[Feature::NumHashtags] == 2);
    CHECK(c[Feature::HasHashtags] == 1);
}

TEST_CASE("normalize_non_temporal is per-query min-max") {
    QueryFeatureSet set{"q", {}};
    for (double v : {2.0, 4.0, 6.0}) {
        FeatureRow r;
        r.doc_id = "d" + std::to_string(static_cast<int>(v));
        r.raw[Feature::NumFollowers] = v;
        r.raw[Feature::BM25] = 3.0;
        r.raw[Feature::News] = v / 6.0;
        r.normalized = r.raw;
        set.rows.push_back(r);
    }
    normalize_non_temporal(set);
    CHECK(set.rows[0].normalized[Feature::NumFollowers] == 0.0);
    CHECK(set.rows[1].normalized[Feature::NumFollowers] == 0.5);
    CHECK(set.rows[2].normalized[Feature::NumFollowers] == 1.0);
    for (const auto& r : set.rows) {
        CHECK(r.normalized[Feature::BM25] == 0.0);
        CHECK(r.normalized[Feature::News] == r.raw[Feature::News]);
    }
}

TEST_CASE("assemble_features") {
    Fixture fx;
    auto set = fx.assemble();
    REQUIRE(set.rows.size() == fx.candidates.size());
    for (const auto& r : set.rows) {
        for (auto f : all_features()) {
            CHECK(r.normalized[f] >= 0.0);
            CHECK(r.normalized[f] <= 1.0);
        }
        if (r.doc_id == "now") CHECK(r.normalized[Feature::Recency] == 1.0);
    }
    for (auto kind : kAllSources) {
        double peak = 0.0;
        for (const auto& r : set.rows) peak = std::max(peak, r.normalized[feature_for(kind)]);
        CHECK(peak == 1.0);
    }

    SUBCASE("deterministic") {
        auto again = fx.assemble();
        for (std::size_t i = 0; i < set.rows.size(); ++i) {
            CHECK(set.rows[i].raw == again.rows[i].raw);
            CHECK(set.rows[i].normalized == again.rows[i].normalized);
        }
    }
    SUBCASE("all sources missing") {
        auto none = assemble_features(fx.query, fx.candidates, QuerySignals{}, fx.index.stats());
        for (const auto& r : none.rows) {
            for (auto kind : kAllSources) CHECK(r.normalized[feature_for(kind)] == 0.0);
        }
    }
    SUBCASE("dropping a source changes only its column") {
        for (auto kind : kAllSources) {
            FeatureConfig cfg;
            cfg.disabled = {kind};
            auto dropped = fx.assemble(cfg);
            for (std::size_t i = 0; i < set.rows.size(); ++i) {
                for (auto f : all_features()) {
                    if (f == feature_for(kind)) {
                        CHECK(dropped.rows[i].normalized[f] == 0.0);
                    } else {
                        CHECK(dropped.rows[i].normalized[f] == set.rows[i].normalized[f]);
                    }
                }
            }
            auto zeroed = set;
            apply_disabled_sources(zeroed, {kind});
            for (std::size_t i = 0; i < set.rows.size(); ++i) {
                CHECK(zeroed.rows[i].normalized == dropped.rows[i].normalized);
            }
        }
    }
    SUBCASE("future signal evidence is rejected") {
        auto sigs = fx.signals;
        sigs[fx.query.query_id][0].points.push_back({kQueryTime + 10, 1.0});
        CHECK_THROWS_AS(assemble_features(fx.query, fx.candidates, QuerySignals::from(sigs, fx.query.query_id),
                                          fx.index.stats()),
                        InvalidArgument);
    }
}

TEST_CASE("query_domain spans candidates and signals up to the query time") {
    Fixture fx;
    auto qs = QuerySignals::from(fx.signals, fx.query.query_id);
    auto d = query_domain(fx.query, fx.candidates, qs);
    CHECK(d.hi == to_days(kQueryTime));
    Timestamp earliest = kQueryTime;
    for (const auto& c : fx.candidates) earliest = std::min(earliest, c.doc->timestamp);
    CHECK(d.lo == to_days(earliest));
    auto tiny = query_domain(fx.query, {}, QuerySignals{});
    CHECK(tiny.hi - tiny.lo == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("feature CSV round-trip and errors") {
    Fixture fx;
    auto set = fx.assemble();
    set.rows[0].label = 2;
    auto other = set;
    other.query_id = "MB2";
    std::vector<QueryFeatureSet> sets{set, other};
    std::ostringstream out;
    write_feature_csv(out, sets);
    std::istringstream in(out.str());
    auto back = parse_feature_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].query_id == "MB2");
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
        CHECK(back[0].rows[i].doc_id == set.rows[i].doc_id);
        CHECK(back[0].rows[i].label == set.rows[i].label);
        CHECK(back[0].rows[i].normalized == set.rows[i].normalized);
    }
    CHECK(back[0].has_relevant());
    CHECK_FALSE(back[1].rows.empty());

    std::istringstream bad_header("query_id,doc_id,label,BM25\n");
    CHECK_THROWS_AS(parse_feature_csv(bad_header), ParseError);
    std::string text = out.str();
    text.insert(text.find('\n') + 1, "MB1,dx,0,abc\n");
    std::istringstream bad_value(text);
    try {
        parse_feature_csv(bad_value, "f.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}
