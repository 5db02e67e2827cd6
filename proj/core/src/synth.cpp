#include "crowdrank/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>

#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"
#include "crowdrank/signals.hpp"
#include "random.hpp"

namespace crowdrank {

namespace {

using detail::Rng;

constexpr Timestamp kCorpusStart = 1359676800;  // 2013-02-01T00:00:00Z
constexpr Timestamp kViewsStart = 1354320000;   // 2012-12-01T00:00:00Z
constexpr Timestamp kHour = 3600;
constexpr std::size_t kFillerVocabulary = 3000;

struct Site {
    const char* name;
    double offset_hours;
};
constexpr Site kSites[] = {{"reuters", 0.0}, {"ap", -5.0}, {"usatoday", -5.0}, {"bbc", 0.0}};

const std::vector<std::string> kKnownBots = {"MiszaBot III", "Citation helper"};

class WordFactory {
public:
    explicit WordFactory(Rng& rng) : rng_(rng) {}

    std::string fresh() {
        static constexpr char kConsonants[] = "bdfgklmnprstvz";
        static constexpr char kVowels[] = "aeiou";
        while (true) {
            std::string w;
            const auto syllables = rng_.between(2, 4);
            for (long long s = 0; s < syllables; ++s) {
                w.push_back(kConsonants[rng_.index(sizeof kConsonants - 1)]);
                w.push_back(kVowels[rng_.index(sizeof kVowels - 1)]);
            }
            if (used_.insert(w).second) return w;
        }
    }

private:
    Rng& rng_;
    std::set<std::string> used_;
};

std::string capitalize(std::string w) {
    if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
}

struct TopicPlan {
    std::string query_id;
    std::vector<std::string> terms;  // 3 topic words
    Timestamp query_time = 0;
    bool temporal = false;
    Timestamp event = 0;       // centre of the relevant period
    Timestamp confounder = 0;  // centre of the off-peak lexical cluster
    std::string article;
};

struct DocDraft {
    Timestamp t = 0;
    std::string text;
    std::uint64_t statuses = 0;
    std::uint64_t followers = 0;
    bool is_retweet = false;
    std::string language = "en";
    std::string query_id;  // empty for noise
    int grade = -1;        // -1: unjudged
};

class Generator {
public:
    explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed), words_(rng_) {
        for (std::size_t i = 0; i < kFillerVocabulary; ++i) filler_.push_back(words_.fresh());
    }

    void run() {
        plan_topics();
        for (const auto& topic : topics_) {
            make_posts(topic);
            make_news(topic);
            make_wiki(topic);
        }
        make_noise();
    }

    void write(const std::filesystem::path& dir, SynthSummary& summary) {
        auto files = SynthFiles::in(dir);

        std::stable_sort(drafts_.begin(), drafts_.end(),
                         [](const DocDraft& a, const DocDraft& b) { return a.t < b.t; });
        std::vector<Document> docs;
        Qrels qrels;
        docs.reserve(drafts_.size());
        for (std::size_t i = 0; i < drafts_.size(); ++i) {
            const auto& d = drafts_[i];
            char id[32];
            std::snprintf(id, sizeof id, "t%08zu", i + 1);
            docs.push_back(make_document(id, d.t, d.text, d.statuses, d.followers, d.is_retweet, d.language));
            if (d.grade >= 0) qrels.set(d.query_id, id, d.grade);
        }
        summary.documents = docs.size();
        summary.queries = topics_.size();
        summary.temporal_queries = static_cast<std::size_t>(
            std::count_if(topics_.begin(), topics_.end(), [](const TopicPlan& t) { return t.temporal; }));

        std::vector<Query> all, train, test;
        for (std::size_t i = 0; i < topics_.size(); ++i) {
            const auto& t = topics_[i];
            Query q{t.query_id, t.terms[0] + " " + t.terms[1] + " " + t.terms[2], t.query_time};
            all.push_back(q);
            (i % 2 == 0 ? train : test).push_back(q);
        }

        write_file_atomic(files.corpus, [&](std::ostream& o) { write_corpus(o, docs); });
        write_file_atomic(files.queries, [&](std::ostream& o) { write_queries(o, all); });
        write_file_atomic(files.train_queries, [&](std::ostream& o) { write_queries(o, train); });
        write_file_atomic(files.test_queries, [&](std::ostream& o) { write_queries(o, test); });
        write_file_atomic(files.qrels, [&](std::ostream& o) { write_qrels(o, qrels); });
        write_file_atomic(files.news, [&](std::ostream& o) {
            o << "site,timestamp,title\n";
            for (const auto& line : news_) o << line << '\n';
        });
        write_file_atomic(files.news_tz, [&](std::ostream& o) {
            o << "site,offset_hours\n";
            for (const auto& s : kSites) o << s.name << ',' << format_double(s.offset_hours) << '\n';
        });
        write_file_atomic(files.wiki_views, [&](std::ostream& o) {
            o << "title,date,count\n";
            for (const auto& line : views_) o << line << '\n';
        });
        write_file_atomic(files.wiki_revisions, [&](std::ostream& o) {
            o << "title,timestamp,editor,is_bot,added_text\n";
            for (const auto& line : revisions_) o << line << '\n';
        });
        write_file_atomic(files.wiki_search, [&](std::ostream& o) {
            for (const auto& line : search_) o << line << '\n';
        });
        write_file_atomic(files.bots, [&](std::ostream& o) {
            for (const auto& b : kKnownBots) o << b << '\n';
        });
    }

private:
    std::string filler_word() {
        // Skewed towards the head of the vocabulary.
        const double u = rng_.uniform();
        return filler_[static_cast<std::size_t>(u * u * static_cast<double>(filler_.size()))];
    }

    Timestamp clamp_time(double t, Timestamp lo, Timestamp hi) {
        return std::clamp(static_cast<Timestamp>(std::llround(t)), lo, hi);
    }

    Timestamp around(Timestamp centre, double sd_days, Timestamp lo, Timestamp hi) {
        return clamp_time(rng_.normal(static_cast<double>(centre), sd_days * kSecondsPerDay), lo, hi);
    }

    Timestamp uniform_time(Timestamp lo, Timestamp hi) {
        return static_cast<Timestamp>(rng_.between(lo, hi));
    }

    void plan_topics() {
        for (std::size_t i = 0; i < cfg_.num_queries; ++i) {
            TopicPlan t;
            char id[16];
            std::snprintf(id, sizeof id, "SQ%03zu", i + 1);
            t.query_id = id;
            for (int k = 0; k < 3; ++k) t.terms.push_back(words_.fresh());
            t.query_time = kCorpusStart + static_cast<Timestamp>(rng_.uniform(35.0, 59.0) * kSecondsPerDay);
            t.temporal = rng_.chance(cfg_.temporal_fraction);
            const Timestamp lo = kCorpusStart + 3 * kSecondsPerDay;
            const Timestamp hi = t.query_time - 36 * kHour;
            t.event = uniform_time(lo, hi);
            do {
                t.confounder = uniform_time(kCorpusStart + kSecondsPerDay, t.query_time - 12 * kHour);
            } while (std::llabs(t.confounder - t.event) < 7 * kSecondsPerDay);
            t.article = capitalize(t.terms[0]) + " " + capitalize(t.terms[1]);
            topics_.push_back(std::move(t));
        }
    }

    std::string post_text(const TopicPlan& topic, int query_terms, double url_p) {
        std::vector<std::string> parts;
        std::vector<std::size_t> order = {0, 1, 2};
        rng_.shuffle(order.begin(), order.end());
        for (int k = 0; k < query_terms; ++k) parts.push_back(topic.terms[order[static_cast<std::size_t>(k)]]);
        const auto fillers = rng_.between(4, 10);
        for (long long k = 0; k < fillers; ++k) parts.push_back(filler_word());
        rng_.shuffle(parts.begin(), parts.end());
        if (rng_.chance(0.25)) parts.push_back("#" + topic.terms[order[0]]);
        if (rng_.chance(0.2)) parts.insert(parts.begin() + 1, "@user" + std::to_string(rng_.between(1, 9999)));
        if (rng_.chance(url_p)) parts.push_back("http://t.co/" + filler_word() + std::to_string(rng_.between(10, 99)));
        std::string text;
        for (const auto& p : parts) {
            if (!text.empty()) text.push_back(' ');
            text += p;
        }
        if (rng_.chance(0.08)) text = "@user" + std::to_string(rng_.between(1, 9999)) + " " + text;
        return text;
    }

    int pick_terms(std::initializer_list<double> weights) {
        double u = rng_.uniform();
        int k = 1;
        for (double w : weights) {
            if (u < w) return k;
            u -= w;
            ++k;
        }
        return k - 1;
    }

    void add_post(const TopicPlan& topic, Timestamp t, int terms, double url_p, double follower_log_mean,
                  int grade) {
        DocDraft d;
        d.t = t;
        d.text = post_text(topic, terms, url_p);
        d.followers = static_cast<std::uint64_t>(std::exp(rng_.normal(follower_log_mean, 1.0)));
        d.statuses = static_cast<std::uint64_t>(std::exp(rng_.normal(7.0, 1.2)));
        d.query_id = topic.query_id;
        d.grade = grade;
        drafts_.push_back(std::move(d));
    }

    void make_posts(const TopicPlan& topic) {
        const Timestamp lo = kCorpusStart;
        const Timestamp hi = topic.query_time - kHour;
        const std::size_t relevant = cfg_.relevant_per_query;
        const std::size_t confounders = cfg_.candidates_per_query * 6 / 25;
        const std::size_t background =
            cfg_.candidates_per_query > relevant + confounders ? cfg_.candidates_per_query - relevant - confounders : 0;

        for (std::size_t i = 0; i < relevant; ++i) {
            const bool clustered = topic.temporal && rng_.chance(0.85);
            const Timestamp t = clustered ? around(topic.event, 0.7, lo, hi) : uniform_time(lo, hi);
            add_post(topic, t, pick_terms({0.35, 0.4, 0.25}), 0.55, 6.0, rng_.chance(0.3) ? 2 : 1);
        }
        for (std::size_t i = 0; i < confounders; ++i) {
            add_post(topic, around(topic.confounder, 0.7, lo, hi), pick_terms({0.0, 0.6, 0.4}), 0.35, 5.5, 0);
        }
        for (std::size_t i = 0; i < background; ++i) {
            const int grade = rng_.chance(0.04) ? 1 : (rng_.chance(0.2) ? 0 : -1);
            add_post(topic, uniform_time(lo, hi), pick_terms({0.5, 0.4, 0.1}), 0.35, 5.5, grade);
        }
        // Posts after the query time must never be retrieved.
        for (int i = 0; i < 20; ++i) {
            add_post(topic, topic.query_time + uniform_time(kHour, 5 * kSecondsPerDay), pick_terms({0.2, 0.4, 0.4}),
                     0.5, 6.0, 0);
        }
        // Retweets and foreign-language posts, all filtered at ingestion.
        for (int i = 0; i < 10; ++i) {
            DocDraft d;
            d.t = around(topic.event, 0.7, lo, hi);
            d.text = "RT @user" + std::to_string(rng_.between(1, 999)) + ": " + post_text(topic, 3, 0.5);
            d.query_id = topic.query_id;
            d.grade = 0;
            drafts_.push_back(std::move(d));
        }
        for (int i = 0; i < 5; ++i) {
            DocDraft d;
            d.t = around(topic.event, 0.7, lo, hi);
            d.text = post_text(topic, 3, 0.5);
            d.is_retweet = true;
            d.query_id = topic.query_id;
            d.grade = 0;
            drafts_.push_back(std::move(d));
        }
        for (int i = 0; i < 8; ++i) {
            DocDraft d;
            d.t = around(topic.event, 0.7, lo, hi);
            d.text = post_text(topic, 2, 0.3);
            d.language = rng_.chance(0.5) ? "es" : "pt";
            d.query_id = topic.query_id;
            d.grade = 0;
            drafts_.push_back(std::move(d));
        }
    }

    void add_headline(Timestamp utc, const std::vector<std::string>& title_words) {
        const Site& site = kSites[rng_.index(std::size(kSites))];
        const Timestamp local = utc + static_cast<Timestamp>(site.offset_hours * 3600.0);
        std::string title;
        for (const auto& w : title_words) {
            if (!title.empty()) title.push_back(' ');
            title += capitalize(w);
        }
        news_.push_back(std::string(site.name) + "," + std::to_string(local) + "," + title);
    }

    void make_news(const TopicPlan& topic) {
        if (!topic.temporal) return;
        const auto count = rng_.between(4, 8);
        for (long long i = 0; i < count; ++i) {
            std::vector<std::string> words = {topic.terms[0], topic.terms[1]};
            if (rng_.chance(0.5)) words.push_back(topic.terms[2]);
            const auto extra = rng_.between(2, 4);
            for (long long k = 0; k < extra; ++k) words.push_back(filler_word());
            rng_.shuffle(words.begin(), words.end());
            add_headline(around(topic.event, 0.8, kCorpusStart, topic.query_time - kHour), words);
        }
        // A weak off-topic match and a headline from after the query time.
        std::vector<std::string> weak = {topic.terms[rng_.index(3)]};
        for (int k = 0; k < 6; ++k) weak.push_back(filler_word());
        add_headline(uniform_time(kCorpusStart, topic.query_time - kHour), weak);
        add_headline(topic.query_time + uniform_time(kHour, 3 * kSecondsPerDay),
                     {topic.terms[0], topic.terms[1], filler_word()});
    }

    void add_revision(const TopicPlan& topic, Timestamp t, const std::string& editor, bool is_bot,
                      const std::vector<std::string>& words) {
        std::string text;
        for (const auto& w : words) {
            if (!text.empty()) text.push_back(' ');
            text += w;
        }
        revisions_.push_back(topic.article + "," + std::to_string(t) + "," + editor + "," + (is_bot ? "1" : "0") +
                             "," + text);
    }

    std::vector<std::string> filler_words(int n) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back(filler_word());
        return out;
    }

    std::string editor() { return "Editor" + std::to_string(rng_.between(1, 500)); }

    void make_wiki(const TopicPlan& topic) {
        const std::string& qid = topic.query_id;
        search_.push_back(qid + "\t" + capitalize(topic.terms[0]) + " (film)");
        search_.push_back(qid + "\t" + topic.article);
        search_.push_back(qid + "\t" + capitalize(topic.terms[1]) + " " + capitalize(filler_word()) + " " +
                          capitalize(filler_word()));
        search_.push_back(qid + "\t" + capitalize(filler_word()) + " " + capitalize(filler_word()));

        const double amplitude = rng_.uniform(1500.0, 6000.0);
        const Timestamp last_day = midnight(topic.query_time);
        for (Timestamp day = kViewsStart; day <= last_day; day += kSecondsPerDay) {
            double count = 100.0 + rng_.uniform(0.0, 50.0);
            if (topic.temporal) {
                const double z = static_cast<double>(day - midnight(topic.event)) / (1.5 * kSecondsPerDay);
                count += amplitude * std::exp(-0.5 * z * z);
            }
            views_.push_back(topic.article + "," + format_date(day) + "," +
                             std::to_string(static_cast<long long>(std::llround(count))));
        }

        const Timestamp lo = kViewsStart;
        const Timestamp hi = topic.query_time - kHour;
        if (topic.temporal) {
            const auto good = rng_.between(6, 12);
            for (long long i = 0; i < good; ++i) {
                auto words = filler_words(static_cast<int>(rng_.between(3, 8)));
                words.push_back(topic.terms[2]);
                if (rng_.chance(0.5)) words.push_back(topic.terms[2]);
                if (rng_.chance(0.5)) words.push_back(topic.terms[0]);
                add_revision(topic, around(topic.event, 1.0, lo, hi), editor(), false, words);
            }
            for (int i = 0; i < 3; ++i) {
                auto words = filler_words(4);
                words.push_back(topic.terms[0]);
                words.push_back(topic.terms[1]);
                add_revision(topic, around(topic.confounder, 1.0, lo, hi), editor(), false, words);
            }
            for (int i = 0; i < 3; ++i) {
                auto words = filler_words(4);
                words.push_back(topic.terms[2]);
                const std::string bot = i == 0 ? kKnownBots[0] : "ArchiverBot";
                add_revision(topic, around(topic.confounder, 1.0, lo, hi), bot, i == 2, words);
            }
        } else {
            for (int i = 0; i < 8; ++i) {
                auto words = filler_words(5);
                words.push_back(topic.terms[2]);
                add_revision(topic, uniform_time(lo, hi), editor(), false, words);
            }
        }
        for (int i = 0; i < 12; ++i) add_revision(topic, uniform_time(lo, hi), editor(), false, filler_words(6));
        auto late = filler_words(3);
        late.push_back(topic.terms[2]);
        add_revision(topic, topic.query_time + uniform_time(kHour, 2 * kSecondsPerDay), editor(), false, late);
    }

    void make_noise() {
        for (std::size_t i = 0; i < cfg_.noise_docs; ++i) {
            DocDraft d;
            d.t = uniform_time(kCorpusStart, kCorpusStart + 59 * kSecondsPerDay);
            auto words = filler_words(static_cast<int>(rng_.between(5, 12)));
            for (const auto& w : words) {
                if (!d.text.empty()) d.text.push_back(' ');
                d.text += w;
            }
            d.followers = static_cast<std::uint64_t>(std::exp(rng_.normal(5.5, 1.0)));
            d.statuses = static_cast<std::uint64_t>(std::exp(rng_.normal(7.0, 1.2)));
            drafts_.push_back(std::move(d));
        }
        for (int i = 0; i < 2000; ++i) {
            add_headline(uniform_time(kCorpusStart, kCorpusStart + 59 * kSecondsPerDay), filler_words(6));
        }
    }

    SynthConfig cfg_;
    Rng rng_;
    WordFactory words_;
    std::vector<std::string> filler_;
    std::vector<TopicPlan> topics_;
    std::vector<DocDraft> drafts_;
    std::vector<std::string> news_;
    std::vector<std::string> views_;
    std::vector<std::string> revisions_;
    std::vector<std::string> search_;
};

}  // namespace

SynthFiles SynthFiles::in(const std::filesystem::path& dir) {
    SynthFiles f;
    f.corpus = dir / "corpus.jsonl";
    f.queries = dir / "queries.tsv";
    f.train_queries = dir / "train_queries.tsv";
    f.test_queries = dir / "test_queries.tsv";
    f.qrels = dir / "qrels.txt";
    f.news = dir / "news.csv";
    f.news_tz = dir / "news_tz.csv";
    f.wiki_views = dir / "wiki_views.csv";
    f.wiki_revisions = dir / "wiki_revisions.csv";
    f.wiki_search = dir / "wiki_search.tsv";
    f.bots = dir / "bots.txt";
    return f;
}

SynthSummary generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& dir) {
    if (cfg.num_queries == 0) throw InvalidArgument("synthetic collection needs at least one query");
    if (cfg.candidates_per_query < cfg.relevant_per_query) {
        throw InvalidArgument("candidates per query must be at least the relevant count");
    }
    std::filesystem::create_directories(dir);
    Generator gen(cfg);
    gen.run();
    SynthSummary summary;
    gen.write(dir, summary);
    return summary;
}

}  // namespace crowdrank
