#include "crowdrank/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "crowdrank/corpus.hpp"
#include "crowdrank/density.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/eval.hpp"
#include "crowdrank/features.hpp"
#include "crowdrank/fileio.hpp"
#include "crowdrank/ltr.hpp"
#include "crowdrank/signals.hpp"
#include "crowdrank/synth.hpp"

namespace crowdrank {

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingFile = 3;
constexpr int kExitBadInput = 4;

struct ScoringOptions {
    std::size_t depth = kDefaultCandidateDepth;
    double mu = kDefaultDirichletMu;
    double k1 = 1.2;
    double b = 0.75;
    double lambda = 0.01;
    std::string time_unit = "days";
    bool no_correction = false;
    std::vector<std::string> disabled;

    void attach(CLI::App* app) {
        app->add_option("-k,--depth", depth, "Candidate pool depth per query")->check(CLI::PositiveNumber);
        app->add_option("--mu", mu, "Dirichlet prior")->check(CLI::PositiveNumber);
        app->add_option("--k1", k1, "BM25 k1")->check(CLI::PositiveNumber);
        app->add_option("--b", b, "BM25 b")->check(CLI::Range(0.0, 1.0));
        app->add_option("--lambda", lambda, "Recency decay rate")->check(CLI::PositiveNumber);
        app->add_option("--time-unit", time_unit, "Unit of the recency gap")
            ->check(CLI::IsMember({"days", "hours"}));
        app->add_flag("--no-correction", no_correction, "Disable boundary reflection in density estimates");
        add_disable(app);
    }

    void add_disable(CLI::App* app) {
        app->add_option("--disable-source", disabled,
                        "Treat sources as missing: news wiki_views wiki_edits twitter_feedback")
            ->check(CLI::IsMember({"news", "wiki_views", "wiki_edits", "twitter_feedback"}));
    }

    SourceSet disabled_sources() const {
        SourceSet s;
        for (const auto& name : disabled) s.insert(parse_source(name));
        return s;
    }

    FeatureConfig feature_config() const {
        FeatureConfig cfg;
        cfg.bm25 = {k1, b};
        cfg.dirichlet = {mu};
        cfg.recency = {lambda, time_unit == "hours" ? TimeUnit::Hours : TimeUnit::Days};
        cfg.correction = no_correction ? BoundaryCorrection::None : BoundaryCorrection::Reflection;
        cfg.disabled = disabled_sources();
        return cfg;
    }
};

struct LoadedCorpus {
    InvertedIndex index;
    std::size_t rejected = 0;
};

LoadedCorpus load_corpus(const fs::path& path) {
    auto docs = read_corpus(path);
    const std::size_t total = docs.size();
    std::erase_if(docs, [](const Document& d) { return !admit_document(d); });
    LoadedCorpus lc{build_index(std::move(docs)), 0};
    lc.rejected = total - lc.index.documents().size();
    return lc;
}

std::vector<std::string> read_lines(const fs::path& path) {
    auto in = open_input(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty() && t.front() != '#') lines.emplace_back(t);
    }
    return lines;
}

std::map<std::string, QueryClass> classify_all(const std::vector<QueryFeatureSet>& sets, const SignalMap* signals,
                                               const SourceSet& disabled) {
    std::map<std::string, QueryClass> classes;
    const bool news_off = disabled.contains(SourceKind::News);
    for (const auto& set : sets) {
        QueryClass c = QueryClass::Atemporal;
        if (!news_off) {
            if (signals != nullptr) {
                c = classify_query(Query{set.query_id, "", 0}, find_signal(*signals, set.query_id, SourceKind::News));
            } else {
                // A non-empty news signal always gives one candidate a News value of 1.
                bool any = std::any_of(set.rows.begin(), set.rows.end(),
                                       [](const FeatureRow& r) { return r.normalized[Feature::News] > 0.0; });
                c = any ? QueryClass::Temporal : QueryClass::Atemporal;
            }
        }
        classes[set.query_id] = c;
    }
    return classes;
}

// ---------------------------------------------------------------------------

int cmd_index(const fs::path& corpus, const fs::path& out_path, std::ostream& out) {
    auto lc = load_corpus(corpus);
    write_file_atomic(out_path, [&](std::ostream& o) { write_index(o, lc.index); });
    const auto& s = lc.index.stats();
    out << "indexed " << s.num_docs << " documents (" << lc.rejected << " filtered), " << s.doc_freq.size()
        << " terms, avg length " << format_double(s.avg_doc_length) << '\n';
    return 0;
}

struct ExtractOptions {
    fs::path corpus, queries, out;
    fs::path news, news_tz, wiki_views, wiki_revisions, wiki_search, bots;
    double min_jaccard = kDefaultMinJaccard;
};

int cmd_signals_extract(const ExtractOptions& opt, const ScoringOptions& scoring, std::ostream& out) {
    const auto disabled = scoring.disabled_sources();
    auto lc = load_corpus(opt.corpus);
    const auto queries = read_queries(opt.queries);

    std::vector<NewsHeadline> headlines;
    if (!opt.news.empty()) {
        SiteOffsets offsets;
        if (!opt.news_tz.empty()) {
            auto in = open_input(opt.news_tz);
            offsets = parse_site_offsets(in, opt.news_tz.string());
        }
        headlines = read_news(opt.news, offsets);
    }

    WikiSnapshot wiki;
    const bool have_wiki = !opt.wiki_search.empty();
    if (have_wiki) {
        BotFilter bots(opt.bots.empty() ? std::vector<std::string>{} : read_lines(opt.bots));
        {
            auto in = open_input(opt.wiki_search);
            wiki.load_search(in, opt.wiki_search.string());
        }
        if (!opt.wiki_views.empty()) {
            auto in = open_input(opt.wiki_views);
            wiki.load_views(in, opt.wiki_views.string());
        }
        if (!opt.wiki_revisions.empty()) {
            auto in = open_input(opt.wiki_revisions);
            wiki.load_revisions(in, bots, opt.wiki_revisions.string());
        }
        wiki.finalize();
    }

    SignalMap signals;
    std::map<SourceKind, std::size_t> counts;
    for (const auto& q : queries) {
        std::vector<TemporalSignal> found;
        auto keep = [&](TemporalSignal s) {
            if (s.empty() || disabled.contains(s.source)) return;
            validate_signal(s, q.query_time);
            ++counts[s.source];
            found.push_back(std::move(s));
        };
        if (!opt.news.empty()) keep(extract_news_signal(q, headlines, opt.min_jaccard));
        if (have_wiki) {
            const auto titles = wiki.search(q.query_id);
            if (auto title = select_wikipedia_article(q, titles)) {
                const auto article = wiki.article(*title);
                keep(extract_wiki_views_signal(q, article));
                keep(extract_wiki_edits_signal(q, article));
            }
        }
        const auto candidates = retrieve_candidates(q, lc.index, scoring.depth, scoring.mu);
        keep(extract_twitter_feedback_signal(q, candidates));
        if (!found.empty()) signals[q.query_id] = std::move(found);
    }
    write_file_atomic(opt.out, [&](std::ostream& o) { write_signal_file(o, signals); });
    out << "signals for " << queries.size() << " queries:";
    for (auto kind : kAllSources) out << ' ' << source_name(kind) << '=' << counts[kind];
    out << '\n';
    return 0;
}

int cmd_signals_dump(const fs::path& corpus, const fs::path& queries_path, const fs::path& signals_path,
                     const fs::path& out_dir, std::size_t nodes, const ScoringOptions& scoring, std::ostream& out) {
    auto lc = load_corpus(corpus);
    const auto queries = read_queries(queries_path);
    const auto signals = load_signal_file(signals_path);
    const auto disabled = scoring.disabled_sources();
    const auto correction = scoring.no_correction ? BoundaryCorrection::None : BoundaryCorrection::Reflection;
    fs::create_directories(out_dir);
    std::size_t written = 0;
    for (const auto& q : queries) {
        const auto candidates = retrieve_candidates(q, lc.index, scoring.depth, scoring.mu);
        const auto qs = QuerySignals::from(signals, q.query_id);
        const TimeDomain domain = query_domain(q, candidates, qs);
        for (auto kind : kAllSources) {
            const TemporalSignal* s = qs.get(kind);
            if (s == nullptr || disabled.contains(kind)) continue;
            const auto est = build_density(*s, domain, correction);
            const std::string stem = q.query_id + "." + std::string(source_name(kind));
            write_file_atomic(out_dir / (stem + ".density.csv"), [&](std::ostream& o) {
                o << "t,density\n";
                for (std::size_t i = 0; i < nodes; ++i) {
                    const double frac = nodes == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(nodes - 1);
                    const double t = domain.lo + frac * (domain.hi - domain.lo);
                    o << format_double(t * kSecondsPerDay) << ',' << format_double(est(t)) << '\n';
                }
            });
            std::map<Timestamp, double> per_day;
            for (const auto& p : s->points) per_day[midnight(p.t)] += p.w;
            write_file_atomic(out_dir / (stem + ".hist.csv"), [&](std::ostream& o) {
                o << "day,weight\n";
                for (const auto& [day, w] : per_day) o << format_date(day) << ',' << format_double(w) << '\n';
            });
            ++written;
        }
    }
    out << "wrote " << written << " density curves to " << out_dir.string() << '\n';
    return 0;
}

int cmd_features(const fs::path& corpus, const fs::path& queries_path, const fs::path& signals_path,
                 const fs::path& qrels_path, const fs::path& out_path, const ScoringOptions& scoring,
                 std::ostream& out) {
    auto lc = load_corpus(corpus);
    const auto queries = read_queries(queries_path);
    const SignalMap signals = signals_path.empty() ? SignalMap{} : load_signal_file(signals_path);
    const std::optional<Qrels> qrels =
        qrels_path.empty() ? std::nullopt : std::optional<Qrels>(read_qrels(qrels_path));
    const auto cfg = scoring.feature_config();

    std::vector<QueryFeatureSet> sets;
    std::size_t rows = 0;
    for (const auto& q : queries) {
        const auto candidates = retrieve_candidates(q, lc.index, scoring.depth, scoring.mu);
        auto set = assemble_features(q, candidates, QuerySignals::from(signals, q.query_id), lc.index.stats(), cfg);
        if (qrels) {
            for (auto& r : set.rows) r.label = qrels->grade(q.query_id, r.doc_id);
        }
        rows += set.rows.size();
        if (!set.rows.empty()) sets.push_back(std::move(set));
    }
    write_file_atomic(out_path, [&](std::ostream& o) { write_feature_csv(o, sets); });
    out << "features for " << sets.size() << " queries, " << rows << " rows\n";
    return 0;
}

int cmd_train(const fs::path& features_path, const fs::path& signals_path, const fs::path& out_dir,
              const TrainConfig& cfg, const std::vector<std::string>& which, const SourceSet& disabled,
              std::ostream& out) {
    auto sets = read_feature_csv(features_path);
    for (auto& s : sets) apply_disabled_sources(s, disabled);
    std::optional<SignalMap> signals;
    if (!signals_path.empty()) signals = load_signal_file(signals_path);
    const auto classes = classify_all(sets, signals ? &*signals : nullptr, disabled);

    fs::create_directories(out_dir);
    auto wanted = [&](const std::string& name) {
        return which.empty() || std::find(which.begin(), which.end(), name) != which.end();
    };
    auto save = [&](const std::string& name, const LinearModel& m) {
        write_file_atomic(out_dir / (name + ".model"), [&](std::ostream& o) { write_model(o, m); });
        out << name << ": training MAP " << format_double(m.training_map) << ", validation MAP "
            << format_double(m.validation_map) << ", restart " << m.restart << '\n';
    };
    if (wanted("rmts")) save("rmts", train(sets, all_features(), cfg).model);
    if (wanted("ltr")) save("ltr", train(sets, non_temporal_features(), cfg).model);
    if (wanted("temporal") || wanted("atemporal")) {
        std::size_t temporal = 0;
        for (const auto& [_, c] : classes) temporal += c == QueryClass::Temporal ? 1 : 0;
        out << "routing: " << temporal << " temporal, " << classes.size() - temporal << " atemporal queries\n";
        const auto pair = train_model_pair(sets, classes, cfg);
        if (wanted("temporal")) save("temporal", pair.temporal_model);
        if (wanted("atemporal")) save("atemporal", pair.atemporal_model);
    }
    return 0;
}

int cmd_rank(const fs::path& features_path, const fs::path& model_path, const fs::path& temporal_path,
             const fs::path& atemporal_path, const fs::path& signals_path, const std::string& tag,
             const fs::path& out_path, const SourceSet& disabled, std::ostream& out) {
    auto sets = read_feature_csv(features_path);
    for (auto& s : sets) apply_disabled_sources(s, disabled);
    Run run;
    if (!model_path.empty()) {
        const auto model = read_model(model_path);
        for (const auto& s : sets) run[s.query_id] = rank(model, s);
    } else {
        if (temporal_path.empty() || atemporal_path.empty()) {
            throw InvalidArgument("rank needs --model, or both --temporal-model and --atemporal-model");
        }
        ModelPair pair{read_model(temporal_path), read_model(atemporal_path)};
        std::optional<SignalMap> signals;
        if (!signals_path.empty()) signals = load_signal_file(signals_path);
        const auto classes = classify_all(sets, signals ? &*signals : nullptr, disabled);
        std::size_t temporal = 0;
        for (const auto& s : sets) {
            const auto c = classes.at(s.query_id);
            temporal += c == QueryClass::Temporal ? 1 : 0;
            run[s.query_id] = rank(pair, s, c);
        }
        out << "routing: " << temporal << " temporal, " << sets.size() - temporal << " atemporal queries\n";
    }
    for (auto& [_, docs] : run) {
        if (docs.size() > kMapDepth) docs.resize(kMapDepth);
    }
    write_file_atomic(out_path, [&](std::ostream& o) { write_run(o, run, tag); });
    out << "ranked " << run.size() << " queries\n";
    return 0;
}

int cmd_eval(const fs::path& run_path, const fs::path& qrels_path, bool per_query, std::ostream& out) {
    const auto parsed = read_run(run_path);
    const auto qrels = read_qrels(qrels_path);
    const auto m = evaluate_run(parsed.run, qrels);
    if (per_query) {
        for (const auto& [qid, ap] : m.ap) {
            out << "map\t" << qid << '\t' << format_double(ap) << '\n';
            out << "P_30\t" << qid << '\t' << format_double(m.p30.at(qid)) << '\n';
        }
    }
    out << "num_q\tall\t" << m.ap.size() << '\n';
    out << "map\tall\t" << format_double(m.map) << '\n';
    out << "P_30\tall\t" << format_double(m.mean_p30) << '\n';
    return 0;
}

int cmd_compare(const fs::path& run_a, const fs::path& run_b, const fs::path& qrels_path,
                const std::string& metric, std::ostream& out) {
    const auto qrels = read_qrels(qrels_path);
    const auto ma = evaluate_run(read_run(run_a).run, qrels);
    const auto mb = evaluate_run(read_run(run_b).run, qrels);
    const auto& pa = metric == "p30" ? ma.p30 : ma.ap;
    const auto& pb = metric == "p30" ? mb.p30 : mb.ap;
    std::vector<double> a, b;
    for (const auto& [qid, v] : pa) {
        a.push_back(v);
        b.push_back(pb.at(qid));
    }
    const double mean_a = metric == "p30" ? ma.mean_p30 : ma.map;
    const double mean_b = metric == "p30" ? mb.mean_p30 : mb.map;
    out << "metric\t" << metric << '\n';
    out << "queries\t" << a.size() << '\n';
    out << "mean_a\t" << format_double(mean_a) << '\n';
    out << "mean_b\t" << format_double(mean_b) << '\n';
    try {
        const auto r = paired_t_test(a, b);
        out << "mean_diff\t" << format_double(r.mean_diff) << '\n';
        out << "variance\t" << format_double(r.variance) << '\n';
        out << "t\t" << format_double(r.t_stat) << '\n';
        out << "df\t" << format_double(r.df) << '\n';
        out << "p_two_sided\t" << format_double(r.p_two_sided) << '\n';
        out << "effect_size\t" << format_double(r.effect_size) << '\n';
        out << "ci95\t" << format_double(r.ci_low) << '\t' << format_double(r.ci_high) << '\n';
    } catch (const DegenerateInput&) {
        out << "result\tno difference\n";
    }
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"crowdrank: time-aware microblog ranking with temporal crowd signals", "crowdrank"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // index
    fs::path corpus, out_path, queries, signals_path, qrels_path;
    auto* index = app.add_subcommand("index", "Build the inverted index and write statistics and postings");
    index->add_option("--corpus", corpus, "Corpus snapshot (JSON lines)")->required()->check(CLI::ExistingFile);
    index->add_option("--out", out_path, "Index output file")->required();

    // signals
    auto* signals_cmd = app.add_subcommand("signals", "Temporal crowd signals");
    signals_cmd->require_subcommand(1);
    ExtractOptions extract;
    ScoringOptions extract_scoring;
    auto* extract_cmd = signals_cmd->add_subcommand("extract", "Mine per-query signals into a signal CSV");
    extract_cmd->add_option("--corpus", extract.corpus, "Corpus snapshot")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--queries", extract.queries, "Query file")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--out", extract.out, "Signal CSV output")->required();
    extract_cmd->add_option("--news", extract.news, "News headlines: site,timestamp,title")->check(CLI::ExistingFile);
    extract_cmd->add_option("--news-tz", extract.news_tz, "Per-site UTC offsets: site,offset_hours")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--wiki-search", extract.wiki_search, "Article search results: query_id<TAB>title")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--wiki-views", extract.wiki_views, "Daily page views: title,date,count")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--wiki-revisions", extract.wiki_revisions,
                            "Revisions: title,timestamp,editor,is_bot,added_text")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--bots", extract.bots, "Known bot editor names, one per line")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--min-jaccard", extract.min_jaccard, "Minimum headline/query Jaccard")
        ->check(CLI::Range(0.0, 1.0));
    extract_cmd->add_option("-k,--depth", extract_scoring.depth, "Feedback candidate depth")
        ->check(CLI::PositiveNumber);
    extract_cmd->add_option("--mu", extract_scoring.mu, "Dirichlet prior")->check(CLI::PositiveNumber);
    extract_scoring.add_disable(extract_cmd);

    fs::path dump_dir;
    std::size_t nodes = 512;
    ScoringOptions dump_scoring;
    auto* dump_cmd = signals_cmd->add_subcommand("dump", "Write density curves and daily histograms per query");
    dump_cmd->add_option("--corpus", corpus, "Corpus snapshot")->required()->check(CLI::ExistingFile);
    dump_cmd->add_option("--queries", queries, "Query file")->required()->check(CLI::ExistingFile);
    dump_cmd->add_option("--signals", signals_path, "Signal CSV")->required()->check(CLI::ExistingFile);
    dump_cmd->add_option("--out-dir", dump_dir, "Output directory")->required();
    dump_cmd->add_option("--nodes", nodes, "Sample points per curve")->check(CLI::Range(2, 1000000));
    dump_scoring.attach(dump_cmd);

    // features
    ScoringOptions feat_scoring;
    auto* features_cmd = app.add_subcommand("features", "Assemble the per-candidate feature CSV");
    features_cmd->add_option("--corpus", corpus, "Corpus snapshot")->required()->check(CLI::ExistingFile);
    features_cmd->add_option("--queries", queries, "Query file")->required()->check(CLI::ExistingFile);
    features_cmd->add_option("--signals", signals_path, "Signal CSV")->check(CLI::ExistingFile);
    features_cmd->add_option("--qrels", qrels_path, "Relevance judgments for the label column")
        ->check(CLI::ExistingFile);
    features_cmd->add_option("--out", out_path, "Feature CSV output")->required();
    feat_scoring.attach(features_cmd);

    // train
    fs::path features_path, model_dir;
    TrainConfig train_cfg;
    std::vector<std::string> which_models;
    ScoringOptions train_scoring;
    auto* train_cmd = app.add_subcommand("train", "Coordinate-ascent training of the linear models");
    train_cmd->add_option("--features", features_path, "Labelled feature CSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--signals", signals_path, "Signal CSV used for query routing")->check(CLI::ExistingFile);
    train_cmd->add_option("--out-dir", model_dir, "Directory for rmts/ltr/temporal/atemporal .model files")
        ->required();
    train_cmd->add_option("--models", which_models, "Subset of models to train")
        ->check(CLI::IsMember({"rmts", "ltr", "temporal", "atemporal"}));
    train_cmd->add_option("--restarts", train_cfg.restarts, "Random restarts")->check(CLI::PositiveNumber);
    train_cmd->add_option("--max-sweeps", train_cfg.max_sweeps, "Sweeps per restart")->check(CLI::PositiveNumber);
    train_cmd->add_option("--tolerance", train_cfg.tolerance, "Minimum MAP gain per sweep");
    train_cmd->add_option("--validation-fraction", train_cfg.validation_fraction, "Held-out query fraction")
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--seed", train_cfg.seed, "Random seed");
    train_scoring.add_disable(train_cmd);

    // rank
    fs::path model_path, temporal_path, atemporal_path;
    std::string tag = "rmts";
    ScoringOptions rank_scoring;
    auto* rank_cmd = app.add_subcommand("rank", "Score candidates and write a TREC run file");
    rank_cmd->add_option("--features", features_path, "Feature CSV")->required()->check(CLI::ExistingFile);
    auto* single = rank_cmd->add_option("--model", model_path, "Rank every query with one model")
                       ->check(CLI::ExistingFile);
    auto* tmodel = rank_cmd->add_option("--temporal-model", temporal_path, "Model for temporal queries")
                       ->check(CLI::ExistingFile);
    auto* amodel = rank_cmd->add_option("--atemporal-model", atemporal_path, "Model for atemporal queries")
                       ->check(CLI::ExistingFile);
    single->excludes(tmodel)->excludes(amodel);
    rank_cmd->add_option("--signals", signals_path, "Signal CSV used for query routing")->check(CLI::ExistingFile);
    rank_cmd->add_option("--tag", tag, "Run tag");
    rank_cmd->add_option("--out", out_path, "Run file output")->required();
    rank_scoring.add_disable(rank_cmd);

    // eval
    fs::path run_path;
    bool per_query = false;
    auto* eval_cmd = app.add_subcommand("eval", "MAP and P@30 of a run");
    eval_cmd->add_option("--run", run_path, "Run file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--qrels", qrels_path, "Relevance judgments")->required()->check(CLI::ExistingFile);
    eval_cmd->add_flag("-q,--per-query", per_query, "Also print per-query values");

    // compare
    fs::path run_a, run_b;
    std::string metric = "map";
    auto* compare_cmd = app.add_subcommand("compare", "Paired t-test between two runs");
    compare_cmd->add_option("run_a", run_a, "First run")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("run_b", run_b, "Second run")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--qrels", qrels_path, "Relevance judgments")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--metric", metric, "Per-query metric")->check(CLI::IsMember({"map", "p30"}));

    // synth
    SynthConfig synth_cfg;
    fs::path synth_dir;
    auto* synth_cmd = app.add_subcommand("synth", "Generate the seeded synthetic collection");
    synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->required();
    synth_cmd->add_option("--seed", synth_cfg.seed, "Random seed");
    synth_cmd->add_option("--queries", synth_cfg.num_queries, "Number of queries")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--candidates", synth_cfg.candidates_per_query, "Matching posts per query")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--relevant", synth_cfg.relevant_per_query, "Relevant posts per query")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--temporal-fraction", synth_cfg.temporal_fraction, "Share of temporal queries")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--noise-docs", synth_cfg.noise_docs, "Posts matching no query");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (index->parsed()) return cmd_index(corpus, out_path, out);
        if (extract_cmd->parsed()) return cmd_signals_extract(extract, extract_scoring, out);
        if (dump_cmd->parsed()) {
            return cmd_signals_dump(corpus, queries, signals_path, dump_dir, nodes, dump_scoring, out);
        }
        if (features_cmd->parsed()) {
            return cmd_features(corpus, queries, signals_path, qrels_path, out_path, feat_scoring, out);
        }
        if (train_cmd->parsed()) {
            return cmd_train(features_path, signals_path, model_dir, train_cfg, which_models,
                             train_scoring.disabled_sources(), out);
        }
        if (rank_cmd->parsed()) {
            return cmd_rank(features_path, model_path, temporal_path, atemporal_path, signals_path, tag, out_path,
                            rank_scoring.disabled_sources(), out);
        }
        if (eval_cmd->parsed()) return cmd_eval(run_path, qrels_path, per_query, out);
        if (compare_cmd->parsed()) return cmd_compare(run_a, run_b, qrels_path, metric, out);
        if (synth_cmd->parsed()) {
            const auto s = generate_synthetic(synth_cfg, synth_dir);
            out << "synthetic collection: " << s.documents << " documents, " << s.queries << " queries ("
                << s.temporal_queries << " temporal) in " << synth_dir.string() << '\n';
            return 0;
        }
    } catch (const ParseError& e) {
        err << "error: malformed input: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const InvalidArgument& e) {
        err << "error: invalid input: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const Error& e) {
        const std::string what = e.what();
        err << "error: " << what << '\n';
        return what.rfind("cannot open file", 0) == 0 ? kExitMissingFile : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    err << "error: no command given\n";
    return kExitFailure;
}

}  // namespace crowdrank
