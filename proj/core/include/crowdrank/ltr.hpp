#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crowdrank/eval.hpp"
#include "crowdrank/features.hpp"
#include "crowdrank/signals.hpp"

namespace crowdrank {

/// Linear ranking function over a subset of the canonical features.
struct LinearModel {
    std::vector<Feature> features;
    std::vector<double> weights;  ///< parallel to features
    double training_map = 0.0;
    double validation_map = 0.0;
    int restart = -1;  ///< -1 for hand-built models

    static LinearModel uniform(std::vector<Feature> features);
    double weight(Feature f) const;
    void set_weight(Feature f, double w);
    bool uses_temporal_features() const;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

double score(const LinearModel& model, const FeatureVector& x);

/// Features by name; throws InvalidArgument naming the first feature the
/// model needs but `x` lacks.
double score(const LinearModel& model, const std::map<std::string, double>& x);

struct TrainConfig {
    int restarts = 10;
    int max_sweeps = 25;
    std::vector<double> step_set = {0.05, 0.1, 0.2, 0.5, 1.0};
    double tolerance = 1e-4;
    double validation_fraction = 0.2;
    std::uint64_t seed = 42;
};

struct TrainResult {
    LinearModel model;
    /// Training MAP after the initial weights and after every accepted move, per restart.
    std::vector<std::vector<double>> traces;
    std::vector<double> validation_maps;  ///< final validation MAP per restart
    std::vector<std::string> train_queries;
    std::vector<std::string> validation_queries;
};

/// Coordinate ascent on training MAP with random restarts; the restart with
/// the best validation MAP wins. Needs at least two queries with a relevant row.
TrainResult train(std::span<const QueryFeatureSet> data, const std::vector<Feature>& features,
                  const TrainConfig& cfg = {});

/// MAP of a model over labelled feature sets, skipping queries without a
/// relevant row. AP denominators count relevant rows.
double training_map(const LinearModel& model, std::span<const QueryFeatureSet> data);

enum class QueryClass { Temporal, Atemporal };

std::string_view query_class_name(QueryClass c);

/// Temporal iff the filtered news signal is non-empty.
QueryClass classify_query(const Query& query, const TemporalSignal* news_signal);

struct ModelPair {
    LinearModel temporal_model;   ///< all 18 features
    LinearModel atemporal_model;  ///< the 13 non-temporal features
};

/// Scores every row and sorts by (score desc, doc_id desc).
std::vector<RankedDoc> rank(const LinearModel& model, const QueryFeatureSet& set);
std::vector<RankedDoc> rank(const ModelPair& pair, const QueryFeatureSet& set, QueryClass classification);

/// Temporal model on temporal queries, atemporal model on atemporal ones;
/// a class with fewer than two usable queries falls back to all queries.
ModelPair train_model_pair(std::span<const QueryFeatureSet> data,
                           const std::map<std::string, QueryClass>& classes, const TrainConfig& cfg = {});

void write_model(std::ostream& out, const LinearModel& model);
LinearModel parse_model(std::istream& in, const std::string& source = "<model>");
LinearModel read_model(const std::filesystem::path& path);

}  // namespace crowdrank
