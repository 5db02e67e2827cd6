#include "crowdrank/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "crowdrank/corpus.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"
#include "random.hpp"

namespace crowdrank {

// ---------------------------------------------------------------------------
// LinearModel

LinearModel LinearModel::uniform(std::vector<Feature> features) {
    LinearModel m;
    m.weights.assign(features.size(), features.empty() ? 0.0 : 1.0 / static_cast<double>(features.size()));
    m.features = std::move(features);
    return m;
}

double LinearModel::weight(Feature f) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == f) return weights[i];
    }
    return 0.0;
}

void LinearModel::set_weight(Feature f, double w) {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == f) {
            weights[i] = w;
            return;
        }
    }
    throw InvalidArgument("model has no feature " + std::string(feature_name(f)));
}

bool LinearModel::uses_temporal_features() const {
    return std::any_of(features.begin(), features.end(), is_temporal);
}

double score(const LinearModel& model, const FeatureVector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.features.size(); ++i) s += model.weights[i] * x[model.features[i]];
    return s;
}

double score(const LinearModel& model, const std::map<std::string, double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.features.size(); ++i) {
        auto it = x.find(std::string(feature_name(model.features[i])));
        if (it == x.end()) throw InvalidArgument("missing feature " + std::string(feature_name(model.features[i])));
        s += model.weights[i] * it->second;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Coordinate ascent

namespace {

// Dense per-query view of the training data used by the MAP objective.
struct PreparedQuery {
    std::string query_id;
    std::size_t rows = 0;
    std::vector<double> x;           // rows * dims, row-major
    std::vector<std::uint32_t> key;  // tie-break rank: 0 = largest doc_id
    std::vector<bool> relevant;
    std::size_t num_relevant = 0;
};

class MapObjective {
public:
    MapObjective(std::span<const QueryFeatureSet> data, const std::vector<std::size_t>& which,
                 const std::vector<Feature>& features) {
        const std::size_t dims = features.size();
        for (auto qi : which) {
            const auto& set = data[qi];
            PreparedQuery q;
            q.query_id = set.query_id;
            q.rows = set.rows.size();
            q.x.reserve(q.rows * dims);
            q.relevant.reserve(q.rows);
            for (const auto& r : set.rows) {
                for (auto f : features) q.x.push_back(r.normalized[f]);
                q.relevant.push_back(r.label > 0);
                q.num_relevant += r.label > 0 ? 1 : 0;
            }
            std::vector<std::uint32_t> order(q.rows);
            std::iota(order.begin(), order.end(), 0u);
            std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                return set.rows[a].doc_id > set.rows[b].doc_id;
            });
            q.key.resize(q.rows);
            for (std::uint32_t pos = 0; pos < order.size(); ++pos) q.key[order[pos]] = pos;
            queries_.push_back(std::move(q));
        }
        dims_ = dims;
    }

    bool empty() const { return queries_.empty(); }

    double map(const std::vector<double>& w) const {
        if (queries_.empty()) return 0.0;
        double sum = 0.0;
        for (const auto& q : queries_) sum += average_precision(q, w);
        return sum / static_cast<double>(queries_.size());
    }

private:
    // AP from the ranks of the relevant rows only: each non-relevant row
    // pushes down every relevant row it outranks.
    double average_precision(const PreparedQuery& q, const std::vector<double>& w) const {
        scores_.resize(q.rows);
        for (std::size_t i = 0; i < q.rows; ++i) {
            const double* row = &q.x[i * dims_];
            double s = 0.0;
            for (std::size_t d = 0; d < dims_; ++d) s += w[d] * row[d];
            scores_[i] = s;
        }
        auto before = [&](std::size_t a, std::size_t b) {
            if (scores_[a] != scores_[b]) return scores_[a] > scores_[b];
            return q.key[a] < q.key[b];
        };
        rel_.clear();
        for (std::size_t i = 0; i < q.rows; ++i) {
            if (q.relevant[i]) rel_.push_back(i);
        }
        std::sort(rel_.begin(), rel_.end(), before);
        pushed_.assign(rel_.size() + 1, 0);
        for (std::size_t i = 0; i < q.rows; ++i) {
            if (q.relevant[i]) continue;
            // First relevant row that this row outranks.
            auto it = std::partition_point(rel_.begin(), rel_.end(), [&](std::size_t r) { return before(r, i); });
            ++pushed_[static_cast<std::size_t>(it - rel_.begin())];
        }
        double ap = 0.0;
        std::size_t above = 0;
        for (std::size_t j = 0; j < rel_.size(); ++j) {
            above += pushed_[j];
            const std::size_t rank = j + 1 + above;
            if (rank > kMapDepth) break;
            ap += static_cast<double>(j + 1) / static_cast<double>(rank);
        }
        return ap / static_cast<double>(q.num_relevant);
    }

    std::vector<PreparedQuery> queries_;
    std::size_t dims_ = 0;
    mutable std::vector<double> scores_;
    mutable std::vector<std::size_t> rel_;
    mutable std::vector<std::size_t> pushed_;
};

double l1_norm(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return s;
}

void l1_normalize(std::vector<double>& w) {
    const double n = l1_norm(w);
    if (n > 0.0) {
        for (double& v : w) v /= n;
    }
}

struct AscentOutcome {
    std::vector<double> weights;
    std::vector<double> trace;
};

AscentOutcome coordinate_ascent(const MapObjective& objective, std::vector<double> w, const TrainConfig& cfg) {
    AscentOutcome out;
    double current = objective.map(w);
    out.trace.push_back(current);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const double sweep_start = current;
        for (std::size_t c = 0; c < w.size(); ++c) {
            double best = current;
            std::vector<double> best_w;
            for (double step : cfg.step_set) {
                for (double sign : {1.0, -1.0}) {
                    std::vector<double> cand = w;
                    cand[c] += sign * step;
                    if (!(l1_norm(cand) > 0.0)) continue;
                    l1_normalize(cand);
                    const double m = objective.map(cand);
                    if (m > best) {
                        best = m;
                        best_w = std::move(cand);
                    }
                }
            }
            if (!best_w.empty()) {
                w = std::move(best_w);
                current = best;
                out.trace.push_back(current);
            }
        }
        if (current - sweep_start < cfg.tolerance) break;
    }
    out.weights = std::move(w);
    return out;
}

}  // namespace

double training_map(const LinearModel& model, std::span<const QueryFeatureSet> data) {
    std::vector<std::size_t> which;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].has_relevant()) which.push_back(i);
    }
    return MapObjective(data, which, model.features).map(model.weights);
}

TrainResult train(std::span<const QueryFeatureSet> data, const std::vector<Feature>& features,
                  const TrainConfig& cfg) {
    if (features.empty()) throw InvalidArgument("training needs at least one feature");
    if (cfg.restarts < 1) throw InvalidArgument("restarts must be >= 1");
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        throw InvalidArgument("validation_fraction must be in (0,1)");
    }
    if (cfg.step_set.empty()) throw InvalidArgument("step set must not be empty");

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].has_relevant()) usable.push_back(i);
    }
    if (usable.empty()) throw InvalidArgument("training data has no relevant documents");
    if (usable.size() < 2) throw InvalidArgument("training needs at least two queries with relevant documents");

    detail::Rng rng(cfg.seed);
    rng.shuffle(usable.begin(), usable.end());
    auto n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(usable.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, usable.size() - 1);
    std::vector<std::size_t> val_idx(usable.begin(), usable.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_idx(usable.begin() + static_cast<std::ptrdiff_t>(n_val), usable.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    const MapObjective train_obj(data, train_idx, features);
    const MapObjective val_obj(data, val_idx, features);

    TrainResult result;
    for (auto i : train_idx) result.train_queries.push_back(data[i].query_id);
    for (auto i : val_idx) result.validation_queries.push_back(data[i].query_id);

    double best_val = -1.0;
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> w(features.size(), 1.0 / static_cast<double>(features.size()));
        if (r > 0) {
            do {
                for (double& v : w) v = rng.uniform(-1.0, 1.0);
            } while (!(l1_norm(w) > 0.0));
            l1_normalize(w);
        }
        AscentOutcome outcome = coordinate_ascent(train_obj, std::move(w), cfg);
        const double val_map = val_obj.map(outcome.weights);
        result.validation_maps.push_back(val_map);
        if (val_map > best_val) {
            best_val = val_map;
            result.model.features = features;
            result.model.weights = outcome.weights;
            result.model.training_map = outcome.trace.back();
            result.model.validation_map = val_map;
            result.model.restart = r;
        }
        result.traces.push_back(std::move(outcome.trace));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Routing

std::string_view query_class_name(QueryClass c) {
    return c == QueryClass::Temporal ? "temporal" : "atemporal";
}

QueryClass classify_query(const Query&, const TemporalSignal* news_signal) {
    return news_signal != nullptr && !news_signal->empty() ? QueryClass::Temporal : QueryClass::Atemporal;
}

std::vector<RankedDoc> rank(const LinearModel& model, const QueryFeatureSet& set) {
    std::vector<RankedDoc> out;
    out.reserve(set.rows.size());
    for (const auto& r : set.rows) out.push_back({r.doc_id, score(model, r.normalized)});
    std::sort(out.begin(), out.end(), [](const RankedDoc& a, const RankedDoc& b) {
        return ranks_before(a.score, a.doc_id, b.score, b.doc_id);
    });
    return out;
}

std::vector<RankedDoc> rank(const ModelPair& pair, const QueryFeatureSet& set, QueryClass classification) {
    return rank(classification == QueryClass::Temporal ? pair.temporal_model : pair.atemporal_model, set);
}

ModelPair train_model_pair(std::span<const QueryFeatureSet> data,
                           const std::map<std::string, QueryClass>& classes, const TrainConfig& cfg) {
    std::vector<QueryFeatureSet> temporal, atemporal;
    for (const auto& set : data) {
        auto it = classes.find(set.query_id);
        const QueryClass c = it == classes.end() ? QueryClass::Atemporal : it->second;
        (c == QueryClass::Temporal ? temporal : atemporal).push_back(set);
    }
    auto usable = [](const std::vector<QueryFeatureSet>& sets) {
        return std::count_if(sets.begin(), sets.end(), [](const QueryFeatureSet& s) { return s.has_relevant(); });
    };
    const std::vector<QueryFeatureSet> all(data.begin(), data.end());
    ModelPair pair;
    pair.temporal_model = train(usable(temporal) >= 2 ? temporal : all, all_features(), cfg).model;
    pair.atemporal_model = train(usable(atemporal) >= 2 ? atemporal : all, non_temporal_features(), cfg).model;
    return pair;
}

// ---------------------------------------------------------------------------
// Model file

void write_model(std::ostream& out, const LinearModel& model) {
    out << "crowdrank-linear-model 1\n";
    out << "features " << model.features.size() << '\n';
    for (std::size_t i = 0; i < model.features.size(); ++i) {
        out << "weight " << feature_name(model.features[i]) << ' ' << format_double(model.weights[i]) << '\n';
    }
    out << "training_map " << format_double(model.training_map) << '\n';
    out << "validation_map " << format_double(model.validation_map) << '\n';
    out << "restart " << model.restart << '\n';
}

LinearModel parse_model(std::istream& in, const std::string& source) {
    LinearModel m;
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared = 0;
    bool magic = false;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            auto f = split_whitespace(line);
            if (f.empty() || f[0].front() == '#') continue;
            if (!magic) {
                if (f.size() != 2 || f[0] != "crowdrank-linear-model" || f[1] != "1") {
                    throw InvalidArgument("not a crowdrank model file");
                }
                magic = true;
                continue;
            }
            if (f[0] == "features" && f.size() == 2) {
                declared = static_cast<std::size_t>(parse_int(f[1]));
            } else if (f[0] == "weight" && f.size() == 3) {
                const Feature feat = parse_feature(f[1]);
                if (std::find(m.features.begin(), m.features.end(), feat) != m.features.end()) {
                    throw InvalidArgument("duplicate feature " + std::string(f[1]));
                }
                m.features.push_back(feat);
                m.weights.push_back(parse_double(f[2]));
            } else if (f[0] == "training_map" && f.size() == 2) {
                m.training_map = parse_double(f[1]);
            } else if (f[0] == "validation_map" && f.size() == 2) {
                m.validation_map = parse_double(f[1]);
            } else if (f[0] == "restart" && f.size() == 2) {
                m.restart = static_cast<int>(parse_int(f[1]));
            } else {
                throw InvalidArgument("unknown record '" + std::string(f[0]) + "'");
            }
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(source, lineno, e.what());
    }
    if (!magic) throw ParseError(source, lineno, "empty model file");
    if (declared != m.features.size()) {
        throw ParseError(source, lineno, "declared " + std::to_string(declared) + " features, found " +
                                             std::to_string(m.features.size()));
    }
    return m;
}

LinearModel read_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_model(in, path.string());
}

}  // namespace crowdrank
