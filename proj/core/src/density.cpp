#include "crowdrank/density.hpp"

#include <algorithm>
#include <cmath>

#include "crowdrank/error.hpp"

namespace crowdrank {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)
constexpr double kOneHourInDays = 1.0 / 24.0;

}  // namespace

double silverman_bandwidth(std::span<const WeightedPoint> points) {
    const std::size_t n = points.size();
    if (n < 2) throw DegenerateInput("bandwidth needs at least two points");
    double wsum = 0.0;
    double mean = 0.0;
    for (const auto& p : points) {
        wsum += p.w;
        mean += p.w * p.t;
    }
    if (!(wsum > 0.0)) throw DegenerateInput("bandwidth needs positive total weight");
    mean /= wsum;
    double var = 0.0;
    for (const auto& p : points) var += p.w * (p.t - mean) * (p.t - mean);
    var /= wsum;
    const double sigma = std::sqrt(var);
    if (!(sigma > 0.0)) throw DegenerateInput("bandwidth undefined for zero spread");
    return 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
}

double fallback_bandwidth(const TimeDomain& domain) {
    return std::max((domain.hi - domain.lo) / 100.0, kOneHourInDays);
}

DensityEstimate::DensityEstimate(std::vector<WeightedPoint> points, double bandwidth, TimeDomain domain,
                                 BoundaryCorrection correction)
    : points_(std::move(points)), h_(bandwidth), domain_(domain), correction_(correction) {
    if (!(h_ > 0.0)) throw InvalidArgument("bandwidth must be positive");
    if (!(domain_.lo < domain_.hi)) throw InvalidArgument("density domain must satisfy lo < hi");
}

double DensityEstimate::raw(double t) const {
    double sum = 0.0;
    for (const auto& p : points_) {
        const double z = (t - p.t) / h_;
        sum += p.w * std::exp(-0.5 * z * z);
    }
    return sum * kInvSqrt2Pi / (static_cast<double>(points_.size()) * h_);
}

double DensityEstimate::operator()(double t) const {
    if (t < domain_.lo || t > domain_.hi) return 0.0;
    double value = raw(t);
    if (correction_ == BoundaryCorrection::Reflection) {
        value += raw(2.0 * domain_.lo - t) + raw(2.0 * domain_.hi - t);
    }
    return value;
}

DensityEstimate build_density(const TemporalSignal& signal, TimeDomain domain,
                              BoundaryCorrection correction) {
    if (signal.empty()) throw DegenerateInput("cannot estimate a density from an empty signal");
    std::vector<WeightedPoint> pts;
    pts.reserve(signal.points.size());
    double wsum = 0.0;
    for (const auto& p : signal.points) {
        const double t = to_days(p.t);
        if (t < domain.lo || t > domain.hi) throw InvalidArgument("signal point outside density domain");
        if (!(p.w >= 0.0)) throw InvalidArgument("negative signal weight");
        pts.push_back({t, p.w});
        wsum += p.w;
    }
    if (!(wsum > 0.0)) throw DegenerateInput("signal has no positive weight");
    const double n = static_cast<double>(pts.size());
    if (std::abs(wsum - n) > 1e-12 * n) {
        for (auto& p : pts) p.w *= n / wsum;
    }

    double h = 0.0;
    try {
        h = silverman_bandwidth(pts);
    } catch (const DegenerateInput&) {
        h = fallback_bandwidth(domain);
    }
    return DensityEstimate(std::move(pts), h, domain, correction);
}

double evaluate_density(const DensityEstimate& est, Timestamp t) { return est(to_days(t)); }

std::vector<double> temporal_features(const DensityEstimate* est, std::span<const Timestamp> doc_times) {
    std::vector<double> out(doc_times.size(), 0.0);
    if (est == nullptr) return out;
    double peak = 0.0;
    for (std::size_t i = 0; i < doc_times.size(); ++i) {
        out[i] = evaluate_density(*est, doc_times[i]);
        peak = std::max(peak, out[i]);
    }
    if (!(peak > 0.0)) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    for (auto& v : out) v = std::clamp(v / peak, 0.0, 1.0);
    return out;
}

double temporal_feature(const DensityEstimate* est, std::span<const Timestamp> doc_times, Timestamp t_d) {
    if (est == nullptr) return 0.0;
    double peak = 0.0;
    for (auto t : doc_times) peak = std::max(peak, evaluate_density(*est, t));
    if (!(peak > 0.0)) return 0.0;
    return std::clamp(evaluate_density(*est, t_d) / peak, 0.0, 1.0);
}

double recency_prior(const RecencyConfig& cfg, Timestamp t_ref, Timestamp t_d) {
    if (t_d > t_ref) throw InvalidArgument("recency prior: document is newer than the reference time");
    if (!(cfg.lambda > 0.0)) throw InvalidArgument("recency lambda must be positive");
    const double unit = cfg.unit == TimeUnit::Days ? static_cast<double>(kSecondsPerDay) : 3600.0;
    const double gap = static_cast<double>(t_ref - t_d) / unit;
    return cfg.lambda * std::exp(-cfg.lambda * gap);
}

}  // namespace crowdrank
