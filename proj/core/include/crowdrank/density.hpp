#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crowdrank/corpus.hpp"
#include "crowdrank/signals.hpp"

namespace crowdrank {

/// Density work happens in fractional days.
inline double to_days(Timestamp t) { return static_cast<double>(t) / static_cast<double>(kSecondsPerDay); }

enum class BoundaryCorrection { Reflection, None };

struct WeightedPoint {
    double t = 0.0;  ///< days
    double w = 0.0;
};

struct TimeDomain {
    double lo = 0.0;  ///< days
    double hi = 0.0;
};

/// h = 1.06 * sigma_w * n^(-1/5) with the weight-weighted standard deviation
/// and raw point count n. Throws DegenerateInput when n < 2 or sigma_w = 0.
double silverman_bandwidth(std::span<const WeightedPoint> points);

/// Used when Silverman is undefined: max(span / 100, 1 hour).
double fallback_bandwidth(const TimeDomain& domain);

/// Weighted Gaussian KDE over a closed time domain. Weights are rescaled to
/// sum to the point count so the 1/(n h) factor yields unit mass.
class DensityEstimate {
public:
    DensityEstimate(std::vector<WeightedPoint> points, double bandwidth, TimeDomain domain,
                    BoundaryCorrection correction);

    const std::vector<WeightedPoint>& points() const noexcept { return points_; }
    double bandwidth() const noexcept { return h_; }
    TimeDomain domain() const noexcept { return domain_; }
    BoundaryCorrection correction() const noexcept { return correction_; }

    /// Density at t (days); zero outside the domain.
    double operator()(double t) const;

    /// Uncorrected kernel sum at t, without the domain check.
    double raw(double t) const;

private:
    std::vector<WeightedPoint> points_;
    double h_;
    TimeDomain domain_;
    BoundaryCorrection correction_;
};

/// Throws DegenerateInput on an empty signal, InvalidArgument when a point
/// falls outside the domain or the domain is empty.
DensityEstimate build_density(const TemporalSignal& signal, TimeDomain domain,
                              BoundaryCorrection correction = BoundaryCorrection::Reflection);

double evaluate_density(const DensityEstimate& est, Timestamp t);

/// Density at t_d divided by the maximum over the candidate times; 0 for a
/// missing estimate.
double temporal_feature(const DensityEstimate* est, std::span<const Timestamp> doc_times, Timestamp t_d);

/// Same normalization for every candidate at once.
std::vector<double> temporal_features(const DensityEstimate* est, std::span<const Timestamp> doc_times);

enum class TimeUnit { Days, Hours };

struct RecencyConfig {
    double lambda = 0.01;
    TimeUnit unit = TimeUnit::Days;
};

/// lambda * exp(-lambda * (t_ref - t_d)) with the gap in cfg.unit.
double recency_prior(const RecencyConfig& cfg, Timestamp t_ref, Timestamp t_d);

}  // namespace crowdrank
