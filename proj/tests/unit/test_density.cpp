#include <doctest.h>

#include <cmath>
#include <random>

#include "crowdrank/density.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/signals.hpp"

using namespace crowdrank;

namespace {

constexpr double kStdNormalAtZero = 0.3989422804014327;

double trapezoid(const DensityEstimate& est, int nodes) {
    const auto d = est.domain();
    const double dx = (d.hi - d.lo) / (nodes - 1);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double f = est(d.lo + i * dx);
        sum += (i == 0 || i == nodes - 1) ? 0.5 * f : f;
    }
    return sum * dx;
}

Timestamp days(double d) { return static_cast<Timestamp>(std::llround(d * kSecondsPerDay)); }

TemporalSignal random_signal(std::mt19937_64& gen, TimeDomain domain) {
    std::uniform_int_distribution<int> count(1, 40);
    std::uniform_real_distribution<double> where(domain.lo + 0.01, domain.hi - 0.01), weight(0.01, 5.0);
    TemporalSignal s{SourceKind::News, "q", {}};
    for (int i = count(gen); i > 0; --i) s.points.push_back({days(where(gen)), weight(gen)});
    return s;
}

}  // namespace

TEST_CASE("silverman_bandwidth") {
    // 16 points at -1 and 16 at +1: sigma = 1, n = 32, 32^(1/5) = 2.
    std::vector<WeightedPoint> pts;
    for (int i = 0; i < 32; ++i) pts.push_back({i % 2 ? 1.0 : -1.0, 1.0});
    CHECK(std::abs(silverman_bandwidth(pts) - 0.53) <= 1e-12);

    std::vector<WeightedPoint> same(5, {3.0, 1.0});
    CHECK_THROWS_AS(silverman_bandwidth(same), DegenerateInput);
    std::vector<WeightedPoint> one{{3.0, 1.0}};
    CHECK_THROWS_AS(silverman_bandwidth(one), DegenerateInput);
}

TEST_CASE("build_density rescales weights to the point count") {
    const TimeDomain dom{0.0, 10.0};
    TemporalSignal s{SourceKind::News, "q", {{days(1), 1.0}, {days(2), 2.0}, {days(3), 3.0}}};
    auto est = build_density(s, dom);
    REQUIRE(est.points().size() == 3);
    CHECK(est.points()[0].w == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(est.points()[1].w == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(est.points()[2].w == doctest::Approx(1.5).epsilon(1e-15));

    TemporalSignal already{SourceKind::News, "q", {{days(1), 0.5}, {days(2), 1.5}}};
    auto est2 = build_density(already, dom);
    CHECK(est2.points()[0].w == 0.5);
    CHECK(est2.points()[1].w == 1.5);

    TemporalSignal single{SourceKind::News, "q", {{days(4), 1.0}}};
    CHECK(build_density(single, dom).bandwidth() == fallback_bandwidth(dom));
    CHECK(fallback_bandwidth({0.0, 0.5}) == doctest::Approx(1.0 / 24.0));

    CHECK_THROWS_AS(build_density({SourceKind::News, "q", {}}, dom), DegenerateInput);
    CHECK_THROWS_AS(build_density({SourceKind::News, "q", {{days(11), 1.0}}}, dom), InvalidArgument);
}

TEST_CASE("density point values") {
    DensityEstimate est({{5.0, 1.0}}, 1.0, {-100.0, 100.0}, BoundaryCorrection::None);
    CHECK(std::abs(est(5.0) - kStdNormalAtZero) <= 1e-6);
    CHECK(est(5.0) == doctest::Approx(kStdNormalAtZero).epsilon(1e-15));
    CHECK(est(105.0) == 0.0);

    // Ten hours away with a one-hour bandwidth.
    DensityEstimate narrow({{0.0, 1.0}}, 1.0 / 24.0, {-5.0, 5.0}, BoundaryCorrection::None);
    CHECK(narrow(10.0 / 24.0 + 1e-9) < 1e-20);

    // A point on the boundary: the reflected image coincides with it.
    DensityEstimate none({{0.0, 1.0}, {3.0, 1.0}}, 0.7, {0.0, 100.0}, BoundaryCorrection::None);
    DensityEstimate refl({{0.0, 1.0}, {3.0, 1.0}}, 0.7, {0.0, 100.0}, BoundaryCorrection::Reflection);
    CHECK(refl(0.0) == doctest::Approx(2.0 * none(0.0)).epsilon(1e-14));
}

TEST_CASE("reflected density integrates to one") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> lo(-50.0, 50.0), span(1.0, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = lo(gen);
        const TimeDomain dom{a, a + span(gen)};
        auto est = build_density(random_signal(gen, dom), dom, BoundaryCorrection::Reflection);
        CHECK(trapezoid(est, 10000) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("density is non-negative and free of jumps") {
    std::mt19937_64 gen(5);
    const TimeDomain dom{0.0, 30.0};
    for (int trial = 0; trial < 30; ++trial) {
        auto est = build_density(random_signal(gen, dom), dom);
        const int nodes = 4000;
        const double dx = (dom.hi - dom.lo) / (nodes - 1);
        // Gaussian slope bound, three kernel images.
        const double max_step = 3.0 * 0.2420 * dx / (est.bandwidth() * est.bandwidth()) * 1.0001;
        double prev = est(dom.lo);
        for (int i = 1; i < nodes; ++i) {
            const double v = est(dom.lo + i * dx);
            CHECK(v >= 0.0);
            CHECK(std::abs(v - prev) <= max_step);
            prev = v;
        }
    }
}

TEST_CASE("density is invariant to weight scale") {
    std::mt19937_64 gen(9);
    const TimeDomain dom{10.0, 40.0};
    for (int trial = 0; trial < 30; ++trial) {
        auto s = random_signal(gen, dom);
        auto scaled = s;
        for (auto& p : scaled.points) p.w *= 37.5;
        auto a = build_density(s, dom);
        auto b = build_density(scaled, dom);
        for (double t = dom.lo; t <= dom.hi; t += 0.37) CHECK(b(t) == doctest::Approx(a(t)).epsilon(1e-12));
    }
}

TEST_CASE("temporal features") {
    const TimeDomain dom{-10.0, 10.0};
    DensityEstimate est({{0.0, 1.0}}, 1.0, dom, BoundaryCorrection::None);
    std::vector<Timestamp> times{0, days(0.5), days(std::sqrt(2.0 * std::log(2.0))), days(-3)};

    CHECK(temporal_feature(nullptr, times, times[0]) == 0.0);
    for (double v : temporal_features(nullptr, times)) CHECK(v == 0.0);

    auto f = temporal_features(&est, times);
    CHECK(f[0] == 1.0);
    // Density ratio 2:1 against the peak.
    CHECK(f[2] == doctest::Approx(0.5).epsilon(1e-5));
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(f[i] == doctest::Approx(est(to_days(times[i])) / est(0.0)).epsilon(1e-14));
        CHECK(temporal_feature(&est, times, times[i]) == f[i]);
    }
}

TEST_CASE("temporal features are in [0,1] with a peak of one") {
    std::mt19937_64 gen(21);
    const TimeDomain dom{0.0, 20.0};
    std::uniform_real_distribution<double> where(dom.lo, dom.hi);
    for (int trial = 0; trial < 50; ++trial) {
        auto est = build_density(random_signal(gen, dom), dom);
        std::vector<Timestamp> times;
        for (int i = 0; i < 25; ++i) times.push_back(days(where(gen)));
        auto f = temporal_features(&est, times);
        double peak = 0.0;
        for (double v : f) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            peak = std::max(peak, v);
        }
        CHECK(peak == 1.0);
    }
}

TEST_CASE("recency_prior") {
    const RecencyConfig cfg{0.01, TimeUnit::Days};
    CHECK(recency_prior(cfg, 1000, 1000) == 0.01);
    CHECK(recency_prior(cfg, 100 * kSecondsPerDay, 0) == doctest::Approx(0.01 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(recency_prior(cfg, 100 * kSecondsPerDay, 0) == doctest::Approx(0.0036788).epsilon(1e-4));
    CHECK(recency_prior(cfg, 10 * kSecondsPerDay, 9 * kSecondsPerDay) >
          recency_prior(cfg, 10 * kSecondsPerDay, 8 * kSecondsPerDay));
    const RecencyConfig hours{0.01, TimeUnit::Hours};
    CHECK(recency_prior(hours, 100 * 3600, 0) == doctest::Approx(0.01 * std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(recency_prior(cfg, 0, 1), InvalidArgument);
}
