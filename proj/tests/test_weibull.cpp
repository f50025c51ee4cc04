#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cohrel/data.hpp"
#include "cohrel/errors.hpp"
#include "cohrel/numerics.hpp"
#include "cohrel/weibull.hpp"
#include "support.hpp"

using namespace cohrel;

TEST(Weibull, Reliability) {
    EXPECT_NEAR(reliability(1, {1, 1, 0}), std::exp(-1.0), 1e-15);
    EXPECT_EQ(reliability(1, {2, 3, 1}), 1.0);
    EXPECT_NEAR(reliability(6, {2, 10, 1}), 0.778801, 1e-6);
    EXPECT_EQ(reliability(kInf, {2, 3, 1}), 0.0);
}

TEST(Weibull, Density) {
    EXPECT_NEAR(density(2, {1, 1, 0}), std::exp(-2.0), 1e-15);
    EXPECT_EQ(density(0.5, {2, 3, 1}), 0.0);
    const WeibullParams th{2.5, 3.0, 0.7};
    const double mass = simpson([&](double t) { return density(t, th); }, 0.7, 0.7 + 40, 4000);
    EXPECT_NEAR(mass, 1.0, 1e-6);
    // derivative of 1 - R
    for (double t : {1.0, 2.5, 4.0}) {
        const double h = 1e-6;
        EXPECT_NEAR(density(t, th), (reliability(t - h, th) - reliability(t + h, th)) / (2 * h), 1e-7);
        EXPECT_NEAR(log_density(t, th), std::log(density(t, th)), 1e-12);
        EXPECT_NEAR(log_cdf(t, th), std::log1p(-reliability(t, th)), 1e-12);
        EXPECT_NEAR(log_reliability(t, th), std::log(reliability(t, th)), 1e-12);
    }
}

TEST(Weibull, LogLikelihoodRows) {
    const WeibullParams exp1{1, 1, 0};
    const std::vector<ObsInterval> exact{ObsInterval::exact(2)}, right{ObsInterval::right(2)}, left{ObsInterval::left(2)};
    EXPECT_NEAR(log_likelihood(exp1, exact), -2.0, 1e-15);
    EXPECT_NEAR(log_likelihood(exp1, right), -2.0, 1e-15);
    EXPECT_NEAR(log_likelihood(exp1, left), -0.145413, 1e-6);
    const std::vector<ObsInterval> interval{{1, 2}};
    EXPECT_NEAR(log_likelihood(exp1, interval), std::log(std::exp(-1.0) - std::exp(-2.0)), 1e-14);
    // impossible parameters give -inf rather than throwing
    EXPECT_EQ(log_likelihood({1, 1, 3}, exact), -kInf);
}

TEST(Weibull, SeriesReduction) {
    const auto recs = load_system_csv(testsupport::fixture("series4.csv"));
    const auto ds = intervals_from_series(recs, 4);
    const WeibullParams th{1.7, 2.9, 0.3};
    for (int j = 1; j <= 4; ++j) {
        double want = 0.0;
        for (const auto& r : recs)
            want += r.delta == j ? std::log(density(r.t, th)) : std::log(reliability(r.t, th));
        EXPECT_NEAR(log_likelihood(th, ds.column(j)), want, 1e-12);
    }
}

TEST(Weibull, ParallelReduction) {
    const auto recs = load_system_csv(testsupport::fixture("parallel3.csv"));
    const auto ds = intervals_from_parallel(recs, 3);
    const WeibullParams th{0.9, 1.6, 0.0};
    for (int j = 1; j <= 3; ++j) {
        double want = 0.0;
        for (const auto& r : recs)
            want += r.delta == j ? std::log(density(r.t, th)) : std::log(1 - reliability(r.t, th));
        EXPECT_NEAR(log_likelihood(th, ds.column(j)), want, 1e-12);
    }
    // the tabulated component intervals of the larger parallel sample
    const auto comp = load_component_csv(testsupport::fixture("parallel3_components.csv"));
    for (int j = 1; j <= 3; ++j) {
        double want = 0.0;
        for (const auto& iv : comp.column(j))
            want += iv.l == iv.u ? std::log(density(iv.l, th)) : std::log(1 - reliability(iv.u, th));
        EXPECT_NEAR(log_likelihood(th, comp.column(j)), want, 1e-12);
    }
}

TEST(Weibull, Posterior) {
    const auto ds = load_component_csv(testsupport::fixture("device_g.csv"));
    const auto rows = ds.column(1);
    const WeibullParams th{2.0, 300.0, 1.0};
    EXPECT_NEAR(log_posterior(th, rows), log_likelihood(th, rows) - std::log(300.0 * 2.0), 1e-9);
    EXPECT_EQ(location_bound(rows), 2.0);
    double first_exact = kInf;
    for (const auto& iv : rows)
        if (iv.l == iv.u) first_exact = std::min(first_exact, iv.l);
    EXPECT_EQ(log_posterior({2.0, 300.0, first_exact}, rows), -kInf);
    for (double b : {0.5, 1.0, 3.0, 6.0})
        for (double e : {100.0, 300.0, 800.0})
            for (double m : {0.0, 1.0, 1.9}) EXPECT_TRUE(std::isfinite(log_posterior({b, e, m}, rows)));
}

TEST(Weibull, Preconditions) {
    const std::vector<ObsInterval> one{ObsInterval::exact(3.0)};
    EXPECT_THROW(fit(one, McmcConfig::weibull_default()), PreconditionError);
    const std::vector<ObsInterval> blind{{0, kInf}, {0, kInf}};
    EXPECT_THROW(fit(blind, McmcConfig::weibull_default()), PreconditionError);
}

TEST(Weibull, RecoversShapeFromLargeSample) {
    RandomStream rs(3, 0);
    std::vector<ObsInterval> rows;
    for (int i = 0; i < 500; ++i) rows.push_back(ObsInterval::exact(10.0 * std::sqrt(-std::log1p(-uniform(rs)))));
    McmcConfig c = McmcConfig::weibull_default();
    c.seed = 3;
    const auto s = fit(rows, c);
    EXPECT_EQ(s.draws.size(), static_cast<std::size_t>(c.kept()));
    double mb = 0;
    for (const auto& d : s.draws) mb += d.beta;
    mb /= static_cast<double>(s.draws.size());
    EXPECT_NEAR(mb, 2.0, 0.3);
}

TEST(Weibull, DeviceGComponentW) {
    const auto ds = load_component_csv(testsupport::fixture("device_g.csv"));
    McmcConfig c = McmcConfig::weibull_default();
    c.seed = 1;
    c.stream = 1;
    const auto s = fit(ds.column(1), c);
    double mb = 0, me = 0;
    for (const auto& d : s.draws) mb += d.beta, me += d.eta;
    mb /= static_cast<double>(s.draws.size());
    me /= static_cast<double>(s.draws.size());
    EXPECT_GE(mb, 1.895);
    EXPECT_LE(mb, 6.875);
    EXPECT_GE(me, 283.8);
    EXPECT_LE(me, 418.5);

    const std::vector<double> t{150.23};
    const auto band = reliability_curve(s, t);
    EXPECT_GE(band.mean[0], 0.875);
    EXPECT_LE(band.mean[0], 0.999);
}

TEST(Weibull, ReliabilityCurve) {
    PosteriorSample s;
    s.draws.assign(50, WeibullParams{2, 3, 0});
    const std::vector<double> grid{0.5, 1, 2, 4};
    const auto band = reliability_curve(s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_DOUBLE_EQ(band.mean[i], reliability(grid[i], {2, 3, 0}));
        EXPECT_DOUBLE_EQ(band.lo[i], band.hi[i]);
    }
    s.draws = {{1, 2, 0}, {2, 3, 0}, {0.5, 5, 0.2}};
    const auto b2 = reliability_curve(s, grid);
    for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LE(b2.mean[i], b2.mean[i - 1]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LE(b2.lo[i], b2.mean[i]);
        EXPECT_GE(b2.hi[i], b2.mean[i]);
    }
}
