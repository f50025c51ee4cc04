#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cohrel/errors.hpp"
#include "cohrel/data.hpp"
#include "cohrel/npbayes.hpp"
#include "cohrel/numerics.hpp"
#include "support.hpp"

using namespace cohrel;

namespace {

std::array<DistributionGuess, 3> exp3() { return {exponential_guess(1), exponential_guess(1), exponential_guess(1)}; }

// Value of the curve at the last grid point <= t.
double at(const CurveEstimate& c, double t) {
    auto it = std::upper_bound(c.t.begin(), c.t.end(), t);
    if (it == c.t.begin()) return 0.0;
    return c.values[static_cast<std::size_t>(it - c.t.begin() - 1)];
}

double sup_distance(const CurveEstimate& c, const std::function<double(double)>& F) {
    double d = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) d = std::max(d, std::abs(c.values[i] - F(c.t[i])));
    return d;
}

std::vector<double> rhos(const std::string& file, const std::string& structure) {
    const auto recs = load_system_csv(testsupport::fixture(file));
    const auto e = parse_structure(structure);
    std::vector<double> out;
    EstimatorOptions opt;
    opt.grid_points = 32;
    for (int j = 1; j <= 4; ++j) out.push_back(estimate_component(e, recs, exp3(), ComponentId{j}, opt).rho_hat);
    return out;
}

}  // namespace

TEST(NpBayes, GuessParsing) {
    EXPECT_NEAR(parse_guess("exp:2").cdf(2.0), 1 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(parse_guess("weibull:2:3").cdf(3.0), 1 - std::exp(-1.0), 1e-15);
    EXPECT_THROW(parse_guess("exp:-1"), InputError);
    EXPECT_THROW(parse_guess("cauchy:1"), InputError);
}

TEST(NpBayes, PriorMeasureClosedFormsSps) {
    const auto a = prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                             TwoLevelKind::Sps);
    double d = 0.0;
    for (int k = 0; k <= 500; ++k) {
        const double v = 5.0 * k / 500;
        const double a1 = (std::exp(-3 * v) - 3 * std::exp(-2 * v) + 2) / 3;
        const double a2 = (2 * std::exp(-3 * v) - 3 * std::exp(-2 * v) + 1) / 6;
        d = std::max({d, std::abs(a[0].cumulative(v) - a1), std::abs(a[1].cumulative(v) - a2),
                      std::abs(a[2].cumulative(v) - a2)});
    }
    EXPECT_LT(d, 1e-6);
    EXPECT_NEAR(a[0].total_mass() + a[1].total_mass() + a[2].total_mass(), 1.0, 1e-9);
    EXPECT_NEAR(a[1].total_mass(), 1.0 / 6, 1e-9);
    EXPECT_NEAR(a[0].tail(2.0) + a[0].cumulative(2.0), a[0].total_mass(), 1e-12);
}

TEST(NpBayes, PriorMeasureDegenerateSlots) {
    const auto a = prior_measures_from_guess(exponential_guess(1), never_fails_guess(), never_fails_guess(),
                                             TwoLevelKind::Sps);
    EXPECT_EQ(a[1].total_mass(), 0.0);
    EXPECT_EQ(a[2].total_mass(), 0.0);
    for (double v : {0.1, 1.0, 3.0}) EXPECT_NEAR(a[0].cumulative(v), 1 - std::exp(-v), 1e-9);
}

TEST(NpBayes, EmpiricalSubdist) {
    std::vector<CauseRecord> r;
    for (const auto& s : load_system_csv(testsupport::fixture("series4.csv"))) r.push_back({s.t, s.delta});
    EXPECT_DOUBLE_EQ(empirical_subdist(r, 1, 2.00), 0.2);
    EXPECT_EQ(empirical_subdist(r, 1, 0.01), 0.0);
}

TEST(NpBayes, RhoHatExample1) {
    const auto r = rhos("sps4_sample.csv", "min(max(1,2),max(3,4))");
    const std::vector<double> want{0.2294, 0.3581, 0.2690, 0.1403};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(r[j], want[j], 5e-4) << "component " << j + 1;
}

TEST(NpBayes, RhoHatExample2) {
    const auto r = rhos("pss4_sample.csv", "max(min(1,2),min(3,4))");
    const std::vector<double> want{0.2887, 0.2887, 0.2887, 0.1303};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(r[j], want[j], 5e-4) << "component " << j + 1;
}

TEST(NpBayes, SystemDfClosedForm) {
    const auto recs = load_system_csv(testsupport::fixture("sps4_sample.csv"));
    const auto e = parse_structure("min(max(1,2),max(3,4))");
    const auto v = select_view(e, ComponentId{1});
    std::vector<CauseRecord> data;
    for (const auto& r : recs) data.push_back({r.t, v.slot_of(r.delta)});
    SubDistSet sub(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                             TwoLevelKind::Sps),
                   data);
    const double n = static_cast<double>(recs.size());
    for (double t : {0.3, 0.8, 1.4, 2.5}) {
        double emp = 0;
        for (const auto& r : recs) emp += r.t <= t;
        const double want = (emp + std::exp(-3 * t) - 2 * std::exp(-2 * t) + 1) / (n + 1);
        EXPECT_NEAR(sub.system_df(t), want, 1e-6);
        EXPECT_NEAR(sub.subdist(1, t) + sub.subdist(2, t) + sub.subdist(3, t), sub.system_df(t), 1e-12);
    }
    EXPECT_NEAR(sub.system_df(0.0), 0.0, 1e-15);
    EXPECT_NEAR(sub.rho_hat(1) + sub.rho_hat(2) + sub.rho_hat(3), 1.0, 1e-12);
}

TEST(NpBayes, PriorOnlyRhoAndSubdist) {
    SubDistSet sub(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                             TwoLevelKind::Sps),
                   {});
    EXPECT_NEAR(sub.rho_hat(1), 2.0 / 3, 1e-9);
    EXPECT_NEAR(sub.rho_hat(2), 1.0 / 6, 1e-9);
    EXPECT_NEAR(sub.subdist(1, 1.0), (std::exp(-3.0) - 3 * std::exp(-2.0) + 2) / 3, 1e-6);
}

class PriorRecovery : public ::testing::TestWithParam<int> {};

// With no data every estimator hands back its prior guess.
TEST_P(PriorRecovery, ReturnsGuessDf) {
    const int which = GetParam();
    const auto kind = which < 3 ? TwoLevelKind::Sps : TwoLevelKind::Pss;
    const std::array<DistributionGuess, 3> g{exponential_guess(1.0), exponential_guess(0.7), exponential_guess(1.5)};
    SubDistSet sub(prior_measures_from_guess(g[0], g[1], g[2], kind), {});
    EstimatorOptions opt;
    opt.t_max = 3.0;
    CurveEstimate c;
    const DistributionGuess* want = nullptr;
    switch (which) {
        case 0: c = estimate_F1_sps(sub, opt), want = &g[0]; break;
        case 1: c = estimate_F2_sps(sub, 2, opt), want = &g[1]; break;
        case 2: c = estimate_F2_sps(sub, 3, opt), want = &g[2]; break;
        case 3: c = estimate_F1_pss(sub, opt), want = &g[0]; break;
        case 4: c = estimate_F2_pss(sub, 2, opt), want = &g[1]; break;
        default: c = estimate_F2_pss(sub, 3, opt), want = &g[2]; break;
    }
    ASSERT_FALSE(c.t.empty());
    EXPECT_EQ(c.t.front(), 0.0);
    EXPECT_NEAR(c.t.back(), 3.0, 1e-12);
    EXPECT_LT(sup_distance(c, want->cdf), 2e-3);
}

INSTANTIATE_TEST_SUITE_P(Estimators, PriorRecovery, ::testing::Range(0, 6));

TEST(NpBayes, TwoComponentPriorRecovery) {
    EstimatorOptions opt;
    opt.t_max = 3.0;
    const auto c = estimate_two_component({}, PairKind::Series, 2, {exponential_guess(1), exponential_guess(2)}, 1.0, opt);
    EXPECT_LT(sup_distance(c, exponential_guess(2).cdf), 2e-3);
}

TEST(NpBayes, PetersonLimitSeries) {
    // alpha -> 0: Kaplan-Meier with the other cause as censoring
    const std::vector<CauseRecord> r{{1.0, 1}, {2.0, 2}, {3.0, 1}};
    const auto g = std::array<DistributionGuess, 2>{exponential_guess(1), exponential_guess(1)};
    const auto c1 = estimate_two_component(r, PairKind::Series, 1, g, 1e-9);
    const auto c2 = estimate_two_component(r, PairKind::Series, 2, g, 1e-9);
    EXPECT_NEAR(at(c1, 0.5), 0.0, 1e-6);
    EXPECT_NEAR(at(c1, 1.5), 1.0 / 3, 1e-6);
    EXPECT_NEAR(at(c1, 2.5), 1.0 / 3, 1e-6);
    EXPECT_NEAR(c1.values.back(), 1.0, 1e-6);
    EXPECT_NEAR(at(c2, 1.5), 0.0, 1e-6);
    EXPECT_NEAR(at(c2, 2.5), 0.5, 1e-6);
}

TEST(NpBayes, SingleObservationJump) {
    const auto c = estimate_two_component({{1.0, 1}}, PairKind::Series, 1,
                                          {exponential_guess(1), exponential_guess(1)}, 1e-9);
    EXPECT_NEAR(at(c, 0.99), 0.0, 1e-6);
    EXPECT_NEAR(c.values.back(), 1.0, 1e-6);
}

TEST(NpBayes, CurvesMonotoneInUnitInterval) {
    const auto recs = load_system_csv(testsupport::fixture("pss4_sample.csv"));
    const auto e = parse_structure("max(min(1,2),min(3,4))");
    for (int j = 1; j <= 4; ++j) {
        const auto est = estimate_component(e, recs, exp3(), ComponentId{j});
        const auto& v = est.curve.values;
        EXPECT_EQ(est.curve.t.front(), 0.0);
        EXPECT_EQ(v.front(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_GE(v[i], -1e-9);
            EXPECT_LE(v[i], 1 + 1e-9);
            if (i) {
                EXPECT_GE(v[i], v[i - 1] - 1e-9) << "at t = " << est.curve.t[i];
            }
        }
    }
}

TEST(NpBayes, EstimateComponentUsesMappedView) {
    const auto recs = load_system_csv(testsupport::fixture("sps4_sample.csv"));
    const auto e = parse_structure("min(max(1,2),max(3,4))");
    const auto est = estimate_component(e, recs, exp3(), ComponentId{1});
    EXPECT_EQ(est.view.target_slot, 2);
    std::vector<CauseRecord> data;
    for (const auto& r : recs) data.push_back({r.t, est.view.slot_of(r.delta)});
    SubDistSet sub(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                             TwoLevelKind::Sps),
                   data);
    const auto direct = estimate_F2_sps(sub, 2);
    ASSERT_EQ(direct.values.size(), est.curve.values.size());
    for (std::size_t i = 0; i < direct.values.size(); ++i) EXPECT_DOUBLE_EQ(direct.values[i], est.curve.values[i]);

    // three-component PSS, target X1: the slot-1 estimator on the identity view
    const auto p = parse_structure("max(1,min(2,3))");
    std::vector<SystemRecord> small{{1, 0.5, 1}, {2, 0.9, 2}, {3, 1.3, 3}, {4, 1.7, 1}};
    const auto e1 = estimate_component(p, small, exp3(), ComponentId{1});
    EXPECT_EQ(e1.view.target_slot, 1);
    std::vector<CauseRecord> cd;
    for (const auto& r : small) cd.push_back({r.t, r.delta});
    SubDistSet ps(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                            TwoLevelKind::Pss),
                  cd);
    const auto d1 = estimate_F1_pss(ps);
    for (std::size_t i = 0; i < d1.values.size(); ++i) EXPECT_DOUBLE_EQ(d1.values[i], e1.curve.values[i]);
}

TEST(NpBayes, BridgeUnsupported) {
    const auto recs = load_system_csv(testsupport::fixture("series4.csv"));
    const auto bridge = parse_structure("max(min(1,4),min(2,5),min(1,3,5),min(2,3,4))");
    EXPECT_THROW(estimate_component(bridge, recs, exp3(), ComponentId{1}), UnsupportedSystemError);
}

TEST(NpBayes, DataDominance) {
    // alpha fixed, n growing: the posterior subdistribution approaches the empirical one
    RandomStream rs(5, 0);
    std::vector<CauseRecord> all;
    for (int i = 0; i < 1000; ++i) {
        const double x1 = -std::log1p(-uniform(rs)), x2 = -std::log1p(-uniform(rs)) * 0.8,
                     x3 = -std::log1p(-uniform(rs)) * 1.2;
        const double t = std::min(x1, std::max(x2, x3));
        all.push_back({t, t == x1 ? 1 : t == x2 ? 2 : 3});
    }
    double last = 1.0;
    for (std::size_t n : {10u, 100u, 1000u}) {
        std::vector<CauseRecord> d(all.begin(), all.begin() + static_cast<long>(n));
        SubDistSet sub(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                                 TwoLevelKind::Sps),
                       d);
        double dist = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = 4.0 * k / 200;
            for (int j = 1; j <= 3; ++j)
                dist = std::max(dist, std::abs(sub.subdist(j, t) - empirical_subdist(d, j, t)));
        }
        EXPECT_LE(dist, 1.0 / (n + 1) + 1e-12);
        EXPECT_LT(dist, last);
        last = dist;
    }
}

TEST(NpBayes, ConsistencySmoke) {
    // min(X1, max(X2, X3)), exponential components with means 1, 0.8, 1.2
    RandomStream rs(2024, 0);
    std::vector<CauseRecord> d;
    std::vector<double> ts;
    for (int i = 0; i < 2000; ++i) {
        const double x1 = -std::log1p(-uniform(rs)), x2 = -0.8 * std::log1p(-uniform(rs)),
                     x3 = -1.2 * std::log1p(-uniform(rs));
        const double t = std::min(x1, std::max(x2, x3));
        d.push_back({t, t == x1 ? 1 : t == x2 ? 2 : 3});
        ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    const double q90 = ts[1800];
    SubDistSet sub(prior_measures_from_guess(exponential_guess(1), exponential_guess(1), exponential_guess(1),
                                             TwoLevelKind::Sps),
                   d);
    EstimatorOptions opt;
    opt.grid_points = 128;
    const auto c = estimate_F2_sps(sub, 2, opt);
    double dist = 0.0;
    for (std::size_t i = 0; i < c.t.size() && c.t[i] <= q90; ++i)
        dist = std::max(dist, std::abs(c.values[i] - (1 - std::exp(-c.t[i] / 0.8))));
    EXPECT_LT(dist, 0.05);
}
