#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cohrel/errors.hpp"
#include "cohrel/mcmc.hpp"

using namespace cohrel;

TEST(Mcmc, ConfigValidation) {
    EXPECT_NO_THROW(McmcConfig{}.validate());
    EXPECT_EQ(McmcConfig{}.kept(), 1000);
    EXPECT_EQ(McmcConfig::harddrive_preset().kept(), 1000);
    EXPECT_EQ(McmcConfig::masked_default().kept(), 1000);
    McmcConfig c;
    c.thin = 7;
    EXPECT_THROW(c.validate(), InputError);
    c = McmcConfig{};
    c.burn_in = c.iterations;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(Mcmc, GaussianTarget) {
    McmcConfig c;
    c.iterations = 50000;
    c.burn_in = 10000;
    c.thin = 1;
    c.seed = 17;
    c.initial_scale = 1.0;
    const auto chain = adaptive_mh([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); },
                                   Eigen::Vector2d(0.5, -0.5), c);
    ASSERT_EQ(chain.draws.rows(), 40000);
    const Eigen::RowVectorXd mean = chain.draws.colwise().mean();
    const Eigen::MatrixXd centered = chain.draws.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(chain.draws.rows() - 1);
    EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.05);
    EXPECT_LT((cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.1);
    EXPECT_GE(chain.post_adaptation_acceptance(), 0.1);
    EXPECT_LE(chain.post_adaptation_acceptance(), 0.6);
}

TEST(Mcmc, ConstantTargetAlwaysAccepts) {
    McmcConfig c;
    c.iterations = 3000;
    c.burn_in = 1000;
    c.thin = 1;
    const auto chain = adaptive_mh([](const Eigen::VectorXd&) { return 0.0; }, Eigen::Vector3d::Zero(), c);
    EXPECT_EQ(chain.acceptance_rate(), 1.0);
}

TEST(Mcmc, InfiniteStartIsRejected) {
    EXPECT_THROW(adaptive_mh([](const Eigen::VectorXd&) { return -INFINITY; }, Eigen::Vector2d::Zero(), McmcConfig{}),
                 PreconditionError);
}

TEST(Mcmc, Determinism) {
    McmcConfig c;
    c.iterations = 2000;
    c.burn_in = 1000;
    c.seed = 4;
    auto target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
    const auto a = adaptive_mh(target, Eigen::Vector2d::Zero(), c);
    const auto b = adaptive_mh(target, Eigen::Vector2d::Zero(), c);
    EXPECT_EQ(a.draws, b.draws);
}

TEST(Mcmc, TransformRoundTrip) {
    const double tmin = 2.0;
    for (const WeibullParams th : {WeibullParams{2, 10, 1}, WeibullParams{0.3, 800, 0.01}, WeibullParams{7, 0.5, 1.99}}) {
        const auto back = inverse_transform(transform_weibull(th, tmin), tmin);
        EXPECT_NEAR(back.beta, th.beta, 1e-12 * th.beta);
        EXPECT_NEAR(back.eta, th.eta, 1e-12 * th.eta);
        EXPECT_NEAR(back.mu, th.mu, 1e-12);
    }
}

TEST(Mcmc, JacobianMatchesFiniteDifferences) {
    const double tmin = 3.0;
    const Eigen::Vector3d v(0.4, 1.2, -0.7);
    Eigen::Matrix3d J;
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d a = v, b = v;
        a[k] += h;
        b[k] -= h;
        const auto pa = inverse_transform(a, tmin), pb = inverse_transform(b, tmin);
        J.col(k) << (pa.beta - pb.beta) / (2 * h), (pa.eta - pb.eta) / (2 * h), (pa.mu - pb.mu) / (2 * h);
    }
    const double fd = std::log(std::abs(J.determinant()));
    EXPECT_NEAR(log_jacobian(v, tmin), fd, 1e-5 * std::abs(fd));
}

TEST(Mcmc, LogitClamp) {
    const double tmin = 1.0;
    const auto th = inverse_transform(Eigen::Vector3d(0, 0, -100), tmin);
    EXPECT_GE(th.mu, 0.0);
    EXPECT_TRUE(std::isfinite(log_jacobian(Eigen::Vector3d(0, 0, -100), tmin)));
    EXPECT_FALSE(in_transform_domain(Eigen::Vector3d(0, 0, -31)));
    EXPECT_TRUE(in_transform_domain(Eigen::Vector3d(0, 0, 29)));
}

TEST(Mcmc, Hpd) {
    std::vector<double> u(10000);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (static_cast<double>(i) + 0.5) / 10000.0;
    const auto [lo, hi] = hpd_interval(u, 0.95);
    EXPECT_NEAR(hi - lo, 0.95, 0.02);

    const std::vector<double> flat(20, 3.0);
    const auto f = hpd_interval(flat, 0.95);
    EXPECT_EQ(f.first, f.second);

    const std::vector<double> pair{2.0, 1.0};
    EXPECT_EQ(hpd_interval(pair, 0.95), std::make_pair(1.0, 2.0));

    // skewed: the shortest window sits at the mode
    std::vector<double> sk;
    for (int i = 1; i <= 1000; ++i) sk.push_back(-std::log(i / 1001.0));
    EXPECT_LT(hpd_interval(sk, 0.9).first, 0.01);
}

TEST(Mcmc, SummaryStatistics) {
    const std::vector<double> x{4, 1, 3, 2};
    const auto s = summarize(x);
    EXPECT_EQ(s.min, 1);
    EXPECT_EQ(s.max, 4);
    EXPECT_DOUBLE_EQ(s.q1, 1.75);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.q3, 3.25);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.sd, std::sqrt(5.0 / 3.0));

    Eigen::MatrixXd m(4, 2);
    m << 4, 10, 1, 20, 3, 30, 2, 40;
    const auto d = diagnostics(m);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_DOUBLE_EQ(d[0].median, 2.5);
    EXPECT_DOUBLE_EQ(d[1].mean, 25.0);
    EXPECT_THROW(diagnostics(Eigen::MatrixXd(0, 2)), InputError);

    const std::vector<double> sorted{0, 10};
    EXPECT_DOUBLE_EQ(quantile_sorted(sorted, 0.3), 3.0);
}
