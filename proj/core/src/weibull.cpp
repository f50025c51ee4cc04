#include "cohrel/weibull.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "cohrel/errors.hpp"

namespace cohrel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool bad_params(const WeibullParams& th) { return !(th.beta > 0) || !(th.eta > 0) || !(th.mu >= 0); }

// ((t - mu) / eta)^beta, 0 for t <= mu
double cum_hazard(double t, const WeibullParams& th) {
    if (t <= th.mu) return 0.0;
    if (std::isinf(t)) return std::numeric_limits<double>::infinity();
    return std::pow((t - th.mu) / th.eta, th.beta);
}

}  // namespace

double reliability(double t, const WeibullParams& th) { return std::exp(-cum_hazard(t, th)); }

double log_reliability(double t, const WeibullParams& th) { return -cum_hazard(t, th); }

double log_cdf(double t, const WeibullParams& th) {
    const double z = cum_hazard(t, th);
    if (z == 0.0) return kNegInf;
    return std::log(-std::expm1(-z));
}

double log_density(double t, const WeibullParams& th) {
    if (t <= th.mu) return kNegInf;
    const double z = (t - th.mu) / th.eta;
    return std::log(th.beta / th.eta) + (th.beta - 1) * std::log(z) - std::pow(z, th.beta);
}

double density(double t, const WeibullParams& th) {
    if (t <= th.mu) return 0.0;
    return std::exp(log_density(t, th));
}

double log_likelihood(const WeibullParams& th, std::span<const ObsInterval> rows) {
    if (bad_params(th)) return kNegInf;
    double ll = 0.0;
    for (const auto& r : rows) {
        if (r.l == r.u) {
            if (r.l - th.mu <= 1e-12) return kNegInf;
            ll += log_density(r.l, th);
        } else if (std::isinf(r.u)) {
            ll += log_reliability(r.l, th);
        } else if (r.l == 0.0) {
            ll += log_cdf(r.u, th);
        } else {
            // log(R(l) - R(u)) = log R(l) + log(1 - exp(log R(u) - log R(l)))
            const double a = log_reliability(r.l, th), b = log_reliability(r.u, th);
            if (!(b < a)) return kNegInf;
            ll += a + std::log(-std::expm1(b - a));
        }
        if (std::isnan(ll) || ll == kNegInf) return kNegInf;
    }
    return ll;
}

double reference_log_prior(const WeibullParams& th) {
    if (bad_params(th)) return kNegInf;
    return -std::log(th.eta) - std::log(th.beta);
}

double log_posterior(const WeibullParams& th, std::span<const ObsInterval> rows) {
    const double lp = reference_log_prior(th);
    if (lp == kNegInf) return kNegInf;
    return log_likelihood(th, rows) + lp;
}

double location_bound(std::span<const ObsInterval> rows) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.l > 0 && std::isfinite(r.l)) t = std::min(t, r.l);
        if (r.u > 0 && std::isfinite(r.u)) t = std::min(t, r.u);
    }
    if (!std::isfinite(t)) throw PreconditionError("no row carries information about the component");
    return t;
}

PosteriorSample fit(std::span<const ObsInterval> rows, const McmcConfig& config, const LogPrior& prior) {
    config.validate();
    if (rows.size() < 2) throw PreconditionError("posterior is improper with fewer than two systems");
    for (const auto& r : rows)
        if (!(r.l >= 0) || !(r.u >= r.l)) throw InputError("invalid interval in the data");
    const double t_min = location_bound(rows);

    auto target = [&](const Eigen::VectorXd& v) {
        const Eigen::Vector3d w = v;
        if (!in_transform_domain(w)) return kNegInf;
        const WeibullParams th = inverse_transform(w, t_min);
        const double lp = prior(th);
        if (lp == kNegInf) return kNegInf;
        const double ll = log_likelihood(th, rows);
        if (ll == kNegInf) return kNegInf;
        return ll + lp + log_jacobian(w, t_min);
    };

    double scale_sum = 0.0;
    int scale_n = 0;
    for (const auto& r : rows) {
        const double v = std::isfinite(r.u) ? r.u : r.l;
        if (v > 0) scale_sum += v, ++scale_n;
    }
    WeibullParams init{1.0, scale_sum / scale_n, 0.5 * t_min};
    Eigen::VectorXd x = transform_weibull(init, t_min);
    if (!std::isfinite(target(x))) {
        init.mu = 1e-6 * t_min;
        x = transform_weibull(init, t_min);
    }
    if (!std::isfinite(target(x))) throw PreconditionError("no finite starting point for the sampler");

    const Chain chain = adaptive_mh(target, x, config);
    PosteriorSample out;
    out.config = config;
    out.acceptance_rate = chain.acceptance_rate();
    out.t_min = t_min;
    out.draws.reserve(static_cast<std::size_t>(chain.draws.rows()));
    for (Eigen::Index i = 0; i < chain.draws.rows(); ++i)
        out.draws.push_back(inverse_transform(chain.draws.row(i).transpose(), t_min));
    return out;
}

std::vector<double> reliability_draws(const PosteriorSample& sample, double t) {
    std::vector<double> r;
    r.reserve(sample.draws.size());
    for (const auto& th : sample.draws) r.push_back(reliability(t, th));
    return r;
}

ReliabilityBand reliability_curve(const PosteriorSample& sample, std::span<const double> grid, double level) {
    if (sample.draws.empty()) throw InputError("empty posterior sample");
    ReliabilityBand b;
    for (double t : grid) {
        const auto r = reliability_draws(sample, t);
        const auto [lo, hi] = hpd_interval(r, level);
        b.t.push_back(t);
        b.mean.push_back(std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size()));
        b.lo.push_back(lo);
        b.hi.push_back(hi);
    }
    return b;
}

}  // namespace cohrel
