#include "cohrel/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cohrel/errors.hpp"

namespace cohrel {

void McmcConfig::validate() const {
    if (iterations < 1 || burn_in < 0 || thin < 1) throw InputError("iterations and thin must be positive");
    if (burn_in >= iterations) throw InputError("burn-in must be smaller than the iteration count");
    if ((iterations - burn_in) % thin) throw InputError("iterations - burn-in must be a multiple of thin");
    if (!(initial_scale > 0)) throw InputError("initial proposal scale must be positive");
    if (adaptation_start < 0 || !(adaptation_epsilon >= 0)) throw InputError("bad adaptation settings");
}

AdaptiveMetropolis::AdaptiveMetropolis(int dim, double initial_scale, int adaptation_start, double epsilon)
    : dim_(dim),
      scale_(initial_scale),
      adaptation_start_(static_cast<std::size_t>(adaptation_start)),
      eps_(epsilon),
      mean_(Eigen::VectorXd::Zero(dim)),
      m2_(Eigen::MatrixXd::Zero(dim, dim)) {
    if (dim < 1) throw InputError("dimension must be positive");
}

void AdaptiveMetropolis::record(const Eigen::VectorXd& x) {
    ++seen_;
    const Eigen::VectorXd delta = x - mean_;
    mean_ += delta / static_cast<double>(seen_);
    m2_ += delta * (x - mean_).transpose();
}

bool AdaptiveMetropolis::step(const LogTarget& target, Eigen::VectorXd& x, double& logp, RandomStream& rs) {
    if (seen_ == 0) record(x);
    Eigen::VectorXd z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = normal_draw(0.0, 1.0, rs);

    Eigen::VectorXd proposal;
    if (steps_ >= adaptation_start_ && seen_ > 1) {
        Eigen::MatrixXd cov = m2_ / static_cast<double>(seen_ - 1);
        cov *= 2.38 * 2.38 / dim_;
        cov += eps_ * Eigen::MatrixXd::Identity(dim_, dim_);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success)
            proposal = x + llt.matrixL() * z;
        else
            proposal = x + scale_ * z;
    } else {
        proposal = x + scale_ * z;
    }
    ++steps_;

    const double lp = target(proposal);
    const double u = uniform(rs);
    bool accept = false;
    if (!std::isnan(lp) && lp > -std::numeric_limits<double>::infinity()) accept = std::log(u) < lp - logp;
    if (accept) {
        x = std::move(proposal);
        logp = lp;
    }
    record(x);
    return accept;
}

Chain adaptive_mh(const LogTarget& log_target, const Eigen::VectorXd& init, const McmcConfig& config) {
    config.validate();
    Eigen::VectorXd x = init;
    double logp = log_target(x);
    if (!std::isfinite(logp)) throw PreconditionError("log target is not finite at the initial point");
    RandomStream rs(config.seed, config.stream);
    AdaptiveMetropolis am(static_cast<int>(init.size()), config.initial_scale, config.adaptation_start,
                          config.adaptation_epsilon);
    Chain chain;
    chain.draws.resize(config.kept(), init.size());
    int row = 0;
    for (int it = 1; it <= config.iterations; ++it) {
        const bool adapting = am.adapting();
        const bool ok = am.step(log_target, x, logp, rs);
        ++chain.proposals;
        chain.accepted += ok;
        if (adapting) {
            ++chain.proposals_after_adaptation;
            chain.accepted_after_adaptation += ok;
        }
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) chain.draws.row(row++) = x.transpose();
    }
    return chain;
}

namespace {

double clamp30(double c) { return std::clamp(c, -30.0, 30.0); }

}  // namespace

Eigen::Vector3d transform_weibull(const WeibullParams& th, double t_min) {
    if (!(t_min > 0)) throw InputError("location bound must be positive");
    const double r = th.mu / t_min;
    return {std::log(th.beta), std::log(th.eta), clamp30(std::log(r) - std::log1p(-r))};
}

WeibullParams inverse_transform(const Eigen::Vector3d& v, double t_min) {
    const double c = clamp30(v[2]);
    return {std::exp(v[0]), std::exp(v[1]), t_min / (1.0 + std::exp(-c))};
}

double log_jacobian(const Eigen::Vector3d& v, double t_min) {
    const double c = clamp30(v[2]);
    // d mu / dc = t_min * sigma(c) * (1 - sigma(c))
    const double log_sig = -std::log1p(std::exp(-c));
    const double log_1msig = -std::log1p(std::exp(c));
    return v[0] + v[1] + std::log(t_min) + log_sig + log_1msig;
}

std::pair<double, double> hpd_interval(std::span<const double> samples, double level) {
    if (samples.empty()) throw InputError("HPD of an empty sample");
    if (!(level > 0 && level <= 1)) throw InputError("HPD level must lie in (0, 1]");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const auto n = s.size();
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::size_t best = 0;
    for (std::size_t i = 1; i + k <= n; ++i)
        if (s[i + k - 1] - s[i] < s[best + k - 1] - s[best]) best = i;
    return {s[best], s[best + k - 1]};
}

double quantile_sorted(std::span<const double> s, double p) {
    if (s.empty()) throw InputError("quantile of an empty sample");
    const double h = (static_cast<double>(s.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

ParamSummary summarize(std::span<const double> samples) {
    if (samples.empty()) throw InputError("summary of an empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    ParamSummary out;
    out.min = s.front();
    out.max = s.back();
    out.q1 = quantile_sorted(s, 0.25);
    out.median = quantile_sorted(s, 0.5);
    out.q3 = quantile_sorted(s, 0.75);
    out.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0.0;
    for (double x : s) ss += (x - out.mean) * (x - out.mean);
    out.sd = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
    return out;
}

std::vector<ParamSummary> diagnostics(const Eigen::MatrixXd& draws) {
    if (draws.rows() == 0) throw InputError("diagnostics of an empty chain");
    std::vector<ParamSummary> out;
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
        std::vector<double> col(draws.col(c).data(), draws.col(c).data() + draws.rows());
        out.push_back(summarize(col));
    }
    return out;
}

}  // namespace cohrel
