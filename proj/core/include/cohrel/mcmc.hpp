#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cohrel/numerics.hpp"
#include "cohrel/params.hpp"

namespace cohrel {

struct McmcConfig {
    int iterations = 20000;
    int burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    double initial_scale = 0.1;
    int adaptation_start = 1000;
    double adaptation_epsilon = 1e-10;

    void validate() const;  // throws InputError
    int kept() const { return (iterations - burn_in) / thin; }

    static McmcConfig weibull_default() { return {}; }
    static McmcConfig bridge_preset() { return {30000, 10000, 20}; }
    static McmcConfig masked_default() { return {30000, 10000, 20}; }
    static McmcConfig harddrive_preset() { return {35000, 5000, 30}; }
};

struct Chain {
    Eigen::MatrixXd draws;  // kept iterations x parameters
    std::size_t accepted = 0;
    std::size_t proposals = 0;
    std::size_t accepted_after_adaptation = 0;
    std::size_t proposals_after_adaptation = 0;

    double acceptance_rate() const { return proposals ? double(accepted) / double(proposals) : 0.0; }
    double post_adaptation_acceptance() const {
        return proposals_after_adaptation ? double(accepted_after_adaptation) / double(proposals_after_adaptation) : 0.0;
    }
};

using LogTarget = std::function<double(const Eigen::VectorXd&)>;

// Haario-style Gaussian random walk. Until adaptation_start steps have been
// taken the proposal is initial_scale^2 I; afterwards (2.38^2/d) Cov + eps I,
// with Cov the running covariance of every visited state.
class AdaptiveMetropolis {
public:
    AdaptiveMetropolis(int dim, double initial_scale, int adaptation_start, double epsilon);

    // One proposal. x and logp hold the current state and are updated in place.
    bool step(const LogTarget& target, Eigen::VectorXd& x, double& logp, RandomStream& rs);

    bool adapting() const noexcept { return steps_ >= adaptation_start_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    void record(const Eigen::VectorXd& x);

    int dim_;
    double scale_;
    std::size_t adaptation_start_;
    double eps_;
    std::size_t steps_ = 0, seen_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd m2_;
};

Chain adaptive_mh(const LogTarget& log_target, const Eigen::VectorXd& init, const McmcConfig& config);

// Unconstrained coordinates (log beta, log eta, logit(mu / t_min)).
Eigen::Vector3d transform_weibull(const WeibullParams& theta, double t_min);
// The logit coordinate is clamped to [-30, 30].
WeibullParams inverse_transform(const Eigen::Vector3d& v, double t_min);
// log |d theta / d v| at v (same clamp).
double log_jacobian(const Eigen::Vector3d& v, double t_min);
// Samplers treat |logit| > 30 as outside the support; the clamp would
// otherwise leave a flat, improper tail in that coordinate.
inline bool in_transform_domain(const Eigen::Vector3d& v) { return v[2] >= -30.0 && v[2] <= 30.0; }

// Shortest window holding ceil(level * n) sorted samples.
std::pair<double, double> hpd_interval(std::span<const double> samples, double level);

struct ParamSummary {
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0, sd = 0;
};

// Linear-interpolation quantile on sorted data (R type 7).
double quantile_sorted(std::span<const double> sorted, double p);
ParamSummary summarize(std::span<const double> samples);
std::vector<ParamSummary> diagnostics(const Eigen::MatrixXd& draws);

}  // namespace cohrel
