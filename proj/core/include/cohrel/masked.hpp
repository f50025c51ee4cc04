#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "cohrel/data.hpp"
#include "cohrel/mcmc.hpp"
#include "cohrel/weibull.hpp"

namespace cohrel {

struct RateConstraints {
    bool fix_lambda2_zero = false;
    bool fix_lambda3_zero = false;
    bool symmetric13 = false;  // lambda1 = lambda3

    void validate() const;  // symmetric13 with lambda3 fixed at 0 is refused
    bool admits(int branch) const;
};

// Probability that a component's status is masked, given it failed at t (1),
// was working at t (2) or had failed before t (3).
struct MaskingRates {
    double lambda1 = 0.5, lambda2 = 0.5, lambda3 = 0.5;
    double operator[](int branch) const { return branch == 1 ? lambda1 : branch == 2 ? lambda2 : lambda3; }
};

// One system seen from component j: delta in {1,2,3}, or 0 when masked.
struct MaskedObs {
    int id = 0;
    double t = 0.0;
    int delta = 0;
};

using MaskedRows = std::vector<MaskedObs>;

MaskedRows rows_for_component(const std::vector<MaskedRecord>& records, int j);

struct MaskedState {
    WeibullParams theta;
    MaskingRates rates;
    std::vector<int> latent;  // per row: branch 1..3 for masked rows, 0 otherwise
};

double log_likelihood_masked(const MaskedState& state, const MaskedRows& rows);

// p proportional to (lambda1 f(t), lambda2 R(t), lambda3 F(t)).
std::array<double, 3> latent_full_conditional(const WeibullParams& th, const MaskingRates& rates, double t);

struct BetaParams {
    double a = 1.0, b = 1.0;
    bool operator==(const BetaParams&) const = default;
};

// Systems where the component's status is known: failed at t, working, failed before.
struct KnownCounts {
    int n_f = 0, n_r = 0, n_l = 0;
};

KnownCounts known_counts(const MaskedRows& rows);
std::array<int, 3> latent_totals(const std::vector<int>& latent);

BetaParams lambda_full_conditional(int kind, const std::array<int, 3>& totals, const KnownCounts& known);
BetaParams pooled13_full_conditional(const std::array<int, 3>& totals, const KnownCounts& known);

struct GammaPriorSpec {
    double shape = 0.001;  // mean 1, variance 1000
    double rate = 0.001;
    double log_density(double x) const;
};

struct MaskedFit {
    PosteriorSample theta;
    Eigen::MatrixXd rates;         // kept draws x (lambda1, lambda2, lambda3)
    Eigen::MatrixXi latent_counts; // kept draws x (sum d1, sum d2, sum d3)
    RateConstraints constraints;
};

// Metropolis-within-Gibbs: latent branches, then one adaptive MH step for
// theta, then the rates from their Beta conditionals.
MaskedFit gibbs_fit(const MaskedRows& rows, const GammaPriorSpec& prior, const McmcConfig& config,
                    const RateConstraints& constraints);

}  // namespace cohrel
