#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cohrel/data.hpp"
#include "cohrel/mcmc.hpp"
#include "cohrel/params.hpp"

namespace cohrel {

double reliability(double t, const WeibullParams& th);
double density(double t, const WeibullParams& th);
double log_density(double t, const WeibullParams& th);
double log_reliability(double t, const WeibullParams& th);
// log(1 - R(t)), accurate when R is close to 1
double log_cdf(double t, const WeibullParams& th);

// Exact rows add log f(l); others add log(R(l) - R(u)). Never throws on an
// impossible parameter: returns -inf instead.
double log_likelihood(const WeibullParams& th, std::span<const ObsInterval> rows);

using LogPrior = std::function<double(const WeibullParams&)>;

// pi(beta, eta, mu) proportional to 1 / (eta beta)
double reference_log_prior(const WeibullParams& th);
double log_posterior(const WeibullParams& th, std::span<const ObsInterval> rows);

// Upper bound for the location: the smallest positive finite endpoint, i.e.
// the earliest system time in the data. Throws PreconditionError if none.
double location_bound(std::span<const ObsInterval> rows);

struct PosteriorSample {
    std::vector<WeibullParams> draws;
    McmcConfig config;
    double acceptance_rate = 0.0;
    double t_min = 0.0;
};

// Adaptive MH in (log beta, log eta, logit(mu / t_min)). Needs at least two
// rows and one that carries information.
PosteriorSample fit(std::span<const ObsInterval> rows, const McmcConfig& config,
                    const LogPrior& prior = reference_log_prior);

struct ReliabilityBand {
    std::vector<double> t, mean, lo, hi;
};

ReliabilityBand reliability_curve(const PosteriorSample& sample, std::span<const double> grid, double level = 0.95);
std::vector<double> reliability_draws(const PosteriorSample& sample, double t);

}  // namespace cohrel
