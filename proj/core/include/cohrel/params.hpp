#pragma once

namespace cohrel {

// Three-parameter Weibull: R(t) = exp(-((t - mu) / eta)^beta) for t > mu.
struct WeibullParams {
    double beta = 1.0;
    double eta = 1.0;
    double mu = 0.0;
    bool operator==(const WeibullParams&) const = default;
};

}  // namespace cohrel
