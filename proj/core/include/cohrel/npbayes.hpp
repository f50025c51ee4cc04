#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cohrel/data.hpp"
#include "cohrel/numerics.hpp"
#include "cohrel/structure.hpp"

namespace cohrel {

// Prior guess for a (pseudo-)component lifetime distribution.
struct DistributionGuess {
    std::string name;
    std::function<double(double)> cdf;
    std::function<double(double)> pdf;
    bool degenerate = false;  // no mass on (0, inf): never fails, or fails at 0
};

DistributionGuess exponential_guess(double mean);
DistributionGuess weibull_guess(double shape, double scale);
DistributionGuess gamma_guess(double shape, double scale);
DistributionGuess lognormal_guess(double mu, double sigma);
DistributionGuess never_fails_guess();
DistributionGuess fails_at_zero_guess();
// "exp:1.0", "weibull:2:3", "gamma:2:1.5", "lognormal:0:0.5"
DistributionGuess parse_guess(const std::string& spec);

// Finite measure on (0, inf) with a continuous density, tabulated on knots
// so cumulative and tail values stay accurate at both ends.
class PriorMeasure {
public:
    PriorMeasure();  // zero measure
    static PriorMeasure from_density(std::function<double(double)> density, double cutoff, int knots = 512,
                                     int panels = 32);

    double cumulative(double t) const;  // alpha(0, t]
    double tail(double t) const;        // alpha(t, inf)
    double density(double t) const;
    double total_mass() const noexcept { return total_; }
    PriorMeasure scaled(double factor) const;

private:
    std::function<double(double)> density_;
    double h_ = 0.0, cutoff_ = 0.0, scale_ = 1.0, total_ = 0.0;
    int panels_ = 32;
    std::vector<double> head_, suffix_;  // head_[k] = mass on (0, knot k], suffix_[k] = mass beyond knot k
};

using PriorTriple = std::array<PriorMeasure, 3>;

// Sub-distribution prior measures implied by independent guesses for
// X1, X2, X3 in min(X1, max(X2, X3)) or max(X1, min(X2, X3)).
PriorTriple prior_measures_from_guess(const DistributionGuess& f1, const DistributionGuess& f2,
                                      const DistributionGuess& f3, TwoLevelKind kind, int panels = 32);

struct CauseRecord {
    double t = 0.0;
    int cause = 0;  // canonical slot 1..3
};

double empirical_subdist(const std::vector<CauseRecord>& records, int j, double t);

class SubDistSet {
public:
    SubDistSet(PriorTriple prior, std::vector<CauseRecord> data);

    int n() const noexcept { return static_cast<int>(data_.size()); }
    double prior_total() const noexcept { return total_; }
    const PriorMeasure& prior(int j) const { return prior_.at(static_cast<std::size_t>(j - 1)); }
    double prior_cumulative(double t) const;  // sum_j alpha_j(0, t]
    double prior_tail(double t) const;        // sum_j alpha_j(t, inf)

    // Distinct order statistics with N_i = #{T < T_i} and d_ji = #{T = T_i, cause j}.
    const std::vector<double>& order_stats() const noexcept { return order_; }
    int before(std::size_t i) const { return before_[i]; }
    int ties(int j, std::size_t i) const { return d_[static_cast<std::size_t>(j - 1)][i]; }
    int count(int j) const { return counts_[static_cast<std::size_t>(j - 1)]; }

    double subdist(int j, double t) const;  // posterior mean of F_j*
    double system_df(double t) const;
    double rho_hat(int j) const;

private:
    PriorTriple prior_;
    std::vector<CauseRecord> data_;
    double total_ = 0.0;
    std::vector<double> order_;
    std::vector<int> before_;
    std::array<std::vector<int>, 3> d_;
    std::array<int, 3> counts_{};
};

SubDistSet posterior_subdist(PriorTriple prior, std::vector<CauseRecord> data);
double system_df(const SubDistSet& sub, double t);
double rho_hat(const SubDistSet& sub, int j);

struct CurveEstimate {
    std::vector<double> t;
    std::vector<double> values;
};

struct EstimatorOptions {
    int grid_points = 256;
    int panels = kDefaultPanels;
    std::optional<double> t_max;  // range when n = 0; with data the range is (0, T_(n)]
    double guard = 1e-12;
};

CurveEstimate estimate_F1_sps(const SubDistSet& sub, const EstimatorOptions& opt = {});
CurveEstimate estimate_F2_sps(const SubDistSet& sub, int target_slot, const EstimatorOptions& opt = {});
CurveEstimate estimate_F1_pss(const SubDistSet& sub, const EstimatorOptions& opt = {});
CurveEstimate estimate_F2_pss(const SubDistSet& sub, int target_slot, const EstimatorOptions& opt = {});

struct ComponentEstimate {
    CurveEstimate curve;
    double rho_hat = 0.0;
    ThreeComponentView view;
};

// Guesses are for the canonical slots X1, X2, X3 of whichever view applies.
ComponentEstimate estimate_component(const StructureExpr& expr, const std::vector<SystemRecord>& records,
                                     const std::array<DistributionGuess, 3>& guesses, ComponentId target,
                                     const EstimatorOptions& opt = {});

// Picks the view estimate_component would use.
ThreeComponentView select_view(const StructureExpr& expr, ComponentId target);

enum class PairKind { Series, Parallel };

// Two components, causes 1 or 2; the absent third slot carries no mass.
CurveEstimate estimate_two_component(const std::vector<CauseRecord>& records, PairKind kind, int j,
                                     const std::array<DistributionGuess, 2>& guesses, double prior_mass = 1.0,
                                     const EstimatorOptions& opt = {});

}  // namespace cohrel
