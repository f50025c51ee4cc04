#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohrel/data.hpp"
#include "cohrel/numerics.hpp"
#include "cohrel/structure.hpp"

namespace cohrel {

enum class Family { Weibull2, Weibull3, Gamma, LogNormal, ExpDiscreteMixture };

// Native parameters:
//   Weibull2/3  a = beta, b = eta, c = mu (0 for Weibull2)
//   Gamma       a = shape, b = scale
//   LogNormal   a = mean of log, b = sd of log
//   mixture     0.6 Exp(mean 4) + 0.25 at 1 + 0.15 at 3; no parameters
struct ComponentDistSpec {
    Family family = Family::Weibull2;
    double a = 1.0, b = 1.0, c = 0.0;

    static ComponentDistSpec weibull(double beta, double eta, double mu = 0.0);
    static ComponentDistSpec gamma(double shape, double scale);
    static ComponentDistSpec lognormal(double meanlog, double sdlog);
    static ComponentDistSpec mixture();
    // Moment matching. Weibull3 keeps the given location and matches the
    // remaining mean; other families ignore it. Throws InputError if infeasible.
    static ComponentDistSpec from_moments(Family family, double mean, double sd, double location = 0.0);

    void validate() const;
    double cdf(double t) const;
    double mean() const;
    double sample(RandomStream& rs) const;
    std::string to_string() const;
};

// "weibull:2,10", "weibull:2,10,1", "gamma:2,2", "lognormal:1.6,0.45",
// "mixture", or moment form "gamma:mean=4,sd=2.83" (weibull adds ",mu=...").
ComponentDistSpec parse_dist_spec(const std::string& text);

// n x m, row i holds the component times of system i.
Eigen::MatrixXd draw_component_times(const std::vector<ComponentDistSpec>& specs, int n, RandomStream& rs);

struct Observation {
    std::vector<SystemRecord> systems;
    ComponentDataset components;
    std::vector<std::vector<CensorKind>> statuses;
};

// ids are 1..n.
Observation observe(const StructureExpr& expr, const Eigen::MatrixXd& times);

struct MaskingSpec {
    double p = 0.0;
};

// Each system is masked with probability p. The candidate set is the union of
// minimal cut sets that contain the cause and have fully failed by T; other
// components keep their true status.
std::vector<MaskedRecord> apply_masking(const StructureExpr& expr, const std::vector<SystemRecord>& systems,
                                        const std::vector<std::vector<CensorKind>>& statuses,
                                        const MaskingSpec& spec, RandomStream& rs);

}  // namespace cohrel
