#include "cohrel/masked.hpp"

#include <cmath>
#include <limits>

#include "cohrel/errors.hpp"

namespace cohrel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double branch_loglik(int branch, double t, const WeibullParams& th) {
    switch (branch) {
        case 1: return t - th.mu <= 1e-12 ? kNegInf : log_density(t, th);
        case 2: return log_reliability(t, th);
        case 3: return log_cdf(t, th);
    }
    throw InputError("branch must be 1, 2 or 3");
}

double safe_log(double x) { return x > 0 ? std::log(x) : kNegInf; }

}  // namespace

void RateConstraints::validate() const {
    if (symmetric13 && fix_lambda3_zero) throw InputError("lambda1 = lambda3 cannot be combined with lambda3 = 0");
}

bool RateConstraints::admits(int branch) const {
    if (branch == 2) return !fix_lambda2_zero;
    if (branch == 3) return !fix_lambda3_zero;
    return true;
}

MaskedRows rows_for_component(const std::vector<MaskedRecord>& records, int j) {
    MaskedRows rows;
    for (const auto& r : records) {
        if (j < 1 || static_cast<std::size_t>(j) > r.delta.size()) throw DimensionError("component out of range");
        const auto k = static_cast<std::size_t>(j - 1);
        MaskedObs o{r.id, r.t, 0};
        if (r.upsilon[k] == 0) {
            if (!r.delta[k]) throw InputError("record " + std::to_string(r.id) + " has no status for component " +
                                              std::to_string(j));
            o.delta = *r.delta[k];
        } else if (r.mask_set().empty()) {
            throw InputError("record " + std::to_string(r.id) + " masks a single component");
        }
        rows.push_back(o);
    }
    return rows;
}

double log_likelihood_masked(const MaskedState& s, const MaskedRows& rows) {
    double ll = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.delta) {
            ll += branch_loglik(r.delta, r.t, s.theta) + safe_log(1.0 - s.rates[r.delta]);
        } else {
            const int b = s.latent.at(i);
            ll += branch_loglik(b, r.t, s.theta) + safe_log(s.rates[b]);
        }
        if (ll == kNegInf || std::isnan(ll)) return kNegInf;
    }
    return ll;
}

std::array<double, 3> latent_full_conditional(const WeibullParams& th, const MaskingRates& rates, double t) {
    const double f = density(t, th);
    const double R = reliability(t, th);
    const double F = -std::expm1(log_reliability(t, th));
    std::array<double, 3> p{rates.lambda1 * f, rates.lambda2 * R, rates.lambda3 * F};
    const double C = p[0] + p[1] + p[2];
    if (!(C > 0) || !std::isfinite(C)) throw DegenerateMaskError("every admissible branch has zero weight");
    for (auto& x : p) x /= C;
    // absorb rounding so the triple sums to one
    const double rest = 1.0 - (p[0] + p[1] + p[2]);
    for (auto& x : p)
        if (x > 0) {
            x += rest;
            break;
        }
    return p;
}

KnownCounts known_counts(const MaskedRows& rows) {
    KnownCounts k;
    for (const auto& r : rows) {
        if (r.delta == 1) ++k.n_f;
        if (r.delta == 2) ++k.n_r;
        if (r.delta == 3) ++k.n_l;
    }
    return k;
}

std::array<int, 3> latent_totals(const std::vector<int>& latent) {
    std::array<int, 3> t{};
    for (int b : latent)
        if (b >= 1 && b <= 3) ++t[static_cast<std::size_t>(b - 1)];
    return t;
}

BetaParams lambda_full_conditional(int kind, const std::array<int, 3>& totals, const KnownCounts& known) {
    switch (kind) {
        case 1: return {totals[0] + 1.0, known.n_f + 1.0};
        case 2: return {totals[1] + 1.0, known.n_r + 1.0};
        case 3: return {totals[2] + 1.0, known.n_l + 1.0};
    }
    throw InputError("rate kind must be 1, 2 or 3");
}

BetaParams pooled13_full_conditional(const std::array<int, 3>& totals, const KnownCounts& known) {
    return {totals[0] + totals[2] + 1.0, known.n_f + known.n_l + 1.0};
}

double GammaPriorSpec::log_density(double x) const {
    if (!(x > 0)) return kNegInf;
    return (shape - 1) * std::log(x) - rate * x;
}

MaskedFit gibbs_fit(const MaskedRows& rows, const GammaPriorSpec& prior, const McmcConfig& config,
                    const RateConstraints& cons) {
    config.validate();
    cons.validate();
    if (!(prior.shape > 0) || !(prior.rate > 0)) throw InputError("gamma prior needs positive shape and rate");
    if (rows.size() < 2) throw PreconditionError("need at least two systems");

    double t_min = std::numeric_limits<double>::infinity(), t_sum = 0.0;
    for (const auto& r : rows) {
        if (!(r.t > 0) || !std::isfinite(r.t)) throw InputError("system times must be positive");
        if (r.delta < 0 || r.delta > 3) throw InputError("status must be 1, 2, 3 or masked");
        t_min = std::min(t_min, r.t);
        t_sum += r.t;
    }
    const KnownCounts known = known_counts(rows);
    RandomStream rs(config.seed, config.stream);

    std::vector<int> admissible;
    for (int b = 1; b <= 3; ++b)
        if (cons.admits(b)) admissible.push_back(b);

    MaskedState st;
    st.theta = {1.0, t_sum / static_cast<double>(rows.size()), 0.5 * t_min};
    st.rates = {0.5, cons.fix_lambda2_zero ? 0.0 : 0.5, cons.fix_lambda3_zero ? 0.0 : 0.5};
    st.latent.assign(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].delta)
            st.latent[i] = admissible[static_cast<std::size_t>(uniform(rs) * static_cast<double>(admissible.size()))];

    auto theta_target = [&](const Eigen::VectorXd& v) {
        const Eigen::Vector3d w = v;
        if (!in_transform_domain(w)) return kNegInf;
        const WeibullParams th = inverse_transform(w, t_min);
        double lp = prior.log_density(th.beta) + prior.log_density(th.eta) + prior.log_density(th.mu);
        if (lp == kNegInf) return kNegInf;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            lp += branch_loglik(rows[i].delta ? rows[i].delta : st.latent[i], rows[i].t, th);
            if (lp == kNegInf || std::isnan(lp)) return kNegInf;
        }
        return lp + log_jacobian(w, t_min);
    };

    Eigen::VectorXd x = transform_weibull(st.theta, t_min);
    AdaptiveMetropolis am(3, config.initial_scale, config.adaptation_start, config.adaptation_epsilon);

    MaskedFit out;
    out.constraints = cons;
    out.theta.config = config;
    out.theta.t_min = t_min;
    out.rates.resize(config.kept(), 3);
    out.latent_counts.resize(config.kept(), 3);
    std::size_t accepted = 0;
    int row = 0;
    for (int it = 1; it <= config.iterations; ++it) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].delta) continue;
            std::array<double, 3> p;
            try {
                p = latent_full_conditional(st.theta, st.rates, rows[i].t);
            } catch (const DegenerateMaskError&) {
                throw DegenerateMaskError("masked row " + std::to_string(rows[i].id) +
                                          " has zero weight on every admissible branch");
            }
            st.latent[i] = static_cast<int>(multinomial_draw(p, rs)) + 1;
        }

        double logp = theta_target(x);  // latents changed, so re-evaluate the current point
        if (!std::isfinite(logp)) throw NumericError("theta left the support after a latent update");
        accepted += am.step(theta_target, x, logp, rs);
        st.theta = inverse_transform(x, t_min);

        const auto totals = latent_totals(st.latent);
        if (cons.symmetric13) {
            const auto bp = pooled13_full_conditional(totals, known);
            st.rates.lambda1 = st.rates.lambda3 = beta_draw(bp.a, bp.b, rs);
        } else {
            const auto b1 = lambda_full_conditional(1, totals, known);
            st.rates.lambda1 = beta_draw(b1.a, b1.b, rs);
            if (!cons.fix_lambda3_zero) {
                const auto b3 = lambda_full_conditional(3, totals, known);
                st.rates.lambda3 = beta_draw(b3.a, b3.b, rs);
            }
        }
        if (!cons.fix_lambda2_zero) {
            const auto b2 = lambda_full_conditional(2, totals, known);
            st.rates.lambda2 = beta_draw(b2.a, b2.b, rs);
        }

        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) {
            out.theta.draws.push_back(st.theta);
            out.rates.row(row) << st.rates.lambda1, st.rates.lambda2, st.rates.lambda3;
            out.latent_counts.row(row) << totals[0], totals[1], totals[2];
            ++row;
        }
    }
    out.theta.acceptance_rate = static_cast<double>(accepted) / config.iterations;
    return out;
}

}  // namespace cohrel
