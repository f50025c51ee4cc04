#include "cohrel/simulate.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/tools/roots.hpp>

#include "cohrel/errors.hpp"

namespace cohrel {

namespace {

double weibull_cv(double beta) {
    const double g1 = std::tgamma(1 + 1 / beta);
    const double g2 = std::tgamma(1 + 2 / beta);
    return std::sqrt(g2 / (g1 * g1) - 1);
}

double to_double(const std::string& s, const std::string& ctx) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw InputError("bad number '" + s + "' in " + ctx);
    return v;
}

}  // namespace

ComponentDistSpec ComponentDistSpec::weibull(double beta, double eta, double mu) {
    ComponentDistSpec s{mu == 0.0 ? Family::Weibull2 : Family::Weibull3, beta, eta, mu};
    s.validate();
    return s;
}

ComponentDistSpec ComponentDistSpec::gamma(double shape, double scale) {
    ComponentDistSpec s{Family::Gamma, shape, scale, 0.0};
    s.validate();
    return s;
}

ComponentDistSpec ComponentDistSpec::lognormal(double meanlog, double sdlog) {
    ComponentDistSpec s{Family::LogNormal, meanlog, sdlog, 0.0};
    s.validate();
    return s;
}

ComponentDistSpec ComponentDistSpec::mixture() { return {Family::ExpDiscreteMixture, 0, 0, 0}; }

ComponentDistSpec ComponentDistSpec::from_moments(Family family, double mean, double sd, double location) {
    if (!(sd > 0) || !std::isfinite(sd) || !std::isfinite(mean)) throw InputError("moment match needs sd > 0");
    const double var = sd * sd;
    switch (family) {
        case Family::Gamma:
            if (!(mean > 0)) throw InputError("gamma mean must be positive");
            return gamma(mean * mean / var, var / mean);
        case Family::LogNormal: {
            if (!(mean > 0)) throw InputError("lognormal mean must be positive");
            const double s2 = std::log1p(var / (mean * mean));
            return lognormal(std::log(mean) - s2 / 2, std::sqrt(s2));
        }
        case Family::Weibull2:
        case Family::Weibull3: {
            const double mu = family == Family::Weibull2 ? 0.0 : location;
            const double m = mean - mu;
            if (!(m > 0) || mu < 0) throw InputError("weibull mean must exceed the location");
            const double cv = sd / m;
            // CV decreases in beta; bracket it before solving
            double lo = 0.05, hi = 500.0;
            if (cv > weibull_cv(lo) || cv < weibull_cv(hi)) throw InputError("coefficient of variation out of range");
            auto f = [cv](double b) { return weibull_cv(b) - cv; };
            boost::math::tools::eps_tolerance<double> tol(40);
            std::uintmax_t iters = 200;
            auto [b0, b1] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
            const double beta = 0.5 * (b0 + b1);
            ComponentDistSpec s{mu == 0.0 ? Family::Weibull2 : Family::Weibull3, beta,
                                m / std::tgamma(1 + 1 / beta), mu};
            s.validate();
            return s;
        }
        case Family::ExpDiscreteMixture:
            break;
    }
    throw InputError("the mixture family has fixed parameters");
}

void ComponentDistSpec::validate() const {
    switch (family) {
        case Family::Weibull2:
        case Family::Weibull3:
            if (!(a > 0) || !(b > 0) || !(c >= 0) || !std::isfinite(a * b * (1 + c)))
                throw InputError("weibull needs beta, eta > 0 and mu >= 0");
            return;
        case Family::Gamma:
            if (!(a > 0) || !(b > 0) || !std::isfinite(a * b)) throw InputError("gamma needs shape, scale > 0");
            return;
        case Family::LogNormal:
            if (!(b > 0) || !std::isfinite(a) || !std::isfinite(b)) throw InputError("lognormal needs sdlog > 0");
            return;
        case Family::ExpDiscreteMixture:
            return;
    }
}

double ComponentDistSpec::cdf(double t) const {
    if (!(t > 0)) return 0.0;
    switch (family) {
        case Family::Weibull2:
        case Family::Weibull3:
            return t <= c ? 0.0 : -std::expm1(-std::pow((t - c) / b, a));
        case Family::Gamma:
            return boost::math::cdf(boost::math::gamma_distribution<double>(a, b), t);
        case Family::LogNormal:
            return boost::math::cdf(boost::math::lognormal_distribution<double>(a, b), t);
        case Family::ExpDiscreteMixture:
            return 0.6 * -std::expm1(-t / 4) + (t >= 1 ? 0.25 : 0.0) + (t >= 3 ? 0.15 : 0.0);
    }
    return 0.0;
}

double ComponentDistSpec::mean() const {
    switch (family) {
        case Family::Weibull2:
        case Family::Weibull3: return c + b * std::tgamma(1 + 1 / a);
        case Family::Gamma: return a * b;
        case Family::LogNormal: return std::exp(a + b * b / 2);
        case Family::ExpDiscreteMixture: return 0.6 * 4 + 0.25 * 1 + 0.15 * 3;
    }
    return 0.0;
}

double ComponentDistSpec::sample(RandomStream& rs) const {
    switch (family) {
        case Family::Weibull2:
        case Family::Weibull3:
            return c + b * std::pow(-std::log1p(-uniform(rs)), 1 / a);
        case Family::Gamma:
            return gamma_draw(a, 1 / b, rs);
        case Family::LogNormal:
            return std::exp(normal_draw(a, b, rs));
        case Family::ExpDiscreteMixture: {
            const double u = uniform(rs);
            if (u < 0.25) return 1.0;
            if (u < 0.40) return 3.0;
            return -4.0 * std::log1p(-uniform(rs));
        }
    }
    return 0.0;
}

std::string ComponentDistSpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (family) {
        case Family::Weibull2: os << "weibull:" << a << ',' << b; break;
        case Family::Weibull3: os << "weibull:" << a << ',' << b << ',' << c; break;
        case Family::Gamma: os << "gamma:" << a << ',' << b; break;
        case Family::LogNormal: os << "lognormal:" << a << ',' << b; break;
        case Family::ExpDiscreteMixture: os << "mixture"; break;
    }
    return os.str();
}

ComponentDistSpec parse_dist_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "mixture") {
        if (colon != std::string::npos) throw InputError("mixture takes no parameters");
        return ComponentDistSpec::mixture();
    }
    if (colon == std::string::npos) throw InputError("distribution '" + text + "' needs parameters");
    Family fam;
    if (name == "weibull") fam = Family::Weibull2;
    else if (name == "gamma") fam = Family::Gamma;
    else if (name == "lognormal") fam = Family::LogNormal;
    else throw InputError("unknown distribution family '" + name + "'");

    std::vector<double> pos;
    std::map<std::string, double> named;
    std::stringstream ss(text.substr(colon + 1));
    for (std::string tok; std::getline(ss, tok, ',');) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) pos.push_back(to_double(tok, text));
        else named[tok.substr(0, eq)] = to_double(tok.substr(eq + 1), text);
    }
    if (!pos.empty() && !named.empty()) throw InputError("mix of positional and named parameters in '" + text + "'");

    if (!named.empty()) {
        if (!named.contains("mean") || !named.contains("sd")) throw InputError("moment form needs mean= and sd=");
        double mu = 0.0;
        if (auto it = named.find("mu"); it != named.end()) {
            if (fam != Family::Weibull2) throw InputError("mu= applies to weibull only");
            mu = it->second;
            if (mu != 0.0) fam = Family::Weibull3;
        }
        if (named.size() != (named.contains("mu") ? 3u : 2u)) throw InputError("unknown key in '" + text + "'");
        return ComponentDistSpec::from_moments(fam, named["mean"], named["sd"], mu);
    }
    if (fam == Family::Weibull2) {
        if (pos.size() == 2) return ComponentDistSpec::weibull(pos[0], pos[1]);
        if (pos.size() == 3) return ComponentDistSpec::weibull(pos[0], pos[1], pos[2]);
    } else if (pos.size() == 2) {
        return fam == Family::Gamma ? ComponentDistSpec::gamma(pos[0], pos[1])
                                    : ComponentDistSpec::lognormal(pos[0], pos[1]);
    }
    throw InputError("wrong parameter count in '" + text + "'");
}

Eigen::MatrixXd draw_component_times(const std::vector<ComponentDistSpec>& specs, int n, RandomStream& rs) {
    if (n < 0) throw InputError("n must be non-negative");
    if (specs.empty()) throw InputError("no component distributions");
    for (const auto& s : specs) s.validate();
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(specs.size()));
    for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < specs.size(); ++j) x(i, static_cast<Eigen::Index>(j)) = specs[j].sample(rs);
    return x;
}

Observation observe(const StructureExpr& expr, const Eigen::MatrixXd& times) {
    const int m = expr.component_count();
    if (times.cols() != m) throw DimensionError("times matrix has the wrong number of columns");
    Observation ob;
    ob.components.m = m;
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < times.rows(); ++i) {
        for (int j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] = times(i, j);
        const int id = static_cast<int>(i) + 1;
        const double T = lifetime(expr, row);
        const int cause = failure_cause(expr, row).value;
        auto st = component_statuses(expr, row);
        std::vector<ObsInterval> iv;
        for (auto k : st)
            iv.push_back(k == CensorKind::Exact ? ObsInterval::exact(T)
                         : k == CensorKind::Right ? ObsInterval::right(T)
                                                  : ObsInterval::left(T));
        ob.systems.push_back({id, T, cause});
        ob.components.ids.push_back(id);
        ob.components.rows.push_back(std::move(iv));
        ob.statuses.push_back(std::move(st));
    }
    return ob;
}

std::vector<MaskedRecord> apply_masking(const StructureExpr& expr, const std::vector<SystemRecord>& systems,
                                        const std::vector<std::vector<CensorKind>>& statuses,
                                        const MaskingSpec& spec, RandomStream& rs) {
    if (!(spec.p >= 0 && spec.p <= 1)) throw InputError("masking proportion must lie in [0, 1]");
    if (systems.size() != statuses.size()) throw DimensionError("systems and statuses differ in length");
    const int m = expr.component_count();
    const SetFamily cuts = minimal_cut_sets(expr);

    std::vector<MaskedRecord> out;
    out.reserve(systems.size());
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const auto& st = statuses[i];
        if (static_cast<int>(st.size()) != m) throw DimensionError("status row has the wrong length");
        MaskedRecord r{systems[i].id, systems[i].t, {}, std::vector<int>(static_cast<std::size_t>(m), 0)};
        for (auto k : st) {
            if (k == CensorKind::Interval) throw InputError("interval status cannot be masked");
            r.delta.emplace_back(k == CensorKind::Exact ? 1 : k == CensorKind::Right ? 2 : 3);
        }
        // draw for every system so the stream does not depend on the outcome
        const bool mask = uniform(rs) < spec.p;
        if (mask) {
            const ComponentId cause{systems[i].delta};
            ComponentSet s;
            for (const auto& cut : cuts) {
                if (!cut.contains(cause)) continue;
                bool failed = true;
                for (auto c : cut) failed = failed && st[c.index()] != CensorKind::Right;
                if (failed) s.insert(cut.begin(), cut.end());
            }
            if (s.empty()) throw NumericError("no failed cut set holds the cause of system " + std::to_string(r.id));
            if (s.size() > 1)
                for (auto c : s) {
                    r.delta[c.index()].reset();
                    r.upsilon[c.index()] = 1;
                }
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace cohrel
