#include "cohrel/npbayes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cohrel/errors.hpp"

namespace cohrel {

// ---- guesses ----------------------------------------------------------------------

DistributionGuess exponential_guess(double mean) {
    if (!(mean > 0)) throw InputError("exponential guess needs a positive mean");
    const double r = 1.0 / mean;
    return {"exp:" + format_time(mean), [r](double t) { return t <= 0 ? 0.0 : -std::expm1(-r * t); },
            [r](double t) { return t < 0 ? 0.0 : r * std::exp(-r * t); }};
}

DistributionGuess weibull_guess(double k, double lam) {
    if (!(k > 0) || !(lam > 0)) throw InputError("weibull guess needs positive shape and scale");
    return {"weibull:" + format_time(k) + ":" + format_time(lam),
            [=](double t) { return t <= 0 ? 0.0 : -std::expm1(-std::pow(t / lam, k)); },
            [=](double t) {
                if (t <= 0) return 0.0;
                const double z = t / lam;
                return k / lam * std::pow(z, k - 1) * std::exp(-std::pow(z, k));
            }};
}

DistributionGuess gamma_guess(double shape, double scale) {
    if (!(shape > 0) || !(scale > 0)) throw InputError("gamma guess needs positive shape and scale");
    const double lg = std::lgamma(shape);
    // regularized lower incomplete gamma by series / continued fraction
    auto P = [shape, lg](double x) {
        if (x <= 0) return 0.0;
        if (x < shape + 1) {
            double sum = 1.0 / shape, term = sum;
            for (int n = 1; n < 1000; ++n) {
                term *= x / (shape + n);
                sum += term;
                if (std::abs(term) < std::abs(sum) * 1e-17) break;
            }
            return sum * std::exp(-x + shape * std::log(x) - lg);
        }
        double b = x + 1 - shape, c = 1e300, d = 1 / b, h = d;
        for (int i = 1; i < 1000; ++i) {
            const double an = -i * (i - shape);
            b += 2;
            d = an * d + b;
            if (std::abs(d) < 1e-300) d = 1e-300;
            c = b + an / c;
            if (std::abs(c) < 1e-300) c = 1e-300;
            d = 1 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1) < 1e-16) break;
        }
        return 1.0 - std::exp(-x + shape * std::log(x) - lg) * h;
    };
    return {"gamma:" + format_time(shape) + ":" + format_time(scale), [=](double t) { return P(t / scale); },
            [=](double t) {
                if (t <= 0) return 0.0;
                return std::exp((shape - 1) * std::log(t / scale) - t / scale - lg) / scale;
            }};
}

DistributionGuess lognormal_guess(double mu, double sigma) {
    if (!(sigma > 0)) throw InputError("lognormal guess needs a positive sigma");
    return {"lognormal:" + format_time(mu) + ":" + format_time(sigma),
            [=](double t) { return t <= 0 ? 0.0 : 0.5 * std::erfc(-(std::log(t) - mu) / (sigma * std::sqrt(2.0))); },
            [=](double t) {
                if (t <= 0) return 0.0;
                const double z = (std::log(t) - mu) / sigma;
                return std::exp(-0.5 * z * z) / (t * sigma * std::sqrt(2 * M_PI));
            }};
}

DistributionGuess never_fails_guess() {
    return {"never", [](double) { return 0.0; }, [](double) { return 0.0; }, true};
}

DistributionGuess fails_at_zero_guess() {
    return {"zero", [](double) { return 1.0; }, [](double) { return 0.0; }, true};
}

DistributionGuess parse_guess(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw InputError("bad prior guess '" + spec + "'");
        }
    };
    if (parts.empty()) throw InputError("empty prior guess");
    const std::string& fam = parts[0];
    if (fam == "exp" && parts.size() == 2) return exponential_guess(num(1));
    if (fam == "weibull" && parts.size() == 3) return weibull_guess(num(1), num(2));
    if (fam == "gamma" && parts.size() == 3) return gamma_guess(num(1), num(2));
    if (fam == "lognormal" && parts.size() == 3) return lognormal_guess(num(1), num(2));
    throw InputError("bad prior guess '" + spec + "' (expected exp:MEAN, weibull:SHAPE:SCALE, gamma:SHAPE:SCALE or "
                     "lognormal:MU:SIGMA)");
}

// ---- prior measures ---------------------------------------------------------------

PriorMeasure::PriorMeasure() : density_([](double) { return 0.0; }) {}

PriorMeasure PriorMeasure::from_density(std::function<double(double)> density, double cutoff, int knots, int panels) {
    if (!(cutoff > 0) || knots < 1) throw InputError("prior measure needs a positive cutoff");
    PriorMeasure m;
    m.density_ = std::move(density);
    m.cutoff_ = cutoff;
    m.h_ = cutoff / knots;
    m.panels_ = panels;
    std::vector<double> piece(static_cast<std::size_t>(knots));
    for (int k = 0; k < knots; ++k) {
        piece[static_cast<std::size_t>(k)] = simpson(m.density_, k * m.h_, (k + 1) * m.h_, panels);
        if (piece[static_cast<std::size_t>(k)] < 0) throw InputError("prior density must be nonnegative");
    }
    m.head_.assign(static_cast<std::size_t>(knots) + 1, 0.0);
    m.suffix_.assign(static_cast<std::size_t>(knots) + 1, 0.0);
    for (std::size_t k = 0; k < piece.size(); ++k) m.head_[k + 1] = m.head_[k] + piece[k];
    for (std::size_t k = piece.size(); k-- > 0;) m.suffix_[k] = m.suffix_[k + 1] + piece[k];
    m.total_ = m.suffix_[0];
    return m;
}

double PriorMeasure::density(double t) const {
    if (t <= 0 || t >= cutoff_) return 0.0;
    return scale_ * density_(t);
}

double PriorMeasure::cumulative(double t) const {
    if (t <= 0 || total_ == 0.0) return 0.0;
    if (t >= cutoff_) return total_;
    const auto k = static_cast<std::size_t>(t / h_);
    const double a = static_cast<double>(k) * h_;
    const int p = std::max(2, 2 * static_cast<int>(std::ceil(panels_ * (t - a) / h_ / 2)));
    return scale_ * (head_[k] + simpson(density_, a, t, p));
}

double PriorMeasure::tail(double t) const {
    if (total_ == 0.0 || t >= cutoff_) return 0.0;
    if (t <= 0) return total_;
    const auto k = static_cast<std::size_t>(t / h_);
    const double b = static_cast<double>(k + 1) * h_;
    const int p = std::max(2, 2 * static_cast<int>(std::ceil(panels_ * (b - t) / h_ / 2)));
    return scale_ * (suffix_[k + 1] + simpson(density_, t, b, p));
}

PriorMeasure PriorMeasure::scaled(double factor) const {
    if (!(factor >= 0)) throw InputError("prior scale must be nonnegative");
    PriorMeasure m = *this;
    m.scale_ *= factor;
    m.total_ *= factor;
    return m;
}

namespace {

double support_end(const std::array<const DistributionGuess*, 3>& g) {
    double t = 1.0;
    for (int it = 0; it < 40; ++it, t *= 2) {
        bool done = true;
        for (auto* d : g)
            if (!d->degenerate && 1.0 - d->cdf(t) > 1e-16) done = false;
        if (done) return t;
    }
    throw InputError("prior guess has too heavy a tail to tabulate");
}

void validate_guess(const DistributionGuess& g, double end) {
    if (!g.cdf || !g.pdf) throw InputError("prior guess needs cdf and pdf");
    if (g.degenerate) return;
    if (std::abs(g.cdf(0.0)) > 1e-12) throw InputError("prior guess " + g.name + " is not 0 at 0");
    double prev = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double t = end * i / 2000.0;
        const double F = g.cdf(t);
        if (!(F >= prev - 1e-12) || F > 1 + 1e-12 || !(g.pdf(t) >= 0))
            throw InputError("prior guess " + g.name + " is not a distribution function");
        prev = F;
    }
}

}  // namespace

PriorTriple prior_measures_from_guess(const DistributionGuess& f1, const DistributionGuess& f2,
                                      const DistributionGuess& f3, TwoLevelKind kind, int panels) {
    const std::array<const DistributionGuess*, 3> g{&f1, &f2, &f3};
    if (f1.degenerate && f2.degenerate && f3.degenerate) return {};
    const double end = support_end(g);
    for (auto* d : g) validate_guess(*d, end);
    const int knots = static_cast<int>(std::clamp(end / 32.0, 1.0, 16.0)) * 512;

    std::array<std::function<double(double)>, 3> dens;
    const auto F1 = f1.cdf, F2 = f2.cdf, F3 = f3.cdf, p1 = f1.pdf, p2 = f2.pdf, p3 = f3.pdf;
    if (kind == TwoLevelKind::Sps) {
        dens[0] = [=](double t) { return (1 - F2(t) * F3(t)) * p1(t); };
        dens[1] = [=](double t) { return (1 - F1(t)) * F3(t) * p2(t); };
        dens[2] = [=](double t) { return (1 - F1(t)) * F2(t) * p3(t); };
    } else {
        dens[0] = [=](double t) { return (1 - (1 - F2(t)) * (1 - F3(t))) * p1(t); };
        dens[1] = [=](double t) { return F1(t) * (1 - F3(t)) * p2(t); };
        dens[2] = [=](double t) { return F1(t) * (1 - F2(t)) * p3(t); };
    }
    PriorTriple out;
    for (std::size_t j = 0; j < 3; ++j)
        if (!g[j]->degenerate) out[j] = PriorMeasure::from_density(dens[j], end, knots, panels);
    return out;
}

// ---- posterior sub-distributions ---------------------------------------------------------

double empirical_subdist(const std::vector<CauseRecord>& records, int j, double t) {
    if (records.empty()) return 0.0;
    std::size_t c = 0;
    for (const auto& r : records)
        if (r.cause == j && r.t <= t) ++c;
    return static_cast<double>(c) / static_cast<double>(records.size());
}

SubDistSet::SubDistSet(PriorTriple prior, std::vector<CauseRecord> data)
    : prior_(std::move(prior)), data_(std::move(data)) {
    for (const auto& p : prior_) total_ += p.total_mass();
    std::map<double, std::array<int, 3>> by_time;
    for (const auto& r : data_) {
        if (r.cause < 1 || r.cause > 3) throw InputError("canonical cause must be 1, 2 or 3");
        if (!(r.t > 0) || !std::isfinite(r.t)) throw InputError("failure times must be positive and finite");
        by_time[r.t][static_cast<std::size_t>(r.cause - 1)]++;
        counts_[static_cast<std::size_t>(r.cause - 1)]++;
    }
    if (data_.empty() && !(total_ > 0)) throw PreconditionError("no data and no prior mass");
    int seen = 0;
    for (const auto& [t, d] : by_time) {
        order_.push_back(t);
        before_.push_back(seen);
        for (std::size_t j = 0; j < 3; ++j) {
            d_[j].push_back(d[j]);
            seen += d[j];
        }
    }
}

double SubDistSet::prior_cumulative(double t) const {
    return prior_[0].cumulative(t) + prior_[1].cumulative(t) + prior_[2].cumulative(t);
}

double SubDistSet::prior_tail(double t) const {
    return prior_[0].tail(t) + prior_[1].tail(t) + prior_[2].tail(t);
}

double SubDistSet::subdist(int j, double t) const {
    std::size_t c = 0;
    for (const auto& r : data_)
        if (r.cause == j && r.t <= t) ++c;
    return (prior(j).cumulative(t) + static_cast<double>(c)) / (n() + total_);
}

double SubDistSet::system_df(double t) const {
    std::size_t c = 0;
    for (const auto& r : data_)
        if (r.t <= t) ++c;
    return (prior_cumulative(t) + static_cast<double>(c)) / (n() + total_);
}

double SubDistSet::rho_hat(int j) const {
    return (prior(j).total_mass() + count(j)) / (n() + total_);
}

SubDistSet posterior_subdist(PriorTriple prior, std::vector<CauseRecord> data) {
    return SubDistSet(std::move(prior), std::move(data));
}

double system_df(const SubDistSet& sub, double t) { return sub.system_df(t); }
double rho_hat(const SubDistSet& sub, int j) { return sub.rho_hat(j); }

// ---- estimators -------------------------------------------------------------------------------

namespace {

// Quadrature mesh over (eps, U]. Breakpoints are the evaluation grid (which
// contains every order statistic) plus tail points past T_max where the prior
// mass runs out. Segment 0 runs from eps to the first grid point on a
// logarithmic scale, which absorbs the 1/s behaviour of some integrands.
// Every node carries one-sided values from inside its segment.
class Mesh {
public:
    Mesh(const SubDistSet& sub, const EstimatorOptions& opt) : sub_(sub), opt_(opt) {
        if (opt.grid_points < 1) throw InputError("grid_points must be positive");
        if (opt.panels < 2 || opt.panels % 2) throw InputError("panels must be even");
        const auto& os = sub.order_stats();
        if (!os.empty()) {
            t_max_ = os.back();
        } else if (opt.t_max) {
            t_max_ = *opt.t_max;
        } else {
            t_max_ = prior_quantile(0.99);
        }
        if (!(t_max_ > 0)) throw InputError("evaluation range must be positive");
        nA_ = sub.n() + sub.prior_total();

        std::vector<double> grid;
        for (int k = 1; k <= opt.grid_points; ++k) grid.push_back(t_max_ * k / opt.grid_points);
        grid.insert(grid.end(), os.begin(), os.end());
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        eval_ = grid;

        std::vector<double> bp{grid.front() * 1e-10};
        bp.insert(bp.end(), grid.begin(), grid.end());
        const double U = upper_cutoff();
        if (U > t_max_) {
            const double w = std::max(t_max_ / opt.grid_points, (U - t_max_) / 512.0);
            for (double s = t_max_ + w; s < U + 0.5 * w; s += w) bp.push_back(s);
        }
        build(bp);
    }

    double t_max() const { return t_max_; }
    double nA() const { return nA_; }
    const std::vector<double>& eval_points() const { return eval_; }

    struct Segment {
        double a, b;
        bool log;
        double h;
        std::size_t first_os;  // order stats strictly greater than a start here
        int count;             // #{T <= a}
        std::vector<double> s, acum, atail;
        std::array<std::vector<double>, 3> dens;
    };

    const std::vector<Segment>& segments() const { return seg_; }
    std::size_t segment_starting_at(double t) const {
        for (std::size_t k = 0; k < seg_.size(); ++k)
            if (seg_[k].a == t) return k;
        throw NumericError("internal: grid point missing from mesh");
    }
    // The guard only applies inside the evaluation range; past T_max the
    // denominators shrink with the prior tail by construction.
    bool guarded(std::size_t k, double s) const { return s >= eval_.front() && seg_[k].b <= t_max_; }
    double guard() const { return opt_.guard; }

    // Running integral of g along the mesh from segment `from`. g receives
    // (segment, node) and returns the integrand in s; log segments are
    // converted to u = log s internally. Result[k][i] = integral up to node i.
    template <class G>
    std::vector<std::vector<double>> running(std::size_t from, G&& g) const {
        std::vector<std::vector<double>> out(seg_.size());
        double acc = 0.0;
        for (std::size_t k = from; k < seg_.size(); ++k) {
            const auto& sg = seg_[k];
            std::vector<double> v(sg.s.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                double val = g(k, i);
                if (!std::isfinite(val)) throw SingularityError("integrand not finite", sg.s[i]);
                v[i] = sg.log ? val * sg.s[i] : val;
            }
            auto c = cumulative_simpson(v, sg.h);
            for (auto& x : c) x += acc;
            acc = c.back();
            out[k] = std::move(c);
        }
        return out;
    }

private:
    double prior_quantile(double q) const {
        const double A = sub_.prior_total();
        double hi = 1.0;
        while (sub_.prior_cumulative(hi) < q * A && hi < 1e6) hi *= 2;
        double lo = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (sub_.prior_cumulative(mid) < q * A ? lo : hi) = mid;
        }
        return hi;
    }

    double upper_cutoff() const {
        const double A = sub_.prior_total();
        if (A == 0.0) return t_max_;
        double step = std::max(t_max_, 1e-3);
        double U = t_max_;
        while (sub_.prior_tail(U) > 1e-14 * A && U < 1e7) U += step, step *= 1.5;
        return U;
    }

    void build(const std::vector<double>& bp) {
        const auto& os = sub_.order_stats();
        const int P = opt_.panels;
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            Segment sg;
            sg.a = bp[k];
            sg.b = bp[k + 1];
            sg.log = k == 0;
            const int p = sg.log ? 2 * P : P;
            sg.first_os = static_cast<std::size_t>(std::upper_bound(os.begin(), os.end(), sg.a) - os.begin());
            sg.count = sg.first_os == 0 ? 0 : sub_.before(sg.first_os - 1) + ties_at(sg.first_os - 1);
            if (sg.log) {
                const double la = std::log(sg.a), lb = std::log(sg.b);
                sg.h = (lb - la) / p;
                for (int i = 0; i <= p; ++i) sg.s.push_back(i == p ? sg.b : std::exp(la + i * sg.h));
            } else {
                sg.h = (sg.b - sg.a) / p;
                for (int i = 0; i <= p; ++i) sg.s.push_back(i == p ? sg.b : sg.a + i * sg.h);
            }
            for (double s : sg.s) {
                sg.acum.push_back(sub_.prior_cumulative(s));
                sg.atail.push_back(sub_.prior_tail(s));
                for (int j = 1; j <= 3; ++j) sg.dens[static_cast<std::size_t>(j - 1)].push_back(sub_.prior(j).density(s));
            }
            seg_.push_back(std::move(sg));
        }
    }

    int ties_at(std::size_t i) const { return sub_.ties(1, i) + sub_.ties(2, i) + sub_.ties(3, i); }

    const SubDistSet& sub_;
    EstimatorOptions opt_;
    double t_max_ = 0.0, nA_ = 0.0;
    std::vector<double> eval_;
    std::vector<Segment> seg_;
};

void check_slot(int slot) {
    if (slot != 2 && slot != 3) throw InputError("target slot must be 2 or 3");
}

[[noreturn]] void singular(const char* what, double t) {
    throw SingularityError(std::string(what) + " denominator vanishes near t = " + std::to_string(t), t);
}

CurveEstimate with_origin(const Mesh& mesh, std::vector<double> values) {
    CurveEstimate c;
    c.t.push_back(0.0);
    c.values.push_back(0.0);
    c.t.insert(c.t.end(), mesh.eval_points().begin(), mesh.eval_points().end());
    c.values.insert(c.values.end(), values.begin(), values.end());
    return c;
}

// Survival of the SPS slot-1 component, 1 - Phi_s, at every mesh node plus its
// per-segment jump product.
struct SeriesLead {
    std::vector<std::vector<double>> J;  // running integral of dalpha_1 / (1 - F)
    std::vector<double> prod;            // Pi_s over order stats <= segment start
};

SeriesLead series_lead(const SubDistSet& sub, const Mesh& mesh) {
    const double nA = mesh.nA();
    SeriesLead out;
    out.J = mesh.running(0, [&](std::size_t k, std::size_t i) {
        const auto& sg = mesh.segments()[k];
        const double S = ((sub.n() - sg.count) + sg.atail[i]);  // (n + A)(1 - F)
        if (S <= 0 || (mesh.guarded(k, sg.s[i]) && S / nA < mesh.guard())) singular("1 - F", sg.s[i]);
        return sg.dens[0][i] / S;
    });
    const auto& os = sub.order_stats();
    for (const auto& sg : mesh.segments()) {
        double p = 1.0;
        for (std::size_t i = 0; i < sg.first_os; ++i) {
            const double base = (sub.n() - sub.before(i)) + sub.prior_tail(os[i]);
            if (base <= 0) singular("product", os[i]);
            p *= (base - sub.ties(1, i)) / base;
        }
        out.prod.push_back(p);
    }
    return out;
}

// Phi_p for the PSS slot-1 component at every node; reverse integral from U.
struct ParallelLead {
    std::vector<std::vector<double>> R;  // integral of dalpha_1 / F from node to U
    std::vector<double> prod;            // Pi_p over order stats > segment start
};

ParallelLead parallel_lead(const SubDistSet& sub, const Mesh& mesh) {
    const double nA = mesh.nA();
    ParallelLead out;
    auto J = mesh.running(0, [&](std::size_t k, std::size_t i) {
        const auto& sg = mesh.segments()[k];
        const double F = sg.acum[i] + sg.count;  // (n + A) F
        if (F <= 0 || (mesh.guarded(k, sg.s[i]) && F / nA < mesh.guard())) singular("F", sg.s[i]);
        return sg.dens[0][i] / F;
    });
    const double total = J.back().back();
    for (auto& v : J)
        for (auto& x : v) x = total - x;
    out.R = std::move(J);
    const auto& os = sub.order_stats();
    for (const auto& sg : mesh.segments()) {
        double p = 1.0;
        for (std::size_t i = sg.first_os; i < os.size(); ++i) {
            const double base = sub.prior_cumulative(os[i]) + sub.before(i);
            p *= base / (base + sub.ties(1, i));
        }
        out.prod.push_back(p);
    }
    return out;
}

}  // namespace

CurveEstimate estimate_F1_sps(const SubDistSet& sub, const EstimatorOptions& opt) {
    Mesh mesh(sub, opt);
    const auto lead = series_lead(sub, mesh);
    std::vector<double> v;
    for (double t : mesh.eval_points()) {
        const std::size_t k = mesh.segment_starting_at(t);
        v.push_back(1.0 - std::exp(-lead.J[k][0] / mesh.nA()) * lead.prod[k]);
    }
    return with_origin(mesh, std::move(v));
}

CurveEstimate estimate_F2_sps(const SubDistSet& sub, int slot, const EstimatorOptions& opt) {
    check_slot(slot);
    Mesh mesh(sub, opt);
    const double nA = mesh.nA();
    const auto lead = series_lead(sub, mesh);
    const auto& segs = mesh.segments();
    const auto sj = static_cast<std::size_t>(slot - 1);
    // (n + A)(F - Phi_s) at a node = (n + A) S1 - (n + A) S
    auto gap = [&](std::size_t k, std::size_t i) {
        const auto& sg = segs[k];
        return nA * std::exp(-lead.J[k][i] / nA) * lead.prod[k] - ((sub.n() - sg.count) + sg.atail[i]);
    };
    bool truncated = false;
    auto J = mesh.running(1, [&](std::size_t k, std::size_t i) {
        const auto& sg = segs[k];
        if (truncated) return 0.0;
        const double g = gap(k, i);
        if (mesh.guarded(k, sg.s[i])) {
            if (g / nA < mesh.guard()) singular("F - F1", sg.s[i]);
        } else if (g / nA < mesh.guard()) {
            // past T_max with no prior mass left to speak of
            truncated = true;
            return 0.0;
        }
        return sg.dens[sj][i] / g;
    });
    const double total = J.back().back();

    // factor per order statistic, using left limits at T_i
    const auto& os = sub.order_stats();
    std::vector<double> factor(os.size(), 1.0);
    double pre = 1.0;  // Pi_s over order stats < T_i
    for (std::size_t i = 0; i < os.size(); ++i) {
        const double base = (sub.n() - sub.before(i)) + sub.prior_tail(os[i]);
        const int d = sub.ties(slot, i);
        if (d > 0) {
            const double Jt = lead.J[mesh.segment_starting_at(os[i])][0];
            const double num = nA * std::exp(-Jt / nA) * pre - base;
            if (num / nA < mesh.guard()) singular("product", os[i]);
            factor[i] = num / (num + d);
        }
        pre *= (base - sub.ties(1, i)) / base;
    }
    std::vector<double> v;
    for (double t : mesh.eval_points()) {
        const std::size_t k = mesh.segment_starting_at(t);
        double p = 1.0;
        for (std::size_t i = segs[k].first_os; i < os.size(); ++i) p *= factor[i];
        v.push_back(std::exp(-(total - J[k][0]) / nA) * p);
    }
    return with_origin(mesh, std::move(v));
}

CurveEstimate estimate_F1_pss(const SubDistSet& sub, const EstimatorOptions& opt) {
    Mesh mesh(sub, opt);
    const auto lead = parallel_lead(sub, mesh);
    std::vector<double> v;
    for (double t : mesh.eval_points()) {
        const std::size_t k = mesh.segment_starting_at(t);
        v.push_back(std::exp(-lead.R[k][0] / mesh.nA()) * lead.prod[k]);
    }
    return with_origin(mesh, std::move(v));
}

CurveEstimate estimate_F2_pss(const SubDistSet& sub, int slot, const EstimatorOptions& opt) {
    check_slot(slot);
    Mesh mesh(sub, opt);
    const double nA = mesh.nA();
    const auto lead = parallel_lead(sub, mesh);
    const auto& segs = mesh.segments();
    const auto sj = static_cast<std::size_t>(slot - 1);
    auto J = mesh.running(0, [&](std::size_t k, std::size_t i) {
        const auto& sg = segs[k];
        if (sg.a >= mesh.t_max()) return 0.0;  // only values up to T_max are read
        const double g = nA * std::exp(-lead.R[k][i] / nA) * lead.prod[k] - (sg.acum[i] + sg.count);
        if (g <= 0 || (mesh.guarded(k, sg.s[i]) && g / nA < mesh.guard())) singular("F1 - F", sg.s[i]);
        return sg.dens[sj][i] / g;
    });

    const auto& os = sub.order_stats();
    std::vector<double> factor(os.size(), 1.0);
    for (std::size_t i = 0; i < os.size(); ++i) {
        const int d = sub.ties(slot, i);
        if (d == 0) continue;
        // Phi_p(T_i-) keeps the factor for T_i itself
        const std::size_t ki = mesh.segment_starting_at(os[i]);
        const double base = sub.prior_cumulative(os[i]) + sub.before(i);
        const double prod = lead.prod[ki] * base / (base + sub.ties(1, i));
        const double num = nA * std::exp(-lead.R[ki][0] / nA) * prod - base;
        if (num / nA < mesh.guard() || num - d <= 0) singular("product", os[i]);
        factor[i] = (num - d) / num;
    }
    std::vector<double> v;
    for (double t : mesh.eval_points()) {
        const std::size_t k = mesh.segment_starting_at(t);
        double p = 1.0;
        for (std::size_t i = 0; i < segs[k].first_os; ++i) p *= factor[i];
        v.push_back(1.0 - std::exp(-J[k][0] / nA) * p);
    }
    return with_origin(mesh, std::move(v));
}

// ---- structure-level entry points ----------------------------------------------------------------

ThreeComponentView select_view(const StructureExpr& expr, ComponentId target) {
    if (target.value < 1 || target.value > expr.component_count())
        throw InputError("target component out of range");
    std::vector<StructureExpr> forms;
    for (const auto& f : {to_sps(expr), to_pss(expr)})
        if (!has_repeated_component(f)) forms.push_back(f);
    if (forms.empty())
        throw UnsupportedSystemError("both the SPS and PSS forms repeat a component; the nonparametric estimator "
                                     "does not apply");
    for (const auto& f : forms) {
        try {
            return canonical_three(f, target);
        } catch (const UnsupportedSystemError&) {
        }
    }
    for (const auto& f : forms) {
        try {
            return canonical_lead(f, target);
        } catch (const UnsupportedSystemError&) {
        }
    }
    throw UnsupportedSystemError("no three-slot view for component " + std::to_string(target.value));
}

ComponentEstimate estimate_component(const StructureExpr& expr, const std::vector<SystemRecord>& records,
                                     const std::array<DistributionGuess, 3>& guesses, ComponentId target,
                                     const EstimatorOptions& opt) {
    ComponentEstimate out;
    out.view = select_view(expr, target);
    const auto& v = out.view;
    std::vector<CauseRecord> data;
    for (const auto& r : records) {
        if (r.delta < 1 || r.delta > expr.component_count())
            throw InputError("record " + std::to_string(r.id) + " has a cause outside 1.." +
                             std::to_string(expr.component_count()));
        data.push_back({r.t, v.slot_of(r.delta)});
    }
    DistributionGuess third = guesses[2];
    if (v.x3.empty()) third = v.kind == TwoLevelKind::Sps ? fails_at_zero_guess() : never_fails_guess();
    auto prior = prior_measures_from_guess(guesses[0], guesses[1], third, v.kind);
    SubDistSet sub(std::move(prior), std::move(data));
    out.rho_hat = sub.rho_hat(v.target_slot);
    if (v.kind == TwoLevelKind::Sps)
        out.curve = v.target_slot == 1 ? estimate_F1_sps(sub, opt) : estimate_F2_sps(sub, 2, opt);
    else
        out.curve = v.target_slot == 1 ? estimate_F1_pss(sub, opt) : estimate_F2_pss(sub, 2, opt);
    return out;
}

CurveEstimate estimate_two_component(const std::vector<CauseRecord>& records, PairKind kind, int j,
                                     const std::array<DistributionGuess, 2>& guesses, double prior_mass,
                                     const EstimatorOptions& opt) {
    if (j != 1 && j != 2) throw InputError("two-component target must be 1 or 2");
    std::vector<CauseRecord> data;
    for (const auto& r : records) {
        if (r.cause != 1 && r.cause != 2) throw InputError("two-component causes must be 1 or 2");
        data.push_back({r.t, r.cause == j ? 1 : 2});
    }
    const auto& lead = guesses[static_cast<std::size_t>(j - 1)];
    const auto& other = guesses[static_cast<std::size_t>(2 - j)];
    const bool series = kind == PairKind::Series;
    auto prior = prior_measures_from_guess(lead, other, series ? fails_at_zero_guess() : never_fails_guess(),
                                           series ? TwoLevelKind::Sps : TwoLevelKind::Pss);
    for (auto& p : prior) p = p.scaled(prior_mass);
    SubDistSet sub(std::move(prior), std::move(data));
    return series ? estimate_F1_sps(sub, opt) : estimate_F1_pss(sub, opt);
}

}  // namespace cohrel
