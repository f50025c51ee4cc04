#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cohrel/data.hpp"
#include "cohrel/errors.hpp"
#include "cohrel/masked.hpp"
#include "cohrel/mcmc.hpp"
#include "cohrel/npbayes.hpp"
#include "cohrel/simulate.hpp"
#include "cohrel/structure.hpp"
#include "cohrel/weibull.hpp"

namespace cohrel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 1;

// ---- small helpers -----------------------------------------------------------------------------

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot read " + p.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw InputError(p.string() + ": " + e.what());
    }
}

template <class T>
T get(const json& a, const char* key) {
    if (!a.contains(key)) throw InputError(std::string("manifest lacks '") + key + "'");
    try {
        return a.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("manifest field '") + key + "': " + e.what());
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("COHREL_SEED"); env && *env) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InputError(std::string("COHREL_SEED is not an unsigned integer: ") + env);
    }
    return kDefaultSeed;
}

std::string absolute(const std::string& p) { return fs::absolute(fs::path(p)).lexically_normal().string(); }

json summary_json(const ParamSummary& s, std::pair<double, double> hpd) {
    return {{"min", s.min},   {"q1", s.q1}, {"median", s.median},          {"mean", s.mean},
            {"q3", s.q3},     {"max", s.max}, {"sd", s.sd}, {"hpd95", {hpd.first, hpd.second}}};
}

json summarize_samples(const std::vector<double>& x) { return summary_json(summarize(x), hpd_interval(x, 0.95)); }

McmcConfig mcmc_from(const json& a) {
    McmcConfig c;
    const json& m = a.at("mcmc");
    c.iterations = get<int>(m, "iterations");
    c.burn_in = get<int>(m, "burn_in");
    c.thin = get<int>(m, "thin");
    c.initial_scale = get<double>(m, "initial_scale");
    c.adaptation_start = get<int>(m, "adaptation_start");
    c.adaptation_epsilon = get<double>(m, "adaptation_epsilon");
    c.seed = get<std::uint64_t>(a, "seed");
    c.validate();
    return c;
}

json mcmc_json(const McmcConfig& c) {
    return {{"iterations", c.iterations},       {"burn_in", c.burn_in},
            {"thin", c.thin},                   {"initial_scale", c.initial_scale},
            {"adaptation_start", c.adaptation_start}, {"adaptation_epsilon", c.adaptation_epsilon}};
}

McmcConfig preset(const std::string& name) {
    if (name == "default") return McmcConfig::weibull_default();
    if (name == "masked") return McmcConfig::masked_default();
    if (name == "bridge") return McmcConfig::bridge_preset();
    if (name == "harddrive") return McmcConfig::harddrive_preset();
    throw InputError("unknown preset '" + name + "' (default, masked, bridge, harddrive)");
}

StructureExpr structure_from(const json& a) { return parse_structure(get<std::string>(a, "structure")); }

std::vector<double> linspace_to(double hi, int points) {
    if (points < 2) throw InputError("grid_points must be at least 2");
    std::vector<double> g;
    for (int k = 0; k < points; ++k) g.push_back(hi * k / (points - 1));
    return g;
}

// Per-component work in parallel; results come back in component order so
// the first failing component decides the error.
template <class F>
auto per_component(int m, F&& f) {
    using R = decltype(f(1));
    std::vector<std::future<R>> fut;
    for (int j = 1; j <= m; ++j) fut.push_back(std::async(std::launch::async, f, j));
    std::vector<R> out;
    for (auto& x : fut) out.push_back(x.get());
    return out;
}

// ---- commands ----------------------------------------------------------------------------------

void cmd_simulate(const json& a, const fs::path& out, std::ostream& log) {
    const auto expr = structure_from(a);
    const int m = expr.component_count();
    const int n = get<int>(a, "n");
    const auto seed = get<std::uint64_t>(a, "seed");
    auto dists = get<std::vector<std::string>>(a, "dist");
    if (dists.size() == 1) dists.assign(static_cast<std::size_t>(m), dists[0]);
    if (static_cast<int>(dists.size()) != m)
        throw InputError("need one --dist or one per component (" + std::to_string(m) + ")");
    std::vector<ComponentDistSpec> specs;
    for (const auto& d : dists) specs.push_back(parse_dist_spec(d));

    RandomStream rs(seed, 0);
    const auto ob = observe(expr, draw_component_times(specs, n, rs));
    write_system_csv(ob.systems, (out / "systems.csv").string());
    write_component_csv(ob.components, (out / "components.csv").string());
    if (a.contains("mask_p") && !a.at("mask_p").is_null()) {
        RandomStream ms(seed, 1);
        const auto masked = apply_masking(expr, ob.systems, ob.statuses, {get<double>(a, "mask_p")}, ms);
        write_masked_csv(masked, (out / "masked.csv").string());
        std::size_t k = 0;
        for (const auto& r : masked) k += !r.mask_set().empty();
        log << "masked " << k << " of " << masked.size() << " systems\n";
    }
    log << "wrote " << n << " systems to " << out.string() << "\n";
}

void cmd_estimate_np(const json& a, const fs::path& out, std::ostream& log) {
    const auto expr = structure_from(a);
    const int m = expr.component_count();
    std::vector<std::string> warnings;
    const auto records = load_system_csv(get<std::string>(a, "input"), &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";

    auto priors = get<std::vector<std::string>>(a, "prior");
    if (priors.size() == 1) priors.assign(3, priors[0]);
    if (priors.size() != 3) throw InputError("--prior takes one guess or three (X1, X2, X3)");
    const std::array<DistributionGuess, 3> guesses{parse_guess(priors[0]), parse_guess(priors[1]),
                                                   parse_guess(priors[2])};
    EstimatorOptions opt;
    opt.grid_points = get<int>(a, "grid_points");
    if (a.contains("t_max") && !a.at("t_max").is_null()) opt.t_max = get<double>(a, "t_max");

    // views first: an unsupported structure fails before any integration
    for (int j = 1; j <= m; ++j) select_view(expr, ComponentId{j});
    const auto est = per_component(m, [&](int j) { return estimate_component(expr, records, guesses, ComponentId{j}, opt); });

    const auto seed = get<std::uint64_t>(a, "seed");
    json rho = {{"seed", seed}, {"n", records.size()}, {"components", json::array()}, {"rho", json::array()}};
    for (int j = 1; j <= m; ++j) {
        const auto& e = est[static_cast<std::size_t>(j - 1)];
        std::vector<double> rel;
        for (double v : e.curve.values) rel.push_back(1.0 - v);
        json c = {{"component", j},
                  {"seed", seed},
                  {"form", e.view.kind == TwoLevelKind::Sps ? "sps" : "pss"},
                  {"slot", e.view.target_slot},
                  {"t", e.curve.t},
                  {"df_mean", e.curve.values},
                  {"reliability", rel}};
        write_json(out / ("curve_" + std::to_string(j) + ".json"), c);
        rho["components"].push_back(j);
        rho["rho"].push_back(e.rho_hat);
        log << "component " << j << ": rho_hat = " << std::fixed << std::setprecision(4) << e.rho_hat
            << std::defaultfloat << "\n";
    }
    write_json(out / "rho.json", rho);
}

std::string chain_csv(const std::vector<WeibullParams>& draws, const Eigen::MatrixXd* rates) {
    std::ostringstream os;
    os << "beta,eta,mu";
    if (rates) os << ",lambda1,lambda2,lambda3";
    os << "\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
        os << num(draws[i].beta) << ',' << num(draws[i].eta) << ',' << num(draws[i].mu);
        if (rates)
            for (int c = 0; c < 3; ++c) os << ',' << num((*rates)(static_cast<Eigen::Index>(i), c));
        os << "\n";
    }
    return os.str();
}

json parameter_summary(const PosteriorSample& s) {
    std::vector<double> b, e, m;
    for (const auto& d : s.draws) b.push_back(d.beta), e.push_back(d.eta), m.push_back(d.mu);
    return {{"beta", summarize_samples(b)}, {"eta", summarize_samples(e)}, {"mu", summarize_samples(m)}};
}

json reliability_rows(const PosteriorSample& s, const std::vector<double>& ts) {
    json rows = json::array();
    for (double t : ts) {
        json r = summarize_samples(reliability_draws(s, t));
        r["t"] = t;
        rows.push_back(r);
    }
    return rows;
}

json band_json(const PosteriorSample& s, const std::vector<double>& grid, int j, std::uint64_t seed) {
    const auto band = reliability_curve(s, grid, 0.95);
    return {{"component", j}, {"seed", seed}, {"level", 0.95}, {"t", band.t},
            {"mean", band.mean},  {"lo", band.lo},    {"hi", band.hi}};
}

double largest_time(const ComponentDataset& ds) {
    double hi = 0.0;
    for (const auto& row : ds.rows)
        for (const auto& iv : row) {
            if (std::isfinite(iv.u)) hi = std::max(hi, iv.u);
            hi = std::max(hi, iv.l);
        }
    return hi;
}

void cmd_estimate_weibull(const json& a, const fs::path& out, std::ostream& log) {
    std::vector<std::string> warnings;
    const auto ds = load_component_csv(get<std::string>(a, "input"), &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    const McmcConfig base = mcmc_from(a);
    const auto ts = get<std::vector<double>>(a, "t");
    const auto grid = linspace_to(largest_time(ds), get<int>(a, "grid_points"));

    const auto fits = per_component(ds.m, [&](int j) {
        McmcConfig c = base;
        c.stream = static_cast<std::uint64_t>(j);
        return fit(ds.column(j), c);
    });
    for (int j = 1; j <= ds.m; ++j) {
        const auto& s = fits[static_cast<std::size_t>(j - 1)];
        const auto tag = std::to_string(j);
        write_text(out / ("chain_" + tag + ".csv"), chain_csv(s.draws, nullptr));
        json sum = {{"component", j},
                    {"seed", base.seed},
                    {"kept", s.draws.size()},
                    {"acceptance_rate", s.acceptance_rate},
                    {"location_bound", s.t_min},
                    {"parameters", parameter_summary(s)},
                    {"reliability", reliability_rows(s, ts)}};
        write_json(out / ("summary_" + tag + ".json"), sum);
        write_json(out / ("curve_" + tag + ".json"), band_json(s, grid, j, base.seed));
        log << "component " << j << ": acceptance " << std::fixed << std::setprecision(3) << s.acceptance_rate
            << std::defaultfloat << "\n";
    }
}

void cmd_estimate_masked(const json& a, const fs::path& out, std::ostream& log) {
    std::vector<std::string> warnings;
    const auto records = load_masked_csv(get<std::string>(a, "input"), &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    if (records.empty()) throw PreconditionError("masked dataset is empty");
    const int m = static_cast<int>(records.front().delta.size());
    const McmcConfig base = mcmc_from(a);
    const json& cj = a.at("constraints");
    RateConstraints rc{get<bool>(cj, "fix_lambda2_zero"), get<bool>(cj, "fix_lambda3_zero"),
                       get<bool>(cj, "symmetric13")};
    rc.validate();
    const GammaPriorSpec prior{get<double>(a.at("theta_prior"), "shape"), get<double>(a.at("theta_prior"), "rate")};
    const auto ts = get<std::vector<double>>(a, "t");
    double hi = 0.0;
    for (const auto& r : records) hi = std::max(hi, r.t);
    const auto grid = linspace_to(hi, get<int>(a, "grid_points"));

    std::vector<MaskedRows> rows;
    for (int j = 1; j <= m; ++j) rows.push_back(rows_for_component(records, j));
    const auto fits = per_component(m, [&](int j) {
        McmcConfig c = base;
        c.stream = static_cast<std::uint64_t>(j);
        return gibbs_fit(rows[static_cast<std::size_t>(j - 1)], prior, c, rc);
    });
    for (int j = 1; j <= m; ++j) {
        const auto& f = fits[static_cast<std::size_t>(j - 1)];
        const auto tag = std::to_string(j);
        write_text(out / ("chain_" + tag + ".csv"), chain_csv(f.theta.draws, &f.rates));
        json rates = json::object();
        for (int c = 0; c < 3; ++c) {
            std::vector<double> x(static_cast<std::size_t>(f.rates.rows()));
            for (Eigen::Index i = 0; i < f.rates.rows(); ++i) x[static_cast<std::size_t>(i)] = f.rates(i, c);
            rates["lambda" + std::to_string(c + 1)] = summarize_samples(x);
        }
        json sum = {{"component", j},
                    {"seed", base.seed},
                    {"kept", f.theta.draws.size()},
                    {"acceptance_rate", f.theta.acceptance_rate},
                    {"location_bound", f.theta.t_min},
                    {"constraints", cj},
                    {"parameters", parameter_summary(f.theta)},
                    {"rates", rates},
                    {"reliability", reliability_rows(f.theta, ts)}};
        write_json(out / ("summary_" + tag + ".json"), sum);
        write_json(out / ("curve_" + tag + ".json"), band_json(f.theta, grid, j, base.seed));
        log << "component " << j << ": acceptance " << std::fixed << std::setprecision(3)
            << f.theta.acceptance_rate << std::defaultfloat << "\n";
    }
}

// ---- summarize ---------------------------------------------------------------------------------

std::string fmt3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

struct Curve {
    std::string path, name, column;
    std::vector<double> t, v;
};

Curve load_curve(const std::string& path) {
    const json j = read_json(path);
    Curve c;
    c.path = path;
    c.name = fs::path(path).filename().string();
    if (!j.contains("t")) throw InputError(path + ": no 't' array");
    c.column = j.contains("df_mean") ? "df_mean" : j.contains("mean") ? "mean" : "";
    if (c.column.empty()) throw InputError(path + ": neither 'df_mean' nor 'mean' present");
    c.t = j.at("t").get<std::vector<double>>();
    c.v = j.at(c.column).get<std::vector<double>>();
    if (c.t.size() != c.v.size() || c.t.empty()) throw InputError(path + ": grid and values differ in length");
    return c;
}

double interpolate(const Curve& c, double t) {
    if (t < c.t.front() || t > c.t.back())
        throw InputError("t = " + num(t) + " lies outside the grid of " + c.name);
    auto it = std::lower_bound(c.t.begin(), c.t.end(), t);
    const auto k = static_cast<std::size_t>(it - c.t.begin());
    if (c.t[k] == t || k == 0) return c.v[k];
    const double w = (t - c.t[k - 1]) / (c.t[k] - c.t[k - 1]);
    return c.v[k - 1] + w * (c.v[k] - c.v[k - 1]);
}

std::vector<WeibullParams> load_chain(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line.rfind("beta,eta,mu", 0) != 0) throw ParseError("line 1: expected a beta,eta,mu header", 1);
    std::vector<WeibullParams> out;
    for (std::size_t no = 2; std::getline(f, line); ++no) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[3];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw ParseError("line " + std::to_string(no) + ": short row", no);
            try {
                x = std::stod(cell);
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(no) + ": bad number '" + cell + "'", no);
            }
        }
        out.push_back({v[0], v[1], v[2]});
    }
    if (out.empty()) throw InputError(path + ": empty chain");
    return out;
}

std::string stats_row(const std::string& label, const std::vector<double>& x) {
    const auto s = summarize(x);
    const auto [lo, hi] = hpd_interval(x, 0.95);
    std::ostringstream os;
    os << std::left << std::setw(10) << label;
    for (double v : {s.min, s.q1, s.median, s.mean, s.q3, s.max, s.sd}) os << std::right << std::setw(9) << fmt3(v);
    os << "  " << fmt3(lo) << " - " << fmt3(hi) << "\n";
    return os.str();
}

std::string cmd_summarize(const json& a) {
    const auto ts = get<std::vector<double>>(a, "t");
    const auto curves_in = get<std::vector<std::string>>(a, "curves");
    const std::string chain = a.contains("chain") && !a.at("chain").is_null() ? get<std::string>(a, "chain") : "";
    if (curves_in.empty() && chain.empty()) throw InputError("summarize needs --curve or --chain");
    std::ostringstream os;

    if (!curves_in.empty()) {
        std::vector<Curve> curves;
        for (const auto& p : curves_in) curves.push_back(load_curve(p));
        for (const auto& c : curves)
            if (c.t != curves.front().t)
                throw InputError("mismatched grids: " + c.path + " and " + curves.front().path);
        const auto& grid = ts.empty() ? curves.front().t : ts;
        os << std::left << std::setw(12) << "t";
        for (const auto& c : curves) os << std::right << std::setw(24) << (c.name + ":" + c.column);
        os << "\n";
        for (double t : grid) {
            os << std::left << std::setw(12) << fmt3(t);
            for (const auto& c : curves) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6f", interpolate(c, t));
                os << std::right << std::setw(24) << buf;
            }
            os << "\n";
        }
    }
    if (!chain.empty()) {
        const auto draws = load_chain(chain);
        if (!curves_in.empty()) os << "\n";
        const std::string head = "             Min      1Qt   Median     Mean      3Qt      Max       SD  CI 95%\n";
        os << head;
        std::vector<double> b, e, m;
        for (const auto& d : draws) b.push_back(d.beta), e.push_back(d.eta), m.push_back(d.mu);
        os << stats_row("beta", b) << stats_row("eta", e) << stats_row("mu", m);
        if (!ts.empty()) {
            os << "\nt" << head.substr(1);
            for (double t : ts) {
                std::vector<double> r;
                for (const auto& d : draws) r.push_back(reliability(t, d));
                os << stats_row(fmt3(t), r);
            }
        }
    }
    return os.str();
}

// ---- dispatch ----------------------------------------------------------------------------------

void run_command(const json& manifest, const fs::path& out, std::ostream& log) {
    const auto cmd = get<std::string>(manifest, "command");
    const json& a = manifest.at("args");
    if (cmd == "simulate") return cmd_simulate(a, out, log);
    if (cmd == "estimate-np") return cmd_estimate_np(a, out, log);
    if (cmd == "estimate-weibull") return cmd_estimate_weibull(a, out, log);
    if (cmd == "estimate-masked") return cmd_estimate_masked(a, out, log);
    if (cmd == "summarize") {
        const auto text = cmd_summarize(a);
        write_text(out / "summary.txt", text);
        log << text;
        return;
    }
    throw InputError("unknown command '" + cmd + "' in manifest");
}

void check_structure_text(const std::string& text) { parse_structure(text); }

json make_manifest(const std::string& command, json args) {
    return {{"tool", "cohrel"}, {"version", kVersion}, {"command", command}, {"args", std::move(args)}};
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e)) return 2;
    if (dynamic_cast<const UnsupportedSystemError*>(&e)) return 3;
    if (dynamic_cast<const PreconditionError*>(&e)) return 4;
    if (dynamic_cast<const NumericError*>(&e)) return 5;
    return 1;
}

void execute(const json& manifest, const fs::path& out_dir, std::ostream& log) {
    if (!manifest.is_object() || !manifest.contains("args")) throw InputError("not a cohrel manifest");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
    write_json(out_dir / "manifest.json", manifest);
    run_command(manifest, out_dir, log);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Component reliability from system-level failure data"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out_dir, structure, input;
    int n = 0, np_grid = 256, wb_grid = 201, mk_grid = 201;
    std::optional<int> iterations, burnin, thin;
    std::optional<double> mask_p, t_max;
    std::vector<std::string> dists{"weibull:1,1"}, priors{"exp:1.0"}, curves;
    std::vector<double> ts;
    std::string wb_preset = "default", mk_preset = "masked", chain, manifest_path;
    bool fix2 = false, fix3 = false, sym13 = false;
    double gamma_shape = 0.001, gamma_rate = 0.001;

    auto add_seed = [&](CLI::App* s) {
        s->add_option("--seed", seed, "RNG seed (falls back to COHREL_SEED, then 1)");
    };
    auto add_mcmc = [&](CLI::App* s) {
        s->add_option("--iterations", iterations, "total iterations");
        s->add_option("--burnin", burnin, "discarded iterations");
        s->add_option("--thin", thin, "keep every k-th draw after burn-in");
    };

    auto* sim = app.add_subcommand("simulate", "simulate a coherent-system dataset");
    sim->add_option("--structure", structure, "structure, e.g. \"koutofm(2,3)\" or \"min(1,max(2,3))\"")->required();
    sim->add_option("--n", n, "number of systems")->required()->check(CLI::NonNegativeNumber);
    sim->add_option("--dist", dists, "component distribution (one for all, or one per component)");
    sim->add_option("--mask-p", mask_p, "masking proportion; writes masked.csv")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--out", out_dir, "output directory")->required();
    add_seed(sim);

    auto* np = app.add_subcommand("estimate-np", "nonparametric Bayesian component estimates");
    np->add_option("--structure", structure, "structure expression")->required();
    np->add_option("--input", input, "systems.csv (id,t,delta)")->required();
    np->add_option("--prior", priors, "prior guess for X1 X2 X3, e.g. exp:1.0 (one applies to all)");
    np->add_option("--grid-points", np_grid, "evaluation grid size")->capture_default_str();
    np->add_option("--t-max", t_max, "grid end when there is no data");
    np->add_option("--out", out_dir, "output directory")->required();
    add_seed(np);

    auto* wb = app.add_subcommand("estimate-weibull", "three-parameter Weibull posterior per component");
    wb->add_option("--input", input, "components.csv")->required();
    wb->add_option("--preset", wb_preset, "default or bridge")->capture_default_str();
    wb->add_option("--t", ts, "times for reliability summaries");
    wb->add_option("--grid-points", wb_grid, "curve grid size")->capture_default_str();
    wb->add_option("--out", out_dir, "output directory")->required();
    add_seed(wb);
    add_mcmc(wb);

    auto* mk = app.add_subcommand("estimate-masked", "masked-data Weibull posterior per component");
    mk->add_option("--input", input, "masked.csv")->required();
    mk->add_option("--preset", mk_preset, "masked or harddrive")->capture_default_str();
    mk->add_flag("--fix-lambda2-zero", fix2, "masking never hides a working component");
    mk->add_flag("--fix-lambda3-zero", fix3, "masking never hides an earlier failure");
    mk->add_flag("--symmetric-13", sym13, "lambda1 = lambda3");
    mk->add_option("--gamma-shape", gamma_shape, "gamma prior shape for beta, eta, mu")->capture_default_str();
    mk->add_option("--gamma-rate", gamma_rate, "gamma prior rate for beta, eta, mu")->capture_default_str();
    mk->add_option("--t", ts, "times for reliability summaries");
    mk->add_option("--grid-points", mk_grid, "curve grid size")->capture_default_str();
    mk->add_option("--out", out_dir, "output directory")->required();
    add_seed(mk);
    add_mcmc(mk);

    auto* sm = app.add_subcommand("summarize", "tabulate curve files or a chain");
    sm->add_option("--curve", curves, "curve JSON files (same grid)");
    sm->add_option("--chain", chain, "chain CSV");
    sm->add_option("--t", ts, "times (default: the curve grid)");
    sm->add_option("--out", out_dir, "also write summary.txt and manifest.json here");

    auto* rp = app.add_subcommand("replay", "rerun a command from its manifest.json");
    rp->add_option("--manifest", manifest_path, "manifest.json")->required();
    rp->add_option("--out", out_dir, "output directory")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, x;
        const int code = app.exit(e, o, x);
        out << o.str();
        err << x.str();
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed() || np->parsed()) {
        try {
            check_structure_text(structure);
        } catch (const ParseError& e) {
            err << caret_diagnostic(structure, e) << "\n";
            return 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return exit_code_for(e);
        }
    }

    try {
        auto mcmc_args = [&](const std::string& name) {
            McmcConfig c = preset(name);
            if (iterations) c.iterations = *iterations;
            if (burnin) c.burn_in = *burnin;
            if (thin) c.thin = *thin;
            c.validate();
            return mcmc_json(c);
        };
        json manifest;
        if (sim->parsed()) {
            manifest = make_manifest("simulate", {{"structure", structure},
                                                  {"n", n},
                                                  {"seed", resolve_seed(seed)},
                                                  {"dist", dists},
                                                  {"mask_p", mask_p ? json(*mask_p) : json(nullptr)}});
        } else if (np->parsed()) {
            manifest = make_manifest("estimate-np", {{"structure", structure},
                                                     {"input", absolute(input)},
                                                     {"seed", resolve_seed(seed)},
                                                     {"prior", priors},
                                                     {"grid_points", np_grid},
                                                     {"t_max", t_max ? json(*t_max) : json(nullptr)}});
        } else if (wb->parsed()) {
            manifest = make_manifest("estimate-weibull", {{"input", absolute(input)},
                                                          {"seed", resolve_seed(seed)},
                                                          {"mcmc", mcmc_args(wb_preset)},
                                                          {"t", ts},
                                                          {"grid_points", wb_grid}});
        } else if (mk->parsed()) {
            manifest = make_manifest(
                "estimate-masked",
                {{"input", absolute(input)},
                 {"seed", resolve_seed(seed)},
                 {"mcmc", mcmc_args(mk_preset)},
                 {"constraints", {{"fix_lambda2_zero", fix2}, {"fix_lambda3_zero", fix3}, {"symmetric13", sym13}}},
                 {"theta_prior", {{"shape", gamma_shape}, {"rate", gamma_rate}}},
                 {"t", ts},
                 {"grid_points", mk_grid}});
        } else if (sm->parsed()) {
            std::vector<std::string> abs_curves;
            for (const auto& c : curves) abs_curves.push_back(absolute(c));
            manifest = make_manifest("summarize", {{"curves", abs_curves},
                                                   {"chain", chain.empty() ? json(nullptr) : json(absolute(chain))},
                                                   {"t", ts}});
            if (out_dir.empty()) {
                out << cmd_summarize(manifest.at("args"));
                return 0;
            }
        } else if (rp->parsed()) {
            manifest = read_json(manifest_path);
        }
        execute(manifest, out_dir, out);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace cohrel::cli
