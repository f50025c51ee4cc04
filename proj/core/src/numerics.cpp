#include "cohrel/numerics.hpp"

#include <cmath>
#include <string>

#include "cohrel/errors.hpp"

namespace cohrel {

namespace {

double finite_or_throw(double v, double at) {
    if (!std::isfinite(v)) throw NumericError("integrand not finite at s = " + std::to_string(at));
    return v;
}

void check_panels(int panels) {
    if (panels < 2 || panels % 2) throw InputError("Simpson needs an even panel count >= 2");
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    check_panels(panels);
    if (a == b) return 0.0;
    const double h = (b - a) / panels;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < panels; ++i) {
        const double s = a + i * h;
        (i % 2 ? odd : even) += finite_or_throw(f(s), s);
    }
    return h / 3.0 * (finite_or_throw(f(a), a) + 4.0 * odd + 2.0 * even + finite_or_throw(f(b), b));
}

std::vector<double> cumulative_simpson(std::span<const double> v, double h) {
    if (v.size() < 3 || v.size() % 2 == 0) throw InputError("cumulative Simpson needs an odd node count >= 3");
    std::vector<double> c(v.size(), 0.0);
    for (std::size_t i = 0; i + 2 < v.size(); i += 2) {
        c[i + 1] = c[i] + h / 12.0 * (5.0 * v[i] + 8.0 * v[i + 1] - v[i + 2]);
        c[i + 2] = c[i] + h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
    }
    return c;
}

Grid::Grid(std::vector<double> t, std::vector<bool> j) : times(std::move(t)), jump(std::move(j)) {
    if (jump.size() != times.size()) throw DimensionError("grid jump flags must match times");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InputError("grid times must be strictly increasing");
}

double integrate_between_jumps(const SegmentFn& f, const Grid& grid, int panels) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < grid.times.size(); ++k)
        total += simpson([&](double s) { return f(s, k); }, grid.times[k], grid.times[k + 1], panels);
    return total;
}

double integrate_between_jumps(const std::function<double(double)>& f, const Grid& grid, int panels) {
    return integrate_between_jumps([&](double s, std::size_t) { return f(s); }, grid, panels);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

double uniform(RandomStream& rs) { return std::uniform_real_distribution<double>(0.0, 1.0)(rs.engine()); }

double gamma_draw(double shape, double rate, RandomStream& rs) {
    if (!(shape > 0) || !(rate > 0)) throw InputError("gamma draw needs positive shape and rate");
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rs.engine());
}

double beta_draw(double a, double b, RandomStream& rs) {
    const double x = gamma_draw(a, 1.0, rs);
    const double y = gamma_draw(b, 1.0, rs);
    return x / (x + y);
}

double normal_draw(double mean, double sd, RandomStream& rs) {
    return std::normal_distribution<double>(mean, sd)(rs.engine());
}

std::size_t multinomial_draw(std::span<const double> probs, RandomStream& rs) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InputError("multinomial probabilities must be nonnegative");
        sum += p;
    }
    if (probs.empty() || std::abs(sum - 1.0) > 1e-12) throw InputError("multinomial probabilities must sum to 1");
    const double u = uniform(rs);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] <= 0.0) continue;
        last = k;
        acc += probs[k];
        if (u < acc) return k;
    }
    return last;
}

}  // namespace cohrel
