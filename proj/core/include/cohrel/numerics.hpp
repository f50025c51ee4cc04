#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace cohrel {

inline constexpr int kDefaultPanels = 64;

// Composite Simpson; panels must be even and >= 2. Returns 0 when a == b.
// Throws NumericError if f is not finite at a node.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = kDefaultPanels);

// Running Simpson integral over equally spaced nodes (odd count). Even nodes
// get the composite rule; odd nodes add the first half of the local parabola.
std::vector<double> cumulative_simpson(std::span<const double> values, double h);

// Strictly increasing times; jump[k] flags an atom at times[k].
struct Grid {
    std::vector<double> times;
    std::vector<bool> jump;

    Grid() = default;
    Grid(std::vector<double> t, std::vector<bool> j);
};

// f(s, k) is evaluated on the open segment (times[k], times[k+1]); endpoint
// values are one-sided limits from inside the segment, so atoms never enter.
using SegmentFn = std::function<double(double, std::size_t)>;

double integrate_between_jumps(const SegmentFn& f, const Grid& grid, int panels = kDefaultPanels);
double integrate_between_jumps(const std::function<double(double)>& f, const Grid& grid, int panels = kDefaultPanels);

// Deterministic generator keyed by (seed, stream). Distinct streams are
// seeded through splitmix64 so chains never share state.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_, stream_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

double uniform(RandomStream& rs);                       // [0, 1)
double gamma_draw(double shape, double rate, RandomStream& rs);
double beta_draw(double a, double b, RandomStream& rs);
double normal_draw(double mean, double sd, RandomStream& rs);
// Returns the 0-based category. Probabilities must sum to 1 within 1e-12.
std::size_t multinomial_draw(std::span<const double> probs, RandomStream& rs);

}  // namespace cohrel
