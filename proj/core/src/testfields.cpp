#include "decospace/testfields.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "decospace/bapu.hpp"

namespace decospace {

namespace {

// Box-Muller on top of the (portable, stable) mt19937_64 bit stream.
struct NormalSampler {
    std::mt19937_64 rng;
    explicit NormalSampler(std::uint64_t seed) : rng(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in (0, 1].
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    }
    cdouble complex_normal() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }
};

} // namespace

SampledField random_band_limited(const GridSpec& grid, std::uint64_t seed,
                                 double envelope_fraction) {
    if (!(envelope_fraction > 0.0 && envelope_fraction <= 1.0))
        throw config_error("testfields", "envelope", "envelope_fraction must lie in (0, 1]");
    const double outer = envelope_fraction * grid.trusted_radius();
    const double plateau = 0.5 * outer;
    RampPoly ramp = ramp_poly(4);

    NormalSampler gen(seed);
    std::vector<cdouble> fr(grid.size());
    for (std::size_t a = 0; a < fr.size(); ++a) {
        cdouble z = gen.complex_normal(); // drawn unconditionally: layout-stable
        Point xi = grid.freq_point(a);
        double rho = norm2(xi, grid.d);
        double env;
        if (rho <= plateau)
            env = 1.0;
        else if (rho >= outer)
            env = 0.0;
        else
            env = ramp((outer - rho) / (outer - plateau));
        fr[a] = env * z;
    }
    return SampledField::from_freq(grid, std::move(fr));
}

} // namespace decospace
