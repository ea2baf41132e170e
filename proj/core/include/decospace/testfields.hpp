#pragma once

#include <cstdint>

#include "decospace/grid.hpp"

namespace decospace {

// Seeded random band-limited field: fhat = (complex standard normals) *
// (smooth radial envelope), with the envelope equal to 1 up to
// 0.5 * envelope_fraction * trusted_radius and supported inside
// envelope_fraction * trusted_radius. Deterministic for a given
// (grid, seed, envelope_fraction); the normal sampler is hand-rolled
// (Box-Muller) so outputs do not depend on the standard library.
SampledField random_band_limited(const GridSpec& grid, std::uint64_t seed,
                                 double envelope_fraction = 0.8);

} // namespace decospace
