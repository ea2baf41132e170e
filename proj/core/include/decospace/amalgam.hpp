#pragma once

#include "decospace/grid.hpp"

namespace decospace {

// Windows for the local maximal function: cubes [-c, c]^d, optionally pushed
// through a scalar dilation (affine_cube(t, c) = (t*id)^{-T}[-c,c]^d, i.e. a
// cube of halfwidth c/t).
struct Window {
    double halfwidth = 1.0;

    static Window cube(double c);
    static Window affine_cube(double t, double c);
};

// (M_Q f)(x) = max over grid points y in x + Q of |f(y)| (periodic).
SampledField maximal_function(const SampledField& f, const Window& Q);

// |f|_{W_Q(L^p_v)} = |M_Q f|_{L^p_v}.
double wiener_norm(const SampledField& f, const Window& Q, double p, const WeightSpec& v);

// (osc_Q f)(x) = max over grid points y, z in x + Q of |f(y) - f(z)|,
// evaluated by pairwise reduction over the window point list.
SampledField oscillation(const SampledField& f, const Window& Q);

} // namespace decospace
