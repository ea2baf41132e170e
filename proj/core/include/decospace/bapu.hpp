#pragma once

#include <vector>

#include "decospace/covering.hpp"
#include "decospace/grid.hpp"

namespace decospace {

// Polynomial ramp p_N(x) = (1/C_N) * integral_0^x t^N (1-t)^N dt with
// p_N(0) = 0, p_N(1) = 1 and N-fold flatness at both ends.
struct RampPoly {
    int N = 1;
    std::vector<double> coeffs; // coeffs[k] multiplies x^k

    double operator()(double x) const;        // polynomial value (no clamping)
    double derivative(int ell, double x) const;
    // Ramp extended to the line: 0 for x <= 0, 1 for x >= 1.
    double clamped(double x) const;
};

RampPoly ramp_poly(int N);

enum class CutoffProfile { tensor, radial };

// Piecewise-ramp cutoff: per-axis profile equal to 1 on [-(R+s/3), R+s/3],
// a ramp on R+s/3 <= |x| <= R+2s/3, and 0 beyond; in particular it is 1 on
// [-R, R]^d and supported inside (-(R+s), R+s)^d.
struct Cutoff {
    int N = 1;
    double R = 1.0;
    double s = 1.0;
    int d = 1;
    CutoffProfile profile = CutoffProfile::tensor;
    RampPoly ramp;

    double operator()(const Point& x, int d) const;
    double axis_value(double x) const;               // the 1-D profile
    double profile_derivative(int ell, double x) const; // its ell-th derivative
};

Cutoff cutoff(int N, double R, double s, int d, CutoffProfile profile);

// Frequency partition of unity subordinate to a truncated covering, built as
// normalized bump sums phi_i = u_i / sum_l u_l with u_i = u o S_i^{-1}.
// The bump u is a radial ramp profile equal to 1 on the inner set and
// supported in the open base set; `N` and `plateau_blend` (how far the
// plateau extends from the inner set toward the base boundary, in [0, 1))
// distinguish independent bump choices.
struct Partition {
    StructuredCovering covering;
    TruncatedIndexSet idx;
    // Denominator family: every covering member meeting the box that contains
    // the truncated family. Summing only over `idx` would give the outermost
    // profiles a jump at the truncation edge (nothing left to share the ramp
    // with), so their shapes, and everything derived from them, would depend
    // on the truncation instead of converging as it grows.
    TruncatedIndexSet den_idx;
    GridSpec grid;
    int N = 4;
    double plateau_blend = 0.0;
    RampPoly ramp;

    std::vector<std::vector<double>> phi; // [index position][grid flat]

    // Closed-form pieces, usable off-grid.
    double bump_normalized(std::size_t i, const Point& u) const; // u_i in base coords
    double denominator(const Point& xi) const;                   // sum_l u_l(xi)
    double phi_normalized(std::size_t i, const Point& u) const;  // phi_i o S_i
};

Partition build_partition(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                          const GridSpec& grid, int N, double plateau_blend = 0.0);

// BAPU constant sup_i |det T_i|^{max(1/p,1)-1} |F^{-1} phi_i|_{L^{min(1,p)}_{v0}};
// the per-index values are also exposed for the covariance checks.
std::vector<double> bapu_constant_per_index(const Partition& part, double p,
                                            const WeightSpec& v0);
double bapu_constant(const Partition& part, double p, const WeightSpec& v0);

// C^(alpha) = sup_i |d^alpha (phi_i o S_i)|_sup by spectral differentiation of
// the normalized profile on a dedicated profile grid.
double partition_derivative_sup(const Partition& part, const MultiIndex& alpha,
                                int profile_n = 8192);
std::vector<double> partition_derivative_sups_per_index(const Partition& part,
                                                        const MultiIndex& alpha,
                                                        int profile_n = 8192);

} // namespace decospace
