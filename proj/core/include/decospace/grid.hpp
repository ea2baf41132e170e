#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "decospace/errors.hpp"

namespace decospace {

using cdouble = std::complex<double>;

// Points and multi-indices live in at most two dimensions (d >= 3 is a
// non-goal); the second component is ignored when d == 1.
using Point = std::array<double, 2>;
using MultiIndex = std::array<int, 2>;

inline double dot(const Point& a, const Point& b, int d) {
    double s = 0.0;
    for (int m = 0; m < d; ++m) s += a[m] * b[m];
    return s;
}

inline double norm2(const Point& a, int d) {
    double s = 0.0;
    for (int m = 0; m < d; ++m) s += a[m] * a[m];
    return std::sqrt(s);
}

// Uniform periodic grid on the torus [-L, L)^d.
//
// Space samples sit at x_j = -L + j*h with h = 2L/n; frequency samples at
// xi_m = m/(2L) for m in {-n/2, ..., n/2 - 1}^d, stored in monotone (shifted)
// order so flat index j along an axis corresponds to m = j - n/2.
struct GridSpec {
    int d = 1;
    int n = 8;
    double L = 1.0;

    GridSpec() = default;
    GridSpec(int d_, int n_, double L_);

    std::size_t size() const;
    double h() const { return 2.0 * L / n; }
    double freq_step() const { return 1.0 / (2.0 * L); }
    double nyquist() const { return n / (4.0 * L); }
    // Frequency content is only trusted on the inner 75% of the Nyquist band.
    double trusted_radius() const { return 0.75 * nyquist(); }

    MultiIndex unflatten(std::size_t flat) const;
    std::size_t flatten(const MultiIndex& ix) const;
    Point point(std::size_t flat) const;      // space sample x_j
    Point freq_point(std::size_t flat) const; // frequency sample xi_m

    bool operator==(const GridSpec&) const = default;
};

// Immutable periodized field with paired space/frequency representations.
// Whichever side is missing is computed lazily (one FFT) and cached; fields
// are cheap to copy (shared state) and safe to use concurrently.
class SampledField {
public:
    SampledField() = default;
    static SampledField from_space(const GridSpec& spec, std::vector<cdouble> values);
    static SampledField from_freq(const GridSpec& spec, std::vector<cdouble> values);
    static SampledField zero(const GridSpec& spec);

    bool empty() const { return !data_; }
    const GridSpec& spec() const;
    std::span<const cdouble> space() const;
    std::span<const cdouble> freq() const;

private:
    struct Data;
    std::shared_ptr<Data> data_;
};

// Forward transform as a standalone operation: returns the same field (the
// frequency samples approximate the unitary Fourier transform,
// fhat(xi_m) = h^d * sum_j f(x_j) e^{-2 pi i x_j . xi_m}).
SampledField dft(const SampledField& f);

// Polynomial-bracket weights v^(mu)(x) = (1+|x|^2)^{mu/2} and the companion
// v0(x) = [2(1+|x|)]^{|mu|} used in the submultiplicativity estimates.
struct WeightSpec {
    enum class Kind { one, bracket, companion };
    Kind kind = Kind::one;
    double mu = 0.0;

    static WeightSpec one() { return {Kind::one, 0.0}; }
    static WeightSpec bracket(double mu) { return {Kind::bracket, mu}; }
    static WeightSpec companion(double mu) { return {Kind::companion, mu}; }

    double operator()(const Point& x, int d) const;
    double K() const { return std::abs(mu); }
    double omega0() const { return 1.0; }
    double omega1() const { return std::pow(2.0, std::abs(mu)); }
};

// Weighted L^p quasi-norm (Sigma |v(x) f(x)|^p h^d)^(1/p); grid max for
// p = infinity (pass p = std::numeric_limits<double>::infinity()).
double weighted_lp_norm(const SampledField& f, double p, const WeightSpec& v);

// Space-domain prototype generators gamma with rules for gammahat.
class PrototypeSpec {
public:
    enum class Kind { gaussian, bspline, cutoff_transform, tabulated };

    // gamma(x) = a^{d/2} exp(-pi a |x|^2), gammahat(xi) = exp(-pi |xi|^2 / a).
    static PrototypeSpec gaussian(double a = 1.0);
    // Centered cardinal B-spline of order m: (m+1)-fold convolution of the
    // unit box per axis, gammahat(xi) = prod sinc(xi_i)^{m+1}.
    static PrototypeSpec bspline(int order);
    // gamma = F^{-1} psi for the tensor piecewise-ramp cutoff psi with
    // smoothness N, plateau halfwidth R, transition width s.
    static PrototypeSpec cutoff_transform(int N, double R, double s);
    static PrototypeSpec tabulated(SampledField field);

    Kind kind() const { return kind_; }
    double gaussian_a() const { return a_; }
    int bspline_order() const { return order_; }
    bool has_closed_form_hat() const;
    bool compactly_supported() const;
    // True only for a tabulated prototype whose samples all vanish.
    bool is_identically_zero() const;

    // Point evaluations. For tabulated prototypes hat() uses the stored grid
    // (nearest frequency bin is NOT used; evaluation is restricted to grid
    // points and throws otherwise), so criteria quadratures require a
    // closed-form kind or a compactly supported gamma.
    double support_radius() const; // inf for gaussian/tabulated
    cdouble hat(const Point& xi, int d) const;
    cdouble value(const Point& x, int d) const;

    // Space samples of gamma on a grid.
    SampledField sample_space(const GridSpec& grid) const;

    // d^alpha gammahat at an arbitrary point. Exact (recurrence) for the
    // gaussian; quadrature over the compact support for bspline and
    // cutoff_transform; unsupported for tabulated.
    cdouble hat_derivative_at(const MultiIndex& alpha, const Point& xi, int d) const;

private:
    Kind kind_ = Kind::gaussian;
    double a_ = 1.0;                       // gaussian width
    int order_ = 3;                        // bspline order
    int N_ = 3; double R_ = 1.0, s_ = 1.0; // cutoff parameters
    SampledField field_;                   // tabulated samples
};

// Frequency samples of d^alpha gammahat on the grid: exact for closed-form
// kinds, DFT of the monomial-weighted space samples otherwise. |alpha| is
// capped at 12.
SampledField hat_derivative(const PrototypeSpec& gamma, const MultiIndex& alpha,
                            const GridSpec& grid);

// gamma^(i) = |det T| M_b [gamma o T^T] (l1) or its |det T|^{-1/2} multiple
// (l2), with T = t * identity (non-diagonal linear parts are a non-goal).
enum class Normalization { l1, l2 };
SampledField modulate_dilate(const PrototypeSpec& gamma, double t, const Point& b,
                             Normalization norm, const GridSpec& grid);

// Trigonometric interpolation: evaluate the band-limited interpolant of f at
// arbitrary points (exact for band-limited grid functions).
std::vector<cdouble> fourier_interpolate(const SampledField& f,
                                         std::span<const Point> points);

// Guard helper: relative spectral mass of f outside the trusted band. The
// multiplier pipelines raise an aliasing error when this exceeds 1e-6.
double untrusted_spectral_fraction(const SampledField& f);
void require_band_limited(const SampledField& f, const std::string& module);

} // namespace decospace
