#include "decospace/grid.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "decospace/bapu.hpp"
#include "fft_internal.hpp"

namespace decospace {

namespace detail {

void fft_raw(int rank, const int* dims, const std::complex<double>* in,
             std::complex<double>* out, int sign) {
    static std::mutex planner_mutex;
    std::size_t total = 1;
    for (int m = 0; m < rank; ++m) total *= static_cast<std::size_t>(dims[m]);

    fftw_complex* buf_in = fftw_alloc_complex(total);
    fftw_complex* buf_out = fftw_alloc_complex(total);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft(rank, dims, buf_in, buf_out,
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < total; ++j) {
        buf_in[j][0] = in[j].real();
        buf_in[j][1] = in[j].imag();
    }
    fftw_execute(plan);
    for (std::size_t j = 0; j < total; ++j) out[j] = {buf_out[j][0], buf_out[j][1]};
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf_in);
    fftw_free(buf_out);
}

} // namespace detail

GridSpec::GridSpec(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    if (d != 1 && d != 2)
        throw config_error("grid", "dimension", "d must be 1 or 2, got " + std::to_string(d));
    if (n < 8 || n % 2 != 0)
        throw config_error("grid", "samples", "n must be even and >= 8, got " + std::to_string(n));
    if (!(L > 0.0))
        throw config_error("grid", "halfwidth", "L must be positive");
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int m = 0; m < d; ++m) s *= static_cast<std::size_t>(n);
    return s;
}

MultiIndex GridSpec::unflatten(std::size_t flat) const {
    MultiIndex ix{0, 0};
    if (d == 1) {
        ix[0] = static_cast<int>(flat);
    } else {
        ix[0] = static_cast<int>(flat / static_cast<std::size_t>(n));
        ix[1] = static_cast<int>(flat % static_cast<std::size_t>(n));
    }
    return ix;
}

std::size_t GridSpec::flatten(const MultiIndex& ix) const {
    if (d == 1) return static_cast<std::size_t>(ix[0]);
    return static_cast<std::size_t>(ix[0]) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(ix[1]);
}

Point GridSpec::point(std::size_t flat) const {
    MultiIndex ix = unflatten(flat);
    Point x{0.0, 0.0};
    for (int m = 0; m < d; ++m) x[m] = -L + ix[m] * h();
    return x;
}

Point GridSpec::freq_point(std::size_t flat) const {
    MultiIndex ix = unflatten(flat);
    Point xi{0.0, 0.0};
    for (int m = 0; m < d; ++m) xi[m] = (ix[m] - n / 2) * freq_step();
    return xi;
}

// ---------------------------------------------------------------------------
// SampledField

struct SampledField::Data {
    GridSpec spec;
    mutable std::mutex mutex;
    mutable std::vector<cdouble> space;
    mutable std::vector<cdouble> freq;
    mutable bool has_space = false;
    mutable bool has_freq = false;
};

namespace {

// space -> freq: fhat(xi_m) = h^d (-1)^{sum m} FFT_fwd(f)[m mod n], shifted
// storage. freq -> space inverts the same relation.
std::vector<cdouble> space_to_freq(const GridSpec& g, const std::vector<cdouble>& sp) {
    std::vector<cdouble> raw(g.size());
    int dims[2] = {g.n, g.n};
    detail::fft_raw(g.d, dims, sp.data(), raw.data(), -1);

    const double scale = std::pow(g.h(), g.d);
    std::vector<cdouble> out(g.size());
    for (std::size_t a = 0; a < out.size(); ++a) {
        MultiIndex ix = g.unflatten(a);
        MultiIndex rx{0, 0};
        int msum = 0;
        for (int m = 0; m < g.d; ++m) {
            int mm = ix[m] - g.n / 2;
            msum += mm;
            rx[m] = (mm + g.n) % g.n;
        }
        double sign = (msum % 2 == 0) ? 1.0 : -1.0;
        out[a] = scale * sign * raw[g.flatten(rx)];
    }
    return out;
}

std::vector<cdouble> freq_to_space(const GridSpec& g, const std::vector<cdouble>& fr) {
    std::vector<cdouble> raw(g.size());
    for (std::size_t a = 0; a < raw.size(); ++a) {
        MultiIndex ix = g.unflatten(a);
        MultiIndex rx{0, 0};
        int msum = 0;
        for (int m = 0; m < g.d; ++m) {
            int mm = ix[m] - g.n / 2;
            msum += mm;
            rx[m] = (mm + g.n) % g.n;
        }
        double sign = (msum % 2 == 0) ? 1.0 : -1.0;
        raw[g.flatten(rx)] = sign * fr[a];
    }
    std::vector<cdouble> out(g.size());
    int dims[2] = {g.n, g.n};
    detail::fft_raw(g.d, dims, raw.data(), out.data(), +1);
    const double scale = std::pow(1.0 / (2.0 * g.L), g.d);
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace

SampledField SampledField::from_space(const GridSpec& spec, std::vector<cdouble> values) {
    if (values.size() != spec.size())
        throw config_error("grid", "field_size", "space sample count does not match grid");
    SampledField f;
    f.data_ = std::make_shared<Data>();
    f.data_->spec = spec;
    f.data_->space = std::move(values);
    f.data_->has_space = true;
    return f;
}

SampledField SampledField::from_freq(const GridSpec& spec, std::vector<cdouble> values) {
    if (values.size() != spec.size())
        throw config_error("grid", "field_size", "frequency sample count does not match grid");
    SampledField f;
    f.data_ = std::make_shared<Data>();
    f.data_->spec = spec;
    f.data_->freq = std::move(values);
    f.data_->has_freq = true;
    return f;
}

SampledField SampledField::zero(const GridSpec& spec) {
    return from_space(spec, std::vector<cdouble>(spec.size(), cdouble{0.0, 0.0}));
}

const GridSpec& SampledField::spec() const {
    if (!data_) throw config_error("grid", "empty_field", "field is empty");
    return data_->spec;
}

std::span<const cdouble> SampledField::space() const {
    if (!data_) throw config_error("grid", "empty_field", "field is empty");
    std::lock_guard<std::mutex> lock(data_->mutex);
    if (!data_->has_space) {
        data_->space = freq_to_space(data_->spec, data_->freq);
        data_->has_space = true;
    }
    return data_->space;
}

std::span<const cdouble> SampledField::freq() const {
    if (!data_) throw config_error("grid", "empty_field", "field is empty");
    std::lock_guard<std::mutex> lock(data_->mutex);
    if (!data_->has_freq) {
        data_->freq = space_to_freq(data_->spec, data_->space);
        data_->has_freq = true;
    }
    return data_->freq;
}

SampledField dft(const SampledField& f) {
    f.freq();
    return f;
}

// ---------------------------------------------------------------------------
// Weights and norms

double WeightSpec::operator()(const Point& x, int d) const {
    switch (kind) {
    case Kind::one:
        return 1.0;
    case Kind::bracket: {
        double r2 = 0.0;
        for (int m = 0; m < d; ++m) r2 += x[m] * x[m];
        return std::pow(1.0 + r2, mu / 2.0);
    }
    case Kind::companion: {
        double r = norm2(x, d);
        return std::pow(2.0 * (1.0 + r), std::abs(mu));
    }
    }
    return 1.0;
}

double weighted_lp_norm(const SampledField& f, double p, const WeightSpec& v) {
    if (!(p > 0.0))
        throw config_error("grid", "norm_exponent", "p must be positive");
    const GridSpec& g = f.spec();
    auto sp = f.space();
    if (std::isinf(p)) {
        double mx = 0.0;
        for (std::size_t j = 0; j < sp.size(); ++j)
            mx = std::max(mx, v(g.point(j), g.d) * std::abs(sp[j]));
        return mx;
    }
    const double cell = std::pow(g.h(), g.d);
    double acc = 0.0;
    for (std::size_t j = 0; j < sp.size(); ++j) {
        double t = v(g.point(j), g.d) * std::abs(sp[j]);
        acc += std::pow(t, p);
    }
    return std::pow(acc * cell, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Prototypes

PrototypeSpec PrototypeSpec::gaussian(double a) {
    if (!(a > 0.0)) throw config_error("grid", "prototype", "gaussian width must be positive");
    PrototypeSpec p;
    p.kind_ = Kind::gaussian;
    p.a_ = a;
    return p;
}

PrototypeSpec PrototypeSpec::bspline(int order) {
    if (order < 1 || order > 16)
        throw config_error("grid", "prototype", "bspline order must be in [1,16]");
    PrototypeSpec p;
    p.kind_ = Kind::bspline;
    p.order_ = order;
    return p;
}

PrototypeSpec PrototypeSpec::cutoff_transform(int N, double R, double s) {
    if (N < 1 || N > 12 || !(R > 0.0) || !(s > 0.0))
        throw config_error("grid", "prototype", "cutoff_transform needs 1<=N<=12, R>0, s>0");
    PrototypeSpec p;
    p.kind_ = Kind::cutoff_transform;
    p.N_ = N;
    p.R_ = R;
    p.s_ = s;
    return p;
}

PrototypeSpec PrototypeSpec::tabulated(SampledField field) {
    PrototypeSpec p;
    p.kind_ = Kind::tabulated;
    p.field_ = std::move(field);
    return p;
}

bool PrototypeSpec::is_identically_zero() const {
    if (kind_ != Kind::tabulated || field_.empty()) return false;
    for (const cdouble& v : field_.space())
        if (v != cdouble{0.0, 0.0}) return false;
    return true;
}

bool PrototypeSpec::has_closed_form_hat() const {
    return kind_ == Kind::gaussian || kind_ == Kind::bspline || kind_ == Kind::cutoff_transform;
}

bool PrototypeSpec::compactly_supported() const { return kind_ == Kind::bspline; }

double PrototypeSpec::support_radius() const {
    if (kind_ == Kind::bspline) return (order_ + 1) / 2.0;
    return std::numeric_limits<double>::infinity();
}

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        double t = std::numbers::pi * x;
        return 1.0 - t * t / 6.0;
    }
    return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

// Centered cardinal B-spline of order m ((m+1)-fold box convolution),
// supported on [-(m+1)/2, (m+1)/2].
double bspline_value_1d(int m, double x) {
    double t = x + (m + 1) / 2.0;
    if (t <= 0.0 || t >= m + 1) return 0.0;
    double fact = 1.0;
    for (int j = 2; j <= m; ++j) fact *= j;
    double acc = 0.0;
    for (int j = 0; j <= m + 1; ++j) {
        double u = t - j;
        if (u <= 0.0) break;
        double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        acc += sgn * binom(m + 1, j) * std::pow(u, m);
    }
    return acc / fact;
}

// Per-axis polynomial factors P_k with d^k/dxi^k e^{-pi xi^2/a}
//   = P_k(xi) e^{-pi xi^2/a};  P_{k+1} = P_k' - (2 pi / a) xi P_k.
std::vector<double> gaussian_hermite_coeffs(int k, double a) {
    std::vector<double> P{1.0};
    const double c = 2.0 * std::numbers::pi / a;
    for (int step = 0; step < k; ++step) {
        std::vector<double> next(P.size() + 1, 0.0);
        for (std::size_t j = 1; j < P.size(); ++j) next[j - 1] += j * P[j]; // P'
        for (std::size_t j = 0; j < P.size(); ++j) next[j + 1] -= c * P[j]; // -c xi P
        P = std::move(next);
    }
    return P;
}

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * x + c[j];
    return acc;
}

} // namespace

cdouble PrototypeSpec::hat(const Point& xi, int d) const {
    switch (kind_) {
    case Kind::gaussian: {
        double r2 = 0.0;
        for (int m = 0; m < d; ++m) r2 += xi[m] * xi[m];
        return std::exp(-std::numbers::pi * r2 / a_);
    }
    case Kind::bspline: {
        double v = 1.0;
        for (int m = 0; m < d; ++m) v *= std::pow(sinc(xi[m]), order_ + 1);
        return v;
    }
    case Kind::cutoff_transform: {
        Cutoff psi = cutoff(N_, R_, s_, d, CutoffProfile::tensor);
        return psi(xi, d);
    }
    case Kind::tabulated:
        throw config_error("grid", "prototype",
                           "tabulated prototypes have no closed-form transform");
    }
    return 0.0;
}

cdouble PrototypeSpec::value(const Point& x, int d) const {
    switch (kind_) {
    case Kind::gaussian: {
        double r2 = 0.0;
        for (int m = 0; m < d; ++m) r2 += x[m] * x[m];
        return std::pow(a_, d / 2.0) * std::exp(-std::numbers::pi * a_ * r2);
    }
    case Kind::bspline: {
        double v = 1.0;
        for (int m = 0; m < d; ++m) v *= bspline_value_1d(order_, x[m]);
        return v;
    }
    case Kind::cutoff_transform:
        throw config_error("grid", "prototype",
                           "cutoff_transform has no closed-form space values; sample it");
    case Kind::tabulated:
        throw config_error("grid", "prototype",
                           "tabulated prototypes support grid sampling only");
    }
    return 0.0;
}

SampledField PrototypeSpec::sample_space(const GridSpec& grid) const {
    switch (kind_) {
    case Kind::gaussian:
    case Kind::bspline: {
        std::vector<cdouble> vals(grid.size());
        for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = value(grid.point(j), grid.d);
        return SampledField::from_space(grid, std::move(vals));
    }
    case Kind::cutoff_transform: {
        Cutoff psi = cutoff(N_, R_, s_, grid.d, CutoffProfile::tensor);
        std::vector<cdouble> vals(grid.size());
        for (std::size_t j = 0; j < vals.size(); ++j)
            vals[j] = psi(grid.freq_point(j), grid.d);
        return SampledField::from_freq(grid, std::move(vals));
    }
    case Kind::tabulated:
        if (!(field_.spec() == grid))
            throw config_error("grid", "prototype", "tabulated prototype grid mismatch");
        return field_;
    }
    throw config_error("grid", "prototype", "unreachable");
}

cdouble PrototypeSpec::hat_derivative_at(const MultiIndex& alpha, const Point& xi,
                                         int d) const {
    switch (kind_) {
    case Kind::gaussian: {
        cdouble v = 1.0;
        for (int m = 0; m < d; ++m) {
            auto P = gaussian_hermite_coeffs(alpha[m], a_);
            v *= poly_eval(P, xi[m]) * std::exp(-std::numbers::pi * xi[m] * xi[m] / a_);
        }
        return v;
    }
    case Kind::cutoff_transform: {
        Cutoff psi = cutoff(N_, R_, s_, d, CutoffProfile::tensor);
        double v = 1.0;
        for (int m = 0; m < d; ++m) v *= psi.profile_derivative(alpha[m], xi[m]);
        return v;
    }
    case Kind::bspline: {
        // d^alpha gammahat(xi) = integral over the compact support of
        // (-2 pi i x)^alpha gamma(x) e^{-2 pi i x.xi} dx, midpoint rule.
        const int nodes = 2048;
        const double half = support_radius();
        const double step = 2.0 * half / nodes;
        cdouble acc = 0.0;
        if (d == 1) {
            for (int j = 0; j < nodes; ++j) {
                double x = -half + (j + 0.5) * step;
                cdouble mono = std::pow(cdouble(0.0, -2.0 * std::numbers::pi * x), alpha[0]);
                acc += mono * bspline_value_1d(order_, x) *
                       std::exp(cdouble(0.0, -2.0 * std::numbers::pi * x * xi[0]));
            }
            return acc * step;
        }
        // Tensor structure: the 2-D transform factorizes per axis.
        cdouble per_axis[2];
        for (int m = 0; m < d; ++m) {
            cdouble a1 = 0.0;
            for (int j = 0; j < nodes; ++j) {
                double x = -half + (j + 0.5) * step;
                cdouble mono = std::pow(cdouble(0.0, -2.0 * std::numbers::pi * x), alpha[m]);
                a1 += mono * bspline_value_1d(order_, x) *
                      std::exp(cdouble(0.0, -2.0 * std::numbers::pi * x * xi[m]));
            }
            per_axis[m] = a1 * step;
        }
        return per_axis[0] * per_axis[1];
    }
    case Kind::tabulated:
        throw config_error("grid", "prototype",
                           "hat_derivative_at is unsupported for tabulated prototypes");
    }
    return 0.0;
}

SampledField hat_derivative(const PrototypeSpec& gamma, const MultiIndex& alpha,
                            const GridSpec& grid) {
    int order = 0;
    for (int m = 0; m < grid.d; ++m) {
        if (alpha[m] < 0)
            throw config_error("grid", "hat_derivative", "negative multi-index");
        order += alpha[m];
    }
    if (order > 12)
        throw config_error("grid", "hat_derivative", "|alpha| exceeds the cap of 12");

    if (gamma.kind() == PrototypeSpec::Kind::gaussian ||
        gamma.kind() == PrototypeSpec::Kind::cutoff_transform) {
        std::vector<cdouble> vals(grid.size());
        for (std::size_t j = 0; j < vals.size(); ++j)
            vals[j] = gamma.hat_derivative_at(alpha, grid.freq_point(j), grid.d);
        return SampledField::from_freq(grid, std::move(vals));
    }

    // DFT route: transform of the monomial-weighted space samples.
    SampledField g = gamma.sample_space(grid);
    auto sp = g.space();
    if (gamma.kind() == PrototypeSpec::Kind::tabulated) {
        // Reject supports touching the torus boundary: the monomial weight is
        // discontinuous across the wrap-around.
        double edge = 0.0;
        for (std::size_t j = 0; j < sp.size(); ++j) {
            Point x = grid.point(j);
            bool boundary = false;
            for (int m = 0; m < grid.d; ++m)
                if (std::abs(x[m] + grid.L) < 0.5 * grid.h() ||
                    x[m] > grid.L - 1.5 * grid.h())
                    boundary = true;
            if (boundary) edge = std::max(edge, std::abs(sp[j]));
        }
        if (edge > 1e-12)
            throw config_error("grid", "hat_derivative",
                               "tabulated prototype support touches the torus boundary");
    }
    std::vector<cdouble> weighted(sp.size());
    for (std::size_t j = 0; j < sp.size(); ++j) {
        Point x = grid.point(j);
        cdouble mono = 1.0;
        for (int m = 0; m < grid.d; ++m)
            mono *= std::pow(cdouble(0.0, -2.0 * std::numbers::pi * x[m]), alpha[m]);
        weighted[j] = mono * sp[j];
    }
    SampledField wf = SampledField::from_space(grid, std::move(weighted));
    return SampledField::from_freq(grid, std::vector<cdouble>(wf.freq().begin(), wf.freq().end()));
}

SampledField modulate_dilate(const PrototypeSpec& gamma, double t, const Point& b,
                             Normalization norm, const GridSpec& grid) {
    if (!(std::abs(t) > 0.0))
        throw config_error("grid", "modulate_dilate", "singular dilation (t = 0)");
    const double det = std::pow(std::abs(t), grid.d);
    const double amp = (norm == Normalization::l1) ? 1.0 : 1.0 / std::sqrt(det);

    if (gamma.has_closed_form_hat()) {
        // F[gamma^(i)](xi) = gammahat((xi - b)/t).
        std::vector<cdouble> vals(grid.size());
        for (std::size_t j = 0; j < vals.size(); ++j) {
            Point xi = grid.freq_point(j);
            Point u{0.0, 0.0};
            for (int m = 0; m < grid.d; ++m) u[m] = (xi[m] - b[m]) / t;
            vals[j] = amp * gamma.hat(u, grid.d);
        }
        return SampledField::from_freq(grid, std::move(vals));
    }

    // Tabulated: gamma^(i)(x) = |det T| e^{2 pi i b.x} gamma(t x), with gamma
    // evaluated off-grid by trigonometric interpolation.
    SampledField g = gamma.sample_space(grid);
    std::vector<Point> pts(grid.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        Point x = grid.point(j);
        Point tx{0.0, 0.0};
        for (int m = 0; m < grid.d; ++m) {
            double v = t * x[m];
            // Wrap into the torus for the periodized evaluation.
            v = std::remainder(v, 2.0 * grid.L);
            if (v >= grid.L) v -= 2.0 * grid.L;
            if (v < -grid.L) v += 2.0 * grid.L;
            tx[m] = v;
        }
        pts[j] = tx;
    }
    std::vector<cdouble> scaled = fourier_interpolate(g, pts);
    std::vector<cdouble> vals(grid.size());
    for (std::size_t j = 0; j < vals.size(); ++j) {
        Point x = grid.point(j);
        cdouble mod = std::exp(cdouble(0.0, 2.0 * std::numbers::pi * dot(b, x, grid.d)));
        vals[j] = amp * det * mod * scaled[j];
    }
    return SampledField::from_space(grid, std::move(vals));
}

std::vector<cdouble> fourier_interpolate(const SampledField& f,
                                         std::span<const Point> points) {
    const GridSpec& g = f.spec();
    auto fr = f.freq();
    const double scale = std::pow(1.0 / (2.0 * g.L), g.d);
    std::vector<cdouble> out(points.size(), cdouble{0.0, 0.0});
    for (std::size_t p = 0; p < points.size(); ++p) {
        cdouble acc = 0.0;
        for (std::size_t a = 0; a < fr.size(); ++a) {
            if (fr[a] == cdouble{0.0, 0.0}) continue;
            Point xi = g.freq_point(a);
            acc += fr[a] * std::exp(cdouble(0.0, 2.0 * std::numbers::pi *
                                                     dot(points[p], xi, g.d)));
        }
        out[p] = acc * scale;
    }
    return out;
}

double untrusted_spectral_fraction(const SampledField& f) {
    const GridSpec& g = f.spec();
    auto fr = f.freq();
    const double band = g.trusted_radius();
    double inside = 0.0, outside = 0.0;
    for (std::size_t a = 0; a < fr.size(); ++a) {
        Point xi = g.freq_point(a);
        double linf = 0.0;
        for (int m = 0; m < g.d; ++m) linf = std::max(linf, std::abs(xi[m]));
        double e = std::norm(fr[a]);
        if (linf <= band)
            inside += e;
        else
            outside += e;
    }
    double total = inside + outside;
    if (total == 0.0) return 0.0;
    return std::sqrt(outside / total);
}

void require_band_limited(const SampledField& f, const std::string& module) {
    double frac = untrusted_spectral_fraction(f);
    if (frac > 1e-6)
        throw aliasing_error(module, "trusted_band",
                             "spectral mass outside the trusted band: fraction " +
                                 std::to_string(frac));
}

} // namespace decospace
