#include "decospace/bapu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace decospace {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

} // namespace

RampPoly ramp_poly(int N) {
    if (N < 1 || N > 12) throw config_error("bapu", "ramp_order", "ramp order must be in [1, 12]");
    // integral_0^x t^N (1-t)^N dt = sum_m C(N,m) (-1)^m x^{N+m+1}/(N+m+1).
    double CN = 0.0;
    std::vector<double> raw(2 * N + 2, 0.0);
    for (int m = 0; m <= N; ++m) {
        double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        double c = sgn * binom(N, m) / (N + m + 1);
        raw[N + m + 1] = c;
        CN += c;
    }
    RampPoly p;
    p.N = N;
    p.coeffs.resize(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) p.coeffs[k] = raw[k] / CN;
    return p;
}

namespace {

// Horner evaluation of the monomial form; accurate near x = 0 (every term
// carries a positive power of x) but cancellation-prone near x = 1.
double ramp_horner(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
}

double ramp_horner_derivative(const std::vector<double>& coeffs, int ell, double x) {
    double acc = 0.0;
    for (std::size_t k = static_cast<std::size_t>(ell); k < coeffs.size(); ++k) {
        double fall = 1.0;
        for (int j = 0; j < ell; ++j) fall *= static_cast<double>(k - j);
        acc += fall * coeffs[k] * std::pow(x, static_cast<double>(k - ell));
    }
    return acc;
}

} // namespace

double RampPoly::operator()(double x) const {
    // The integrand x^N (1-x)^N is symmetric about 1/2, so p(x) = 1 - p(1-x);
    // evaluating on the half nearer to 0 keeps both endpoints exact.
    if (x <= 0.5) return ramp_horner(coeffs, x);
    return 1.0 - ramp_horner(coeffs, 1.0 - x);
}

double RampPoly::derivative(int ell, double x) const {
    if (ell == 0) return (*this)(x);
    if (ell >= static_cast<int>(coeffs.size())) return 0.0;
    if (x <= 0.5) return ramp_horner_derivative(coeffs, ell, x);
    double sgn = (ell % 2 == 1) ? 1.0 : -1.0;
    return sgn * ramp_horner_derivative(coeffs, ell, 1.0 - x);
}

double RampPoly::clamped(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return (*this)(x);
}

Cutoff cutoff(int N, double R, double s, int d, CutoffProfile profile) {
    if (!(R > 0.0) || !(s > 0.0))
        throw config_error("bapu", "cutoff_params", "cutoff needs R > 0 and s > 0");
    Cutoff c;
    c.N = N;
    c.R = R;
    c.s = s;
    c.d = d;
    c.profile = profile;
    c.ramp = ramp_poly(N);
    return c;
}

double Cutoff::axis_value(double x) const {
    double ax = std::abs(x);
    if (ax <= R + s / 3.0) return 1.0;
    if (ax >= R + 2.0 * s / 3.0) return 0.0;
    return ramp((3.0 / s) * (R + 2.0 * s / 3.0 - ax));
}

double Cutoff::profile_derivative(int ell, double x) const {
    if (ell == 0) return axis_value(x);
    double ax = std::abs(x);
    if (ax <= R + s / 3.0 || ax >= R + 2.0 * s / 3.0) return 0.0;
    double arg = (3.0 / s) * (R + 2.0 * s / 3.0 - ax);
    double chain = std::pow(x > 0.0 ? -3.0 / s : 3.0 / s, ell);
    return chain * ramp.derivative(ell, arg);
}

double Cutoff::operator()(const Point& x, int dim) const {
    if (profile == CutoffProfile::radial) return axis_value(norm2(x, dim));
    double v = 1.0;
    for (int m = 0; m < dim; ++m) v *= axis_value(x[m]);
    return v;
}

// ---------------------------------------------------------------------------
// Partition

namespace {

// Radial bump in base coordinates: 1 on the (possibly blended) plateau,
// ramps to 0 at the base-set boundary, identically 0 outside the open base.
double radial_bump(const BaseSet& base, const BaseSet& inner, double blend,
                   const RampPoly& ramp, double rho) {
    if (base.kind == BaseSet::Kind::ball) {
        double outer = base.r;
        double plateau = inner.r + blend * (outer - inner.r);
        if (rho <= plateau) return 1.0;
        if (rho >= outer) return 0.0;
        return ramp((outer - rho) / (outer - plateau));
    }
    if (base.kind == BaseSet::Kind::annulus) {
        double lo = base.a, hi = base.b;
        double plo = inner.a - blend * (inner.a - lo);
        double phi = inner.b + blend * (hi - inner.b);
        if (rho <= lo || rho >= hi) return 0.0;
        if (rho < plo) return ramp((rho - lo) / (plo - lo));
        if (rho > phi) return ramp((hi - rho) / (hi - phi));
        return 1.0;
    }
    throw config_error("bapu", "bump_profile", "cube base sets have no bump profile");
}

} // namespace

double Partition::bump_normalized(std::size_t i, const Point& u) const {
    AffinePiece p = covering.piece(idx.indices[i]);
    return radial_bump(p.base, p.inner, plateau_blend, ramp, norm2(u, covering.d));
}

double Partition::denominator(const Point& xi) const {
    double acc = 0.0;
    for (std::size_t l = 0; l < den_idx.indices.size(); ++l) {
        AffinePiece p = covering.piece(den_idx.indices[l]);
        Point u{0.0, 0.0};
        for (int m = 0; m < covering.d; ++m) u[m] = (xi[m] - p.b[m]) / p.t;
        acc += radial_bump(p.base, p.inner, plateau_blend, ramp, norm2(u, covering.d));
    }
    return acc;
}

double Partition::phi_normalized(std::size_t i, const Point& u) const {
    double num = bump_normalized(i, u);
    if (num == 0.0) return 0.0;
    AffinePiece p = covering.piece(idx.indices[i]);
    Point xi{0.0, 0.0};
    for (int m = 0; m < covering.d; ++m) xi[m] = p.t * u[m] + p.b[m];
    double den = denominator(xi);
    return num / den;
}

Partition build_partition(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                          const GridSpec& grid, int N, double plateau_blend) {
    if (cov.d != grid.d)
        throw config_error("bapu", "dimension", "covering and grid dimensions differ");
    if (!(plateau_blend >= 0.0 && plateau_blend < 1.0))
        throw config_error("bapu", "plateau_blend", "plateau_blend must lie in [0, 1)");

    Partition part;
    part.covering = cov;
    part.idx = idx;
    part.grid = grid;
    part.N = N;
    part.plateau_blend = plateau_blend;
    part.ramp = ramp_poly(N);

    const std::size_t ni = idx.indices.size();
    std::vector<AffinePiece> pieces(ni);
    double reach = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
        pieces[i] = cov.piece(idx.indices[i]);
        reach = std::max(reach, norm2(pieces[i].b, grid.d) +
                                    pieces[i].t * pieces[i].base.bounding_radius());
    }
    part.den_idx = ni == 0 ? idx : truncate(cov, reach);

    const std::size_t nd = part.den_idx.indices.size();
    std::vector<AffinePiece> den_pieces(nd);
    for (std::size_t l = 0; l < nd; ++l) den_pieces[l] = cov.piece(part.den_idx.indices[l]);

    part.phi.assign(ni, std::vector<double>(grid.size(), 0.0));
    std::vector<double> u(ni);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        Point xi = grid.freq_point(a);
        double den = 0.0;
        bool inner_covered = false;
        for (std::size_t l = 0; l < nd; ++l) {
            Point nu{0.0, 0.0};
            for (int m = 0; m < grid.d; ++m) nu[m] = (xi[m] - den_pieces[l].b[m]) / den_pieces[l].t;
            den += radial_bump(den_pieces[l].base, den_pieces[l].inner, plateau_blend, part.ramp,
                               norm2(nu, grid.d));
        }
        for (std::size_t i = 0; i < ni; ++i) {
            Point nu{0.0, 0.0};
            for (int m = 0; m < grid.d; ++m) nu[m] = (xi[m] - pieces[i].b[m]) / pieces[i].t;
            u[i] = radial_bump(pieces[i].base, pieces[i].inner, plateau_blend, part.ramp,
                               norm2(nu, grid.d));
            if (!inner_covered && pieces[i].inner.contains(nu, grid.d)) inner_covered = true;
        }
        if (inner_covered && den < 0.5)
            throw invariant_failure("bapu", "partition_denominator",
                                    "inner family fails to cover numerically at a grid point");
        if (den > 0.0)
            for (std::size_t i = 0; i < ni; ++i)
                if (u[i] != 0.0) part.phi[i][a] = u[i] / den;
    }
    return part;
}

std::vector<double> bapu_constant_per_index(const Partition& part, double p,
                                            const WeightSpec& v0) {
    if (!(p > 0.0)) throw config_error("bapu", "bapu_constant", "p must be positive");
    const GridSpec& g = part.grid;
    const double band = g.trusted_radius();
    std::vector<double> out(part.idx.indices.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        AffinePiece piece = part.covering.piece(part.idx.indices[i]);
        double outer = norm2(piece.b, g.d) + piece.t * piece.base.bounding_radius();
        if (outer > band)
            throw aliasing_error("bapu", "bapu_constant",
                                 "covering member " + part.covering.index_name(part.idx.indices[i]) +
                                     " exits the trusted band");
        std::vector<cdouble> fr(g.size());
        for (std::size_t a = 0; a < fr.size(); ++a) fr[a] = part.phi[i][a];
        SampledField piece_field = SampledField::from_freq(g, std::move(fr));
        double pm = std::isinf(p) ? 1.0 : std::min(1.0, p);
        double det = std::pow(piece.t, g.d);
        double detpow = std::pow(det, std::max(std::isinf(p) ? 0.0 : 1.0 / p, 1.0) - 1.0);
        out[i] = detpow * weighted_lp_norm(piece_field, pm, v0);
    }
    return out;
}

double bapu_constant(const Partition& part, double p, const WeightSpec& v0) {
    auto per = bapu_constant_per_index(part, p, v0);
    double s = 0.0;
    for (double v : per) s = std::max(s, v);
    return s;
}

std::vector<double> partition_derivative_sups_per_index(const Partition& part,
                                                        const MultiIndex& alpha,
                                                        int profile_n) {
    const int d = part.covering.d;
    std::vector<double> out(part.idx.indices.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        AffinePiece piece = part.covering.piece(part.idx.indices[i]);
        double Lp = 1.5 * piece.base.bounding_radius();
        GridSpec pg(d, profile_n, Lp);
        std::vector<cdouble> vals(pg.size());
        for (std::size_t a = 0; a < vals.size(); ++a)
            vals[a] = part.phi_normalized(i, pg.point(a));
        SampledField f = SampledField::from_space(pg, std::move(vals));
        auto fr = f.freq();
        std::vector<cdouble> dfr(fr.begin(), fr.end());
        for (std::size_t a = 0; a < dfr.size(); ++a) {
            Point xi = pg.freq_point(a);
            cdouble mono = 1.0;
            for (int m = 0; m < d; ++m)
                mono *= std::pow(cdouble(0.0, 2.0 * std::numbers::pi * xi[m]), alpha[m]);
            dfr[a] *= mono;
        }
        SampledField der = SampledField::from_freq(pg, std::move(dfr));
        double sup = 0.0;
        for (const cdouble& v : der.space()) sup = std::max(sup, std::abs(v));
        out[i] = sup;
    }
    return out;
}

double partition_derivative_sup(const Partition& part, const MultiIndex& alpha,
                                int profile_n) {
    auto per = partition_derivative_sups_per_index(part, alpha, profile_n);
    double s = 0.0;
    for (double v : per) s = std::max(s, v);
    return s;
}

} // namespace decospace
