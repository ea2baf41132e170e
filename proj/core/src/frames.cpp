#include "decospace/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "decospace/testfields.hpp"
#include "fft_internal.hpp"

namespace decospace {

namespace {

constexpr std::size_t kFastPathBudget = std::size_t{1} << 26;
constexpr std::size_t kDirectCostBudget = std::size_t{1} << 28;
constexpr std::size_t kTupleBudget = std::size_t{1} << 26;

double l2_from_freq(const GridSpec& g, std::span<const cdouble> fr) {
    double acc = 0.0;
    for (const cdouble& v : fr) acc += std::norm(v);
    return std::sqrt(acc * std::pow(1.0 / (2.0 * g.L), g.d));
}

// Commensurate lattice: eta divides 2L evenly.
std::optional<int> fast_path_size(const GridSpec& g, double eta) {
    double ratio = 2.0 * g.L / eta;
    double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) return std::nullopt;
    if (rounded < 2.0) return std::nullopt;
    double total = std::pow(rounded, g.d);
    if (total > static_cast<double>(kFastPathBudget)) return std::nullopt;
    return static_cast<int>(rounded);
}

// G(eta k) for all retained k, where G has grid frequency samples Ehat:
// G(eta k) = (1/2L)^d sum_m Ehat_m e^{2 pi i eta k . xi_m}.
std::vector<cdouble> lattice_eval(const GridSpec& g, std::span<const cdouble> Ehat, double eta,
                                  const LatticeRange& range) {
    const std::size_t nk = range.count(g.d);
    std::vector<cdouble> out(nk, cdouble{0.0, 0.0});
    const double scale = std::pow(1.0 / (2.0 * g.L), g.d);

    if (auto Np = fast_path_size(g, eta)) {
        const int N = *Np;
        std::size_t total = 1;
        for (int m = 0; m < g.d; ++m) total *= static_cast<std::size_t>(N);
        std::vector<cdouble> raw(total, cdouble{0.0, 0.0});
        // Bins congruent mod N accumulate: e^{2 pi i k m / N} only sees m mod N.
        for (std::size_t a = 0; a < Ehat.size(); ++a) {
            if (Ehat[a] == cdouble{0.0, 0.0}) continue;
            MultiIndex ix{0, 0};
            if (g.d == 1) {
                ix[0] = static_cast<int>(a);
            } else {
                ix[0] = static_cast<int>(a) / g.n;
                ix[1] = static_cast<int>(a) % g.n;
            }
            std::size_t slot = 0;
            for (int m = 0; m < g.d; ++m) {
                int mm = ix[m] - g.n / 2;
                slot = slot * static_cast<std::size_t>(N) +
                       static_cast<std::size_t>(((mm % N) + N) % N);
            }
            raw[slot] += Ehat[a];
        }
        std::vector<cdouble> big(total);
        int dims[2] = {N, N};
        detail::fft_raw(g.d, dims, raw.data(), big.data(), +1);
        for (int k0 = range.kmin[0]; k0 <= range.kmax[0]; ++k0) {
            if (g.d == 1) {
                std::size_t slot = static_cast<std::size_t>(((k0 % N) + N) % N);
                out[range.flatten({k0, 0}, 1)] = scale * big[slot];
            } else {
                std::size_t s0 = static_cast<std::size_t>(((k0 % N) + N) % N);
                for (int k1 = range.kmin[1]; k1 <= range.kmax[1]; ++k1) {
                    std::size_t s1 = static_cast<std::size_t>(((k1 % N) + N) % N);
                    out[range.flatten({k0, k1}, 2)] = scale * big[s0 * N + s1];
                }
            }
        }
        return out;
    }

    // Direct exponential sums (desk scale).
    std::size_t nonzero = 0;
    for (const cdouble& v : Ehat)
        if (v != cdouble{0.0, 0.0}) ++nonzero;
    if (nk * nonzero > kDirectCostBudget)
        throw lattice_error("frames", "lattice_eval",
                            "non-commensurate lattice too large for the direct path");
    for (int k0 = range.kmin[0]; k0 <= range.kmax[0]; ++k0) {
        int k1lo = (g.d == 2) ? range.kmin[1] : 0;
        int k1hi = (g.d == 2) ? range.kmax[1] : 0;
        for (int k1 = k1lo; k1 <= k1hi; ++k1) {
            Point x{eta * k0, eta * k1};
            cdouble acc = 0.0;
            for (std::size_t a = 0; a < Ehat.size(); ++a) {
                if (Ehat[a] == cdouble{0.0, 0.0}) continue;
                GridSpec gg = g;
                Point xi = gg.freq_point(a);
                acc += Ehat[a] *
                       std::exp(cdouble(0.0, 2.0 * std::numbers::pi * dot(x, xi, g.d)));
            }
            out[range.flatten({k0, k1}, g.d)] = scale * acc;
        }
    }
    return out;
}

// E(xi_m) = sum_k c_k e^{-2 pi i eta k . xi_m} on all grid bins.
std::vector<cdouble> exp_sum(const GridSpec& g, std::span<const cdouble> c, double eta,
                             const LatticeRange& range) {
    std::vector<cdouble> out(g.size(), cdouble{0.0, 0.0});

    if (auto Np = fast_path_size(g, eta)) {
        const int N = *Np;
        std::size_t total = 1;
        for (int m = 0; m < g.d; ++m) total *= static_cast<std::size_t>(N);
        std::vector<cdouble> raw(total, cdouble{0.0, 0.0});
        for (int k0 = range.kmin[0]; k0 <= range.kmax[0]; ++k0) {
            int k1lo = (g.d == 2) ? range.kmin[1] : 0;
            int k1hi = (g.d == 2) ? range.kmax[1] : 0;
            for (int k1 = k1lo; k1 <= k1hi; ++k1) {
                std::size_t slot = static_cast<std::size_t>(((k0 % N) + N) % N);
                if (g.d == 2)
                    slot = slot * N + static_cast<std::size_t>(((k1 % N) + N) % N);
                raw[slot] += c[range.flatten({k0, k1}, g.d)];
            }
        }
        std::vector<cdouble> big(total);
        int dims[2] = {N, N};
        detail::fft_raw(g.d, dims, raw.data(), big.data(), -1);
        for (std::size_t a = 0; a < out.size(); ++a) {
            MultiIndex ix{0, 0};
            if (g.d == 1) {
                ix[0] = static_cast<int>(a);
            } else {
                ix[0] = static_cast<int>(a) / g.n;
                ix[1] = static_cast<int>(a) % g.n;
            }
            std::size_t slot = 0;
            for (int m = 0; m < g.d; ++m) {
                int mm = ix[m] - g.n / 2;
                slot = slot * static_cast<std::size_t>(N) +
                       static_cast<std::size_t>(((mm % N) + N) % N);
            }
            out[a] = big[slot];
        }
        return out;
    }

    std::size_t nk = range.count(g.d);
    if (nk * g.size() > kDirectCostBudget)
        throw lattice_error("frames", "exp_sum",
                            "non-commensurate lattice too large for the direct path");
    for (std::size_t a = 0; a < out.size(); ++a) {
        Point xi = g.freq_point(a);
        cdouble acc = 0.0;
        for (int k0 = range.kmin[0]; k0 <= range.kmax[0]; ++k0) {
            int k1lo = (g.d == 2) ? range.kmin[1] : 0;
            int k1hi = (g.d == 2) ? range.kmax[1] : 0;
            for (int k1 = k1lo; k1 <= k1hi; ++k1) {
                Point x{eta * k0, eta * k1};
                acc += c[range.flatten({k0, k1}, g.d)] *
                       std::exp(cdouble(0.0, -2.0 * std::numbers::pi * dot(x, xi, g.d)));
            }
        }
        out[a] = acc;
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// FrameSystem

std::size_t LatticeRange::count(int d) const {
    std::size_t c = static_cast<std::size_t>(kmax[0] - kmin[0] + 1);
    if (d == 2) c *= static_cast<std::size_t>(kmax[1] - kmin[1] + 1);
    return c;
}

std::size_t LatticeRange::flatten(const MultiIndex& k, int d) const {
    std::size_t f = static_cast<std::size_t>(k[0] - kmin[0]);
    if (d == 2)
        f = f * static_cast<std::size_t>(kmax[1] - kmin[1] + 1) +
            static_cast<std::size_t>(k[1] - kmin[1]);
    return f;
}

namespace {

LatticeRange make_range(const GridSpec& g, double eta) {
    if (eta <= 0.0) throw lattice_error("frames", "lattice_step", "lattice step must be > 0");
    int kmin, kmax;
    if (double ratio = 2.0 * g.L / eta;
        std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::round(ratio)) &&
        std::round(ratio) >= 2.0 && std::round(ratio) < 2.1e9) {
        // Commensurate lattice: exactly one torus period, each sample once.
        // Dropping or repeating even a single sample turns the exponential
        // sums into inexact quadratures with a flat error floor across the
        // whole spectrum.
        int N = static_cast<int>(std::round(ratio));
        kmin = -(N / 2);
        kmax = kmin + N - 1;
    } else {
        // Non-commensurate: keep clear of the wrap so no point is counted
        // on both sides of the seam.
        const double margin = 4.0 * g.h();
        double lo = (-g.L + margin) / eta;
        double hi = (g.L - margin) / eta;
        kmin = static_cast<int>(std::ceil(lo - 1e-12));
        kmax = static_cast<int>(std::floor(hi + 1e-12));
    }
    if (kmax < kmin) throw lattice_error("frames", "lattice_range", "empty lattice");
    if (static_cast<std::size_t>(kmax - kmin + 1) > (std::size_t{1} << 22))
        throw lattice_error("frames", "lattice_overflow", "per-axis lattice exceeds the cap");
    LatticeRange r;
    r.kmin = {kmin, kmin};
    r.kmax = {kmax, kmax};
    return r;
}

FrameSystem make_system(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                        const GridSpec& grid, double delta,
                        std::vector<PrototypeSpec> prototypes) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw config_error("frames", "delta", "sampling density delta must lie in (0, 1]");
    if (cov.d != grid.d)
        throw config_error("frames", "dimension", "covering and grid dimensions differ");
    FrameSystem sys;
    sys.covering = cov;
    sys.idx = idx;
    sys.grid = grid;
    sys.delta = delta;
    sys.prototypes = std::move(prototypes);
    sys.lattice.resize(idx.indices.size());
    for (std::size_t i = 0; i < idx.indices.size(); ++i)
        sys.lattice[i] = make_range(grid, sys.lattice_step(i));
    return sys;
}

} // namespace

FrameSystem FrameSystem::create(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                                const GridSpec& grid, double delta,
                                const PrototypeSpec& gamma) {
    return make_system(cov, idx, grid, delta,
                       std::vector<PrototypeSpec>(idx.indices.size(), gamma));
}

FrameSystem FrameSystem::create_besov_wavelet(const StructuredCovering& cov,
                                              const TruncatedIndexSet& idx,
                                              const GridSpec& grid, double delta,
                                              const PrototypeSpec& scaling,
                                              const PrototypeSpec& wavelet) {
    if (cov.kind != StructuredCovering::Kind::besov)
        throw config_error("frames", "prototype_family",
                           "the scaling/wavelet split applies to Besov coverings only");
    std::vector<PrototypeSpec> protos;
    protos.reserve(idx.indices.size());
    for (const CoverIndex& ci : idx.indices)
        protos.push_back(ci.j == 0 ? scaling : wavelet);
    return make_system(cov, idx, grid, delta, std::move(protos));
}

double FrameSystem::lattice_step(std::size_t i) const {
    return delta / covering.piece(idx.indices[i]).t;
}

Point FrameSystem::lattice_point(std::size_t i, const MultiIndex& k) const {
    double eta = lattice_step(i);
    return {eta * k[0], eta * k[1]};
}

std::vector<cdouble> FrameSystem::filter_hat(std::size_t i, Normalization norm) const {
    const AffinePiece p = covering.piece(idx.indices[i]);
    const PrototypeSpec& proto = prototypes[i];
    if (!proto.has_closed_form_hat())
        throw config_error("frames", "prototype",
                           "frame prototypes need a closed-form transform");
    const double det = std::pow(p.t, grid.d);
    const double amp = (norm == Normalization::l1) ? 1.0 : 1.0 / std::sqrt(det);
    std::vector<cdouble> out(grid.size());
    for (std::size_t a = 0; a < out.size(); ++a) {
        Point xi = grid.freq_point(a);
        Point u{0.0, 0.0};
        for (int m = 0; m < grid.d; ++m) u[m] = (xi[m] - p.b[m]) / p.t;
        out[a] = amp * proto.hat(u, grid.d);
    }
    return out;
}

CoefficientArray CoefficientArray::zero_like(const FrameSystem& sys) {
    CoefficientArray C;
    C.delta = sys.delta;
    C.d = sys.grid.d;
    C.ranges = sys.lattice;
    C.values.resize(sys.lattice.size());
    for (std::size_t i = 0; i < C.values.size(); ++i)
        C.values[i].assign(sys.lattice[i].count(sys.grid.d), cdouble{0.0, 0.0});
    return C;
}

// ---------------------------------------------------------------------------
// Dual windows

NonvanishingReport nonvanishing_check(const FrameSystem& sys) {
    NonvanishingReport rep;
    rep.floor_c = std::numeric_limits<double>::infinity();
    rep.per_index_min.resize(sys.idx.indices.size());
    const int radial_steps = 4096;
    const int angles = (sys.grid.d == 1) ? 2 : 720;
    for (std::size_t i = 0; i < sys.idx.indices.size(); ++i) {
        const AffinePiece p = sys.covering.piece(sys.idx.indices[i]);
        double lo = 0.0, hi = p.base.bounding_radius();
        if (p.base.kind == BaseSet::Kind::annulus) lo = p.base.a;
        double mn = std::numeric_limits<double>::infinity();
        Point argmin{0.0, 0.0};
        for (int rstep = 0; rstep <= radial_steps; ++rstep) {
            double rho = lo + (hi - lo) * rstep / radial_steps;
            for (int astep = 0; astep < angles; ++astep) {
                Point u{0.0, 0.0};
                if (sys.grid.d == 1) {
                    u[0] = (astep == 0) ? rho : -rho;
                } else {
                    double th = 2.0 * std::numbers::pi * astep / angles;
                    u = {rho * std::cos(th), rho * std::sin(th)};
                }
                double v = std::abs(sys.prototypes[i].hat(u, sys.grid.d));
                if (v < mn) {
                    mn = v;
                    argmin = u;
                }
            }
        }
        rep.per_index_min[i] = mn;
        if (mn < rep.floor_c) {
            rep.floor_c = mn;
            rep.worst_point = argmin;
        }
    }
    rep.pass = rep.floor_c > 1e-6;
    return rep;
}

DualWindows dual_windows(const FrameSystem& sys, double margin) {
    if (!(margin > 0.0 && margin < 1.0))
        throw config_error("frames", "dual_margin", "margin must lie in (0, 1)");
    NonvanishingReport nv = nonvanishing_check(sys);
    if (!nv.pass)
        throw invariant_failure("frames", "nonvanishing",
                                "prototype transform vanishes on a base set (floor " +
                                    std::to_string(nv.floor_c) + ")");
    DualWindows dw;
    dw.floor_c = nv.floor_c;
    dw.margin = margin;
    dw.theta.resize(sys.idx.indices.size());
    RampPoly ramp = ramp_poly(4);

    for (std::size_t i = 0; i < sys.idx.indices.size(); ++i) {
        const AffinePiece p = sys.covering.piece(sys.idx.indices[i]);
        auto eta_cut = [&](double rho) -> double {
            if (p.base.kind == BaseSet::Kind::ball) {
                double r = p.base.r, hi = r * (1.0 + margin);
                if (rho <= r) return 1.0;
                if (rho >= hi) return 0.0;
                return ramp((hi - rho) / (hi - r));
            }
            double a = p.base.a, b = p.base.b;
            double lo = a / (1.0 + margin), hi = b * (1.0 + margin);
            if (rho < lo || rho > hi) return 0.0;
            if (rho < a) return ramp((rho - lo) / (a - lo));
            if (rho > b) return ramp((hi - rho) / (hi - b));
            return 1.0;
        };
        dw.theta[i].assign(sys.grid.size(), cdouble{0.0, 0.0});
        for (std::size_t a = 0; a < sys.grid.size(); ++a) {
            Point xi = sys.grid.freq_point(a);
            Point u{0.0, 0.0};
            for (int m = 0; m < sys.grid.d; ++m) u[m] = (xi[m] - p.b[m]) / p.t;
            double e = eta_cut(norm2(u, sys.grid.d));
            if (e == 0.0) continue;
            cdouble gh = sys.prototypes[i].hat(u, sys.grid.d);
            if (std::abs(gh) <= 0.5 * nv.floor_c)
                throw invariant_failure(
                    "frames", "dual_margin",
                    "|gammahat| drops below c/2 inside the eta-cutoff support; "
                    "reduce the margin");
            dw.theta[i][a] = e / gh;
        }
    }
    return dw;
}

// ---------------------------------------------------------------------------
// Analysis / synthesis

CoefficientArray analyze(const SampledField& f, const FrameSystem& sys) {
    if (!(f.spec() == sys.grid))
        throw config_error("frames", "grid_mismatch", "field grid differs from the system grid");
    require_band_limited(f, "frames");
    auto fr = f.freq();
    CoefficientArray C = CoefficientArray::zero_like(sys);
    for (std::size_t i = 0; i < sys.idx.indices.size(); ++i) {
        std::vector<cdouble> ghat = sys.filter_hat(i, Normalization::l2);
        for (std::size_t a = 0; a < ghat.size(); ++a) ghat[a] *= fr[a];
        C.values[i] = lattice_eval(sys.grid, ghat, sys.lattice_step(i), sys.lattice[i]);
    }
    return C;
}

double coefficient_norm(const CoefficientArray& C, const FrameSystem& sys, double p, double q,
                        const ModerateWeightSpec& w, const WeightSpec& v) {
    if (!(p > 0.0) || !(q > 0.0))
        throw config_error("frames", "coefficient_norm", "p and q must be positive");
    const int d = sys.grid.d;
    std::vector<double> inner(C.values.size()), outer_w(C.values.size());
    for (std::size_t i = 0; i < C.values.size(); ++i) {
        const LatticeRange& r = C.ranges[i];
        double acc = 0.0, mx = 0.0;
        for (int k0 = r.kmin[0]; k0 <= r.kmax[0]; ++k0) {
            int k1lo = (d == 2) ? r.kmin[1] : 0;
            int k1hi = (d == 2) ? r.kmax[1] : 0;
            for (int k1 = k1lo; k1 <= k1hi; ++k1) {
                Point x = sys.lattice_point(i, {k0, k1});
                double t = v(x, d) * std::abs(C.values[i][r.flatten({k0, k1}, d)]);
                if (std::isinf(p))
                    mx = std::max(mx, t);
                else
                    acc += std::pow(t, p);
            }
        }
        inner[i] = std::isinf(p) ? mx : std::pow(acc, 1.0 / p);
        double det = std::pow(sys.covering.piece(sys.idx.indices[i]).t, d);
        double ip = std::isinf(p) ? 0.0 : 1.0 / p;
        outer_w[i] = std::pow(det, 0.5 - ip) * w(sys.idx.indices[i]);
    }
    return weighted_lq(inner, outer_w, q);
}

SampledField synthesize(const CoefficientArray& C, const FrameSystem& sys) {
    if (C.values.size() != sys.idx.indices.size())
        throw config_error("frames", "coefficients", "coefficient array does not match system");
    std::vector<cdouble> acc(sys.grid.size(), cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < C.values.size(); ++i) {
        std::vector<cdouble> E = exp_sum(sys.grid, C.values[i], sys.lattice_step(i), C.ranges[i]);
        std::vector<cdouble> ghat = sys.filter_hat(i, Normalization::l2);
        for (std::size_t a = 0; a < acc.size(); ++a) acc[a] += ghat[a] * E[a];
    }
    return SampledField::from_freq(sys.grid, std::move(acc));
}

// ---------------------------------------------------------------------------
// Reconstruction pipelines

namespace {

void check_partition_match(const FrameSystem& sys, const Partition& part) {
    if (part.idx.indices != sys.idx.indices || !(part.grid == sys.grid))
        throw config_error("frames", "partition_mismatch",
                           "partition truncation/grid differs from the frame system");
}

} // namespace

SampledField semidiscrete_reconstruct(const SampledField& f, const FrameSystem& sys,
                                      const Partition& part, const DualWindows& dual) {
    check_partition_match(sys, part);
    require_band_limited(f, "frames");
    auto fr = f.freq();
    std::vector<cdouble> acc(sys.grid.size(), cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < sys.idx.indices.size(); ++i) {
        std::vector<cdouble> ghat = sys.filter_hat(i, Normalization::l1);
        for (std::size_t a = 0; a < acc.size(); ++a)
            acc[a] += part.phi[i][a] * dual.theta[i][a] * ghat[a] * fr[a];
    }
    return SampledField::from_freq(sys.grid, std::move(acc));
}

namespace {

// Body of atomic_step without the band guard: Neumann iterates legitimately
// carry small out-of-band correction mass (lattice aliases of the synthesis),
// so only user-facing entry points validate their input field.
AtomicStep atomic_step_unchecked(const SampledField& f, const FrameSystem& sys,
                                 const Partition& part, const DualWindows& dual) {
    auto fr = f.freq();
    CoefficientArray C = CoefficientArray::zero_like(sys);
    for (std::size_t i = 0; i < sys.idx.indices.size(); ++i) {
        std::vector<cdouble> ghat(sys.grid.size());
        for (std::size_t a = 0; a < ghat.size(); ++a)
            ghat[a] = dual.theta[i][a] * part.phi[i][a] * fr[a];
        std::vector<cdouble> samples =
            lattice_eval(sys.grid, ghat, sys.lattice_step(i), sys.lattice[i]);
        double det = std::pow(sys.covering.piece(sys.idx.indices[i]).t, sys.grid.d);
        double amp = std::pow(sys.delta, sys.grid.d) / std::sqrt(det);
        for (cdouble& v : samples) v *= amp;
        C.values[i] = std::move(samples);
    }
    SampledField Tf = synthesize(C, sys);
    return AtomicStep{std::move(C), std::move(Tf)};
}

} // namespace

AtomicStep atomic_step(const SampledField& f, const FrameSystem& sys, const Partition& part,
                       const DualWindows& dual) {
    check_partition_match(sys, part);
    require_band_limited(f, "frames");
    return atomic_step_unchecked(f, sys, part, dual);
}

NeumannResult neumann_reconstruct(const SampledField& f, const FrameSystem& sys,
                                  const Partition& part, const DualWindows& dual, double tol,
                                  int max_iter) {
    check_partition_match(sys, part);
    NeumannResult res;
    const double fnorm = l2_from_freq(sys.grid, f.freq());
    if (fnorm == 0.0) {
        res.C = CoefficientArray::zero_like(sys);
        res.f_rec = SampledField::zero(sys.grid);
        res.report.converged = true;
        return res;
    }

    SampledField g = f;
    AtomicStep step = atomic_step(g, sys, part, dual);
    auto residual_norm = [&](const SampledField& Tg) {
        auto fa = f.freq();
        auto ta = Tg.freq();
        double acc = 0.0;
        for (std::size_t a = 0; a < fa.size(); ++a) acc += std::norm(fa[a] - ta[a]);
        return std::sqrt(acc * std::pow(1.0 / (2.0 * sys.grid.L), sys.grid.d)) / fnorm;
    };
    double r = residual_norm(step.Tf);
    res.report.residuals.push_back(r);
    if (r >= 1.0)
        throw no_contraction_error("frames", "atomic_contraction",
                                   "atomic residual >= 1 at this delta; refuse Neumann");
    while (r > tol && res.report.iterations < max_iter) {
        auto ga = g.freq();
        auto fa = f.freq();
        auto ta = step.Tf.freq();
        std::vector<cdouble> next(ga.size());
        for (std::size_t a = 0; a < ga.size(); ++a) next[a] = ga[a] + (fa[a] - ta[a]);
        g = SampledField::from_freq(sys.grid, std::move(next));
        step = atomic_step_unchecked(g, sys, part, dual);
        double rn = residual_norm(step.Tf);
        ++res.report.iterations;
        res.report.residuals.push_back(rn);
        if (rn > tol && rn >= 0.98 * r)
            throw no_contraction_error("frames", "neumann_stall",
                                       "residual ratio >= 0.98 between Neumann iterates");
        r = rn;
    }
    res.report.converged = r <= tol;
    res.C = std::move(step.C);
    res.f_rec = synthesize(res.C, sys);
    return res;
}

namespace {

using Tuple = std::vector<std::vector<cdouble>>; // per index, grid FREQUENCY samples

double tuple_norm(const GridSpec& g, const Tuple& y) {
    double acc = 0.0;
    for (const auto& comp : y)
        for (const cdouble& v : comp) acc += std::norm(v);
    return std::sqrt(acc * std::pow(1.0 / (2.0 * g.L), g.d));
}

// Step-function synthesis Synth_delta: per-index step functions from lattice
// coefficients, returned as grid frequency samples.
std::vector<cdouble> step_synth(const FrameSystem& sys, std::size_t i,
                                std::span<const cdouble> c) {
    const GridSpec& g = sys.grid;
    const AffinePiece p = sys.covering.piece(sys.idx.indices[i]);
    const double eta = sys.lattice_step(i);
    const LatticeRange& r = sys.lattice[i];
    std::vector<cdouble> sp(g.size(), cdouble{0.0, 0.0});
    for (std::size_t a = 0; a < g.size(); ++a) {
        Point x = g.point(a);
        MultiIndex k{0, 0};
        bool inside = true;
        for (int m = 0; m < g.d; ++m) {
            k[m] = static_cast<int>(std::floor(x[m] / eta + 1e-9));
            if (k[m] < r.kmin[m] || k[m] > r.kmax[m]) inside = false;
        }
        if (!inside) continue;
        Point xk{eta * k[0], eta * k[1]};
        cdouble phase = std::exp(
            cdouble(0.0, 2.0 * std::numbers::pi * (dot(p.b, x, g.d) - dot(p.b, xk, g.d))));
        sp[a] = phase * c[r.flatten(k, g.d)];
    }
    SampledField f = SampledField::from_space(g, std::move(sp));
    auto fr = f.freq();
    return {fr.begin(), fr.end()};
}

} // namespace

BanachResult banach_reconstruct(const CoefficientArray& C_in, const FrameSystem& sys,
                                const Partition& part, const DualWindows& dual, double tol,
                                int max_iter) {
    check_partition_match(sys, part);
    const GridSpec& g = sys.grid;
    const std::size_t ni = sys.idx.indices.size();
    if (ni * g.size() > kTupleBudget)
        throw config_error("frames", "memory_guard", "tuple space exceeds the memory budget");

    std::vector<std::vector<cdouble>> ghat_l1(ni);
    for (std::size_t i = 0; i < ni; ++i) ghat_l1[i] = sys.filter_hat(i, Normalization::l1);

    // Projection F: (f_i) -> (gamma^{(j)} * h)_j with hhat = sum phi theta fhat_i.
    auto projectF = [&](const Tuple& y) {
        std::vector<cdouble> hhat(g.size(), cdouble{0.0, 0.0});
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t a = 0; a < hhat.size(); ++a)
                hhat[a] += part.phi[i][a] * dual.theta[i][a] * y[i][a];
        Tuple out(ni);
        for (std::size_t j = 0; j < ni; ++j) {
            out[j].resize(g.size());
            for (std::size_t a = 0; a < g.size(); ++a) out[j][a] = ghat_l1[j][a] * hhat[a];
        }
        return out;
    };

    // T = F o Synth_delta o Samp_delta on index tuples.
    auto applyT = [&](const Tuple& y) {
        Tuple stepped(ni);
        for (std::size_t i = 0; i < ni; ++i) {
            std::vector<cdouble> samples =
                lattice_eval(g, y[i], sys.lattice_step(i), sys.lattice[i]);
            stepped[i] = step_synth(sys, i, samples);
        }
        return projectF(stepped);
    };

    // u = F(Synth_delta(J C_in)), where J rescales analysis coefficients
    // (samples of gamma^{[i]} * f) to samples of gamma^{(i)} * f.
    Tuple stepped(ni);
    for (std::size_t i = 0; i < ni; ++i) {
        double det = std::pow(sys.covering.piece(sys.idx.indices[i]).t, g.d);
        std::vector<cdouble> scaled(C_in.values[i]);
        for (cdouble& v : scaled) v *= std::sqrt(det);
        stepped[i] = step_synth(sys, i, scaled);
    }
    Tuple u = projectF(stepped);

    BanachResult res;
    const double unorm = tuple_norm(g, u);
    if (unorm == 0.0) {
        res.f_rec = SampledField::zero(g);
        res.report.converged = true;
        return res;
    }

    Tuple y = u;
    double r = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= max_iter; ++it) {
        Tuple Ty = applyT(y);
        double acc = 0.0;
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t a = 0; a < g.size(); ++a) acc += std::norm(u[i][a] - Ty[i][a]);
        double rn = std::sqrt(acc * std::pow(1.0 / (2.0 * g.L), g.d)) / unorm;
        res.report.residuals.push_back(rn);
        res.report.iterations = it;
        if (rn <= tol) {
            res.report.converged = true;
            break;
        }
        if (it == 0 && rn >= 1.0)
            throw no_contraction_error("frames", "tuple_contraction",
                                       "tuple residual >= 1 at this delta; refuse Neumann");
        if (rn >= 0.98 * r)
            throw no_contraction_error("frames", "tuple_stall",
                                       "residual ratio >= 0.98 between tuple iterates");
        r = rn;
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t a = 0; a < g.size(); ++a) y[i][a] += u[i][a] - Ty[i][a];
    }

    // Synth_D o m_theta of the solved tuple.
    std::vector<cdouble> fr(g.size(), cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t a = 0; a < g.size(); ++a)
            fr[a] += part.phi[i][a] * dual.theta[i][a] * y[i][a];
    res.f_rec = SampledField::from_freq(g, std::move(fr));
    return res;
}

FrameBounds frame_bounds_l2(const FrameSystem& sys, int trials, std::uint64_t seed) {
    const GridSpec& g = sys.grid;
    const double band = g.trusted_radius();
    auto project = [&](std::vector<cdouble>& fr) {
        for (std::size_t a = 0; a < fr.size(); ++a) {
            Point xi = g.freq_point(a);
            double linf = 0.0;
            for (int m = 0; m < g.d; ++m) linf = std::max(linf, std::abs(xi[m]));
            if (linf > band) fr[a] = 0.0;
        }
    };
    auto applyS = [&](const std::vector<cdouble>& fr) {
        SampledField f = SampledField::from_freq(g, std::vector<cdouble>(fr));
        SampledField Sf = synthesize(analyze(f, sys), sys);
        std::vector<cdouble> out(Sf.freq().begin(), Sf.freq().end());
        project(out);
        return out;
    };
    auto rayleigh = [&](const std::vector<cdouble>& v, const std::vector<cdouble>& Sv) {
        double num = 0.0, den = 0.0;
        for (std::size_t a = 0; a < v.size(); ++a) {
            num += (std::conj(v[a]) * Sv[a]).real();
            den += std::norm(v[a]);
        }
        return den == 0.0 ? 0.0 : num / den;
    };

    // Seed vectors: the Rayleigh-extreme random fields.
    std::vector<cdouble> vmax, vmin;
    double rmax = -std::numeric_limits<double>::infinity();
    double rmin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < std::max(trials, 1); ++t) {
        SampledField f = random_band_limited(g, seed + 1000 * static_cast<std::uint64_t>(t));
        std::vector<cdouble> v(f.freq().begin(), f.freq().end());
        project(v);
        auto Sv = applyS(v);
        double q = rayleigh(v, Sv);
        if (q > rmax) {
            rmax = q;
            vmax = v;
        }
        if (q < rmin) {
            rmin = q;
            vmin = v;
        }
    }

    auto normalize = [](std::vector<cdouble>& v) {
        double n2 = 0.0;
        for (const cdouble& x : v) n2 += std::norm(x);
        double n = std::sqrt(n2);
        if (n == 0.0) return false;
        for (cdouble& x : v) x /= n;
        return true;
    };

    // Power iteration for B.
    FrameBounds fb;
    std::vector<cdouble> v = vmax;
    double B = 0.0;
    for (int it = 0; it < 50; ++it) {
        if (!normalize(v)) break;
        auto Sv = applyS(v);
        B = rayleigh(v, Sv);
        v = std::move(Sv);
    }
    fb.B = B;
    // Shifted power iteration for A: largest eigenvalue of (c I - S) on the
    // band-limited subspace.
    double c = 1.05 * std::max(B, 1e-300);
    v = vmin;
    double lam = 0.0;
    for (int it = 0; it < 50; ++it) {
        if (!normalize(v)) break;
        auto Sv = applyS(v);
        std::vector<cdouble> Mv(v.size());
        for (std::size_t a = 0; a < v.size(); ++a) Mv[a] = c * v[a] - Sv[a];
        lam = rayleigh(v, Mv);
        v = std::move(Mv);
    }
    fb.A = (B == 0.0) ? 0.0 : c - lam;
    if (fb.A < 0.0) fb.A = 0.0;
    return fb;
}

} // namespace decospace
