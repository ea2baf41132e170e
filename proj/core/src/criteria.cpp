#include "decospace/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace decospace {

namespace {

double min1p(double p) { return std::isinf(p) ? 1.0 : std::min(1.0, p); }

std::vector<MultiIndex> multi_indices_up_to(int N, int d) {
    std::vector<MultiIndex> out;
    if (d == 1) {
        for (int a = 0; a <= N; ++a) out.push_back({a, 0});
    } else {
        for (int a0 = 0; a0 <= N; ++a0)
            for (int a1 = 0; a0 + a1 <= N; ++a1) out.push_back({a0, a1});
    }
    return out;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int m = 1; m <= k; ++m) r = r * (n - k + m) / m;
    return r;
}

double multi_binom(const MultiIndex& a, const MultiIndex& t, int d) {
    double r = 1.0;
    for (int m = 0; m < d; ++m) r *= binom(a[m], t[m]);
    return r;
}

// Terms coef * zeta^mono * {zeta}^(c - drop) closed under differentiation:
// d_l (zeta^m {zeta}^e) = m_l zeta^(m-e_l) {zeta}^e + 2e zeta^(m+e_l) {zeta}^(e-1).
struct BracketTerm {
    double coef = 1.0;
    MultiIndex mono{0, 0};
    int drop = 0;
};

std::vector<BracketTerm> bracket_derivative(const MultiIndex& beta, double c, int d) {
    std::vector<BracketTerm> terms{BracketTerm{}};
    for (int axis = 0; axis < d; ++axis) {
        for (int rep = 0; rep < beta[axis]; ++rep) {
            std::vector<BracketTerm> next;
            for (const BracketTerm& t : terms) {
                if (t.mono[axis] > 0) {
                    BracketTerm a = t;
                    a.coef *= t.mono[axis];
                    a.mono[axis] -= 1;
                    next.push_back(a);
                }
                BracketTerm b = t;
                b.coef *= 2.0 * (c - t.drop);
                b.mono[axis] += 1;
                b.drop += 1;
                next.push_back(b);
            }
            terms = std::move(next);
        }
    }
    return terms;
}

double eval_bracket_terms(const std::vector<BracketTerm>& terms, double c, const Point& z,
                          int d) {
    double bracket = 1.0;
    for (int m = 0; m < d; ++m) bracket += z[m] * z[m];
    double acc = 0.0;
    for (const BracketTerm& t : terms) {
        double mono = 1.0;
        for (int m = 0; m < d; ++m) mono *= std::pow(z[m], t.mono[m]);
        acc += t.coef * mono * std::pow(bracket, c - t.drop);
    }
    return acc;
}

struct QuadratureBox {
    double R = 1.0;
    int nodes = 64;
    double cell(int d) const { return std::pow(2.0 * R / nodes, d); }
};

// Integral helpers share one loop: the caller supplies the pointwise integrand
// in normalized coordinates of piece j, evaluated at masked midpoint nodes of
// the base set of piece i.
template <typename F>
double masked_midpoint(const BaseSet& base, int d, int nodes, F&& integrand) {
    const double R = base.bounding_radius();
    const double step = 2.0 * R / nodes;
    double acc = 0.0;
    if (d == 1) {
        for (int m = 0; m < nodes; ++m) {
            Point u{-R + (m + 0.5) * step, 0.0};
            if (!base.contains(u, 1)) continue;
            acc += integrand(u);
        }
        return acc * step;
    }
    for (int m0 = 0; m0 < nodes; ++m0)
        for (int m1 = 0; m1 < nodes; ++m1) {
            Point u{-R + (m0 + 0.5) * step, -R + (m1 + 0.5) * step};
            if (!base.contains(u, 2)) continue;
            acc += integrand(u);
        }
    return acc * step * step;
}

void require_quadrable(const PrototypeSpec& gamma) {
    if (!gamma.has_closed_form_hat() && !gamma.is_identically_zero())
        throw config_error("criteria", "prototype",
                           "Schur quadrature needs a closed-form prototype transform");
}

double sphere_surface(int d) {
    // H^{d-1}(S^{d-1}); d <= 3 in practice.
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw config_error("criteria", "dimension", "d must be <= 3");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// CriteriaParams

void CriteriaParams::validate() const {
    if (!(p > 0.0) || !(q > 0.0))
        throw config_error("criteria", "exponents", "p and q must be positive");
    if (!(p0 > 0.0 && p0 <= 1.0) || !(q0 > 0.0 && q0 <= 1.0))
        throw config_error("criteria", "exponents", "p0 and q0 must lie in (0, 1]");
    if (!(eps > 0.0)) throw config_error("criteria", "eps", "eps must be positive");
    if (mu0 < 0.0) throw config_error("criteria", "mu0", "mu0 must be nonnegative");
    if (s0 > s1) throw config_error("criteria", "s_range", "s0 must not exceed s1");
}

double CriteriaParams::K() const { return std::abs(mu); }

double CriteriaParams::tau() const { return std::min({1.0, p, q}); }

int CriteriaParams::N(int d) const {
    return static_cast<int>(std::ceil(K() + (d + eps) / min1p(p)));
}

double CriteriaParams::sigma_frame(int d) const {
    return tau() * (d / min1p(p) + K() + N(d));
}

double CriteriaParams::sigma_atomic(int d) const {
    if (p >= 1.0 || std::isinf(p)) return std::min(1.0, q) * std::ceil(K() + d + eps);
    return std::min(p, q) * (d / p + K() + std::ceil(K() + (d + eps) / p));
}

double CriteriaParams::theta() const {
    if (std::isinf(p) || p >= 1.0) return 0.0;
    return 1.0 / p - 1.0;
}

// ---------------------------------------------------------------------------
// Schur matrices

SchurMatrix schur_matrix_frame(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                               const std::vector<PrototypeSpec>& prototypes,
                               const ModerateWeightSpec& w, const CriteriaParams& params,
                               const QuadratureSpec& quad) {
    params.validate();
    if (prototypes.size() != idx.indices.size())
        throw config_error("criteria", "prototypes", "one prototype per truncation position");
    if (quad.nodes_per_axis < 2)
        throw config_error("criteria", "quadrature", "need at least 2 nodes per axis");

    const int d = cov.d;
    const int N = params.N(d);
    const double tau = params.tau();
    const double sigma = params.sigma_frame(d);
    const auto alphas = multi_indices_up_to(N, d);

    SchurMatrix M;
    M.tag = SchurMatrix::Tag::frame;
    M.idx = idx;
    const std::size_t n = idx.indices.size();
    M.entries.assign(n * n, 0.0);

    bool underflow = false;
    for (std::size_t j = 0; j < n; ++j) {
        const AffinePiece pj = cov.piece(idx.indices[j]);
        if (prototypes[j].is_identically_zero()) continue;
        require_quadrable(prototypes[j]);
        const double wj = w(idx.indices[j]);

        for (std::size_t i = 0; i < n; ++i) {
            const AffinePiece pi = cov.piece(idx.indices[i]);
            const double wi = w(idx.indices[i]);

            // d+1 integrals, one per beta in {0, e_1, ..., e_d}.
            std::array<double, 3> integrals{0.0, 0.0, 0.0};
            auto integrand = [&](const Point& u) {
                Point z{0.0, 0.0};
                for (int m = 0; m < d; ++m) z[m] = (pi.t * u[m] + pi.b[m] - pj.b[m]) / pj.t;
                // d^alpha gammahat_j at z, shared across betas.
                std::vector<cdouble> dg(alphas.size());
                for (std::size_t a = 0; a < alphas.size(); ++a)
                    dg[a] = prototypes[j].hat_derivative_at(alphas[a], z, d);
                double m0 = 0.0;
                std::array<double, 2> ml{0.0, 0.0};
                for (std::size_t a = 0; a < alphas.size(); ++a) {
                    m0 = std::max(m0, std::abs(dg[a]));
                    for (int l = 0; l < d; ++l) {
                        // d^alpha [(2 pi i z_l) gammahat] =
                        //   2 pi i (z_l d^alpha gammahat + alpha_l d^(alpha-e_l) gammahat)
                        cdouble lower = 0.0;
                        if (alphas[a][l] > 0) {
                            MultiIndex am = alphas[a];
                            am[l] -= 1;
                            for (std::size_t b = 0; b < alphas.size(); ++b)
                                if (alphas[b] == am) {
                                    lower = dg[b];
                                    break;
                                }
                        }
                        double v = 2.0 * std::numbers::pi *
                                   std::abs(z[l] * dg[a] +
                                            static_cast<double>(alphas[a][l]) * lower);
                        ml[l] = std::max(ml[l], v);
                    }
                }
                integrals[0] += m0;
                for (int l = 0; l < d; ++l) integrals[1 + l] += ml[l];
                return 0.0;
            };
            masked_midpoint(pi.base, d, quad.nodes_per_axis, integrand);
            const double cell =
                std::pow(2.0 * pi.base.bounding_radius() / quad.nodes_per_axis, d);
            double integral = 0.0;
            for (int b = 0; b <= d; ++b) integral = std::max(integral, integrals[b] * cell);
            if (integral > 0.0 && integral < 1e-300) underflow = true;

            M.at(j, i) = std::pow(wj / wi, tau) * std::pow(1.0 + pi.t / pj.t, sigma) *
                         std::pow(integral, tau);
        }
    }
    (void)underflow; // reported through the CLI; entries stay as computed
    return M;
}

SchurMatrix schur_matrix_atomic(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                                const std::vector<PrototypeSpec>& prototypes,
                                const ModerateWeightSpec& w, const CriteriaParams& params,
                                const QuadratureSpec& quad) {
    params.validate();
    if (prototypes.size() != idx.indices.size())
        throw config_error("criteria", "prototypes", "one prototype per truncation position");
    if (quad.nodes_per_axis < 2)
        throw config_error("criteria", "quadrature", "need at least 2 nodes per axis");

    const int d = cov.d;
    const int N = params.N(d);
    const double tau = params.tau();
    const double sigma = params.sigma_atomic(d);
    const double theta = params.theta();
    const double c = (d + 1.0 + params.eps) / 2.0; // gammahat_{j,1} = gammahat_j {z}^c
    const auto alphas = multi_indices_up_to(N, d);

    // Bracket-power derivative term lists, shared across entries.
    std::vector<std::vector<BracketTerm>> bterms(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a)
        bterms[a] = bracket_derivative(alphas[a], c, d);
    auto find_alpha = [&](const MultiIndex& a) {
        for (std::size_t b = 0; b < alphas.size(); ++b)
            if (alphas[b] == a) return b;
        throw invariant_failure("criteria", "alpha_index", "multi-index lookup failed");
    };

    SchurMatrix M;
    M.tag = SchurMatrix::Tag::atomic;
    M.idx = idx;
    const std::size_t n = idx.indices.size();
    M.entries.assign(n * n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const AffinePiece pi = cov.piece(idx.indices[i]);
        const double wi = w(idx.indices[i]);
        const double deti = std::pow(pi.t, d);

        for (std::size_t j = 0; j < n; ++j) {
            const AffinePiece pj = cov.piece(idx.indices[j]);
            if (prototypes[j].is_identically_zero()) continue;
            require_quadrable(prototypes[j]);
            const double wj = w(idx.indices[j]);
            const double detj = std::pow(pj.t, d);

            double integral_sum = 0.0;
            auto integrand = [&](const Point& u) {
                Point z{0.0, 0.0};
                for (int m = 0; m < d; ++m) z[m] = (pi.t * u[m] + pi.b[m] - pj.b[m]) / pj.t;
                std::vector<cdouble> dg(alphas.size());
                for (std::size_t a = 0; a < alphas.size(); ++a)
                    dg[a] = prototypes[j].hat_derivative_at(alphas[a], z, d);
                double mx = 0.0;
                for (std::size_t a = 0; a < alphas.size(); ++a) {
                    // Leibniz for d^alpha (gammahat {z}^c).
                    cdouble acc = 0.0;
                    const MultiIndex& al = alphas[a];
                    for (int t0 = 0; t0 <= al[0]; ++t0) {
                        int t1hi = (d == 2) ? al[1] : 0;
                        for (int t1 = 0; t1 <= t1hi; ++t1) {
                            MultiIndex th{t0, t1};
                            MultiIndex rest{al[0] - t0, al[1] - t1};
                            acc += multi_binom(al, th, d) * dg[find_alpha(th)] *
                                   eval_bracket_terms(bterms[find_alpha(rest)], c, z, d);
                        }
                    }
                    mx = std::max(mx, std::abs(acc));
                }
                integral_sum += mx;
                return 0.0;
            };
            masked_midpoint(pi.base, d, quad.nodes_per_axis, integrand);
            const double cell =
                std::pow(2.0 * pi.base.bounding_radius() / quad.nodes_per_axis, d);
            const double integral = integral_sum * cell;

            M.at(i, j) = std::pow(wi / wj * std::pow(detj / deti, theta), tau) *
                         std::pow(1.0 + pi.t / pj.t, sigma) * std::pow(integral, tau);
        }
    }
    return M;
}

SchurSums schur_sums(const SchurMatrix& M) {
    SchurSums s;
    const std::size_t n = M.n();
    for (std::size_t col = 0; col < n; ++col) {
        double sum = 0.0;
        for (std::size_t row = 0; row < n; ++row) sum += M.at(row, col);
        s.C1 = std::max(s.C1, sum);
    }
    for (std::size_t row = 0; row < n; ++row) {
        double sum = 0.0;
        for (std::size_t col = 0; col < n; ++col) sum += M.at(row, col);
        s.C2 = std::max(s.C2, sum);
    }
    return s;
}

double schur_stability(const SchurMatrix& full, const SchurMatrix& half) {
    if (full.tag != half.tag)
        throw config_error("criteria", "stability", "mixed frame/atomic matrices");
    // Positions of the half-truncation indices inside the full truncation.
    std::vector<std::size_t> pos(half.n());
    for (std::size_t h = 0; h < half.n(); ++h) {
        auto it = std::find(full.idx.indices.begin(), full.idx.indices.end(),
                            half.idx.indices[h]);
        if (it == full.idx.indices.end())
            throw config_error("criteria", "stability",
                               "half truncation is not a subset of the full truncation");
        pos[h] = static_cast<std::size_t>(it - full.idx.indices.begin());
    }

    double worst = 1.0;
    auto fold = [&](double full_sum, double half_sum) {
        if (half_sum == 0.0 && full_sum == 0.0) return;
        if (half_sum == 0.0) {
            worst = std::numeric_limits<double>::infinity();
            return;
        }
        worst = std::max(worst, full_sum / half_sum);
    };
    for (std::size_t h = 0; h < half.n(); ++h) {
        double fc = 0.0, hc = 0.0, fr = 0.0, hr = 0.0;
        for (std::size_t row = 0; row < full.n(); ++row) fc += full.at(row, pos[h]);
        for (std::size_t col = 0; col < full.n(); ++col) fr += full.at(pos[h], col);
        for (std::size_t row = 0; row < half.n(); ++row) hc += half.at(row, h);
        for (std::size_t col = 0; col < half.n(); ++col) hr += half.at(h, col);
        fold(fc, hc);
        fold(fr, hr);
    }
    return worst;
}

double schur_operator_bound(const SchurMatrix& M, double p) {
    if (!(p > 0.0)) throw config_error("criteria", "schur_bound", "p must be positive");
    const std::size_t n = M.n();
    if (std::isinf(p)) {
        double worst = 0.0;
        for (std::size_t row = 0; row < n; ++row) {
            double sum = 0.0;
            for (std::size_t col = 0; col < n; ++col) sum += M.at(row, col);
            worst = std::max(worst, sum);
        }
        return worst;
    }
    if (p <= 1.0) {
        double worst = 0.0;
        for (std::size_t col = 0; col < n; ++col) {
            double sum = 0.0;
            for (std::size_t row = 0; row < n; ++row) sum += std::pow(M.at(row, col), p);
            worst = std::max(worst, sum);
        }
        return std::pow(worst, 1.0 / p);
    }
    SchurSums s = schur_sums(M);
    return std::max(s.C1, s.C2);
}

// ---------------------------------------------------------------------------
// Threshold formulas

AlphaThresholds alpha_thresholds(int d, double alpha, double p0, double q0, double s0,
                                 double mu0, double eps) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw config_error("criteria", "alpha", "alpha must lie in [0, 1)");
    if (!(p0 > 0.0 && p0 <= 1.0) || !(q0 > 0.0 && q0 <= 1.0))
        throw config_error("criteria", "exponents", "p0 and q0 must lie in (0, 1]");

    AlphaThresholds th;
    const double m = std::min(p0, q0);
    const double lift = std::ceil(mu0 + (d + eps) / p0);
    th.N0_frame = d + 2.0 + (d + 1.0) / m +
                  std::max(s0 + alpha * d, s0 + alpha * (d / p0 - d + mu0 + lift)) /
                      (1.0 - alpha);
    if (p0 == 1.0)
        th.Lambda = std::max(s0 + d * alpha, s0 + alpha * (std::ceil(mu0 + d + eps) - d)) /
                    (1.0 - alpha);
    else
        th.Lambda = (s0 + alpha * (mu0 + lift)) / (1.0 - alpha);
    th.M0_atomic = (d + 1.0) * (2.0 + eps + 1.0 / m) + th.Lambda;
    return th;
}

BesovThresholds besov_thresholds(int d, double p0, double q0, double s0, double s1, double mu0,
                                 double eps) {
    if (!(p0 > 0.0 && p0 <= 1.0) || !(q0 > 0.0 && q0 <= 1.0))
        throw config_error("criteria", "exponents", "p0 and q0 must lie in (0, 1]");
    BesovThresholds th;
    th.frame_theta = d / p0 + mu0 + std::ceil(mu0 + (d + eps) / p0);
    th.frame_L_min = 1.0 - s0 + th.frame_theta;
    th.frame_L1_min = th.frame_L_min;
    th.frame_L2_min = s1;
    th.atomic_theta0 = (p0 == 1.0) ? 0.0 : 1.0 / p0 - 1.0;
    th.atomic_kappa = (p0 == 1.0) ? std::ceil(mu0 + d + eps)
                                  : d + mu0 + std::ceil(mu0 + (d + eps) / p0);
    th.atomic_L_min = s1 + th.atomic_kappa + d + 1.0 + eps;
    th.atomic_L1_min = th.atomic_L_min;
    th.atomic_L2_min = th.atomic_theta0 * d - s0;
    return th;
}

// ---------------------------------------------------------------------------
// Factorization

Factorization factorize(const PrototypeSpec& gamma, double eps, const GridSpec& grid) {
    if (!(eps > 0.0)) throw config_error("criteria", "eps", "eps must be positive");
    const int d = grid.d;
    const double c = (d + 1.0 + eps) / 2.0;

    // gammahat on the grid.
    std::vector<cdouble> ghat(grid.size());
    if (gamma.has_closed_form_hat()) {
        for (std::size_t a = 0; a < ghat.size(); ++a)
            ghat[a] = gamma.hat(grid.freq_point(a), d);
    } else {
        auto fr = gamma.sample_space(grid).freq();
        ghat.assign(fr.begin(), fr.end());
    }

    // Decay probe: |gammahat| (1+|xi|)^(d+1+eps) must not grow toward the
    // band edge.
    const double split = 0.5 * grid.trusted_radius();
    double inner_max = 0.0, outer_max = 0.0;
    for (std::size_t a = 0; a < ghat.size(); ++a) {
        Point xi = grid.freq_point(a);
        double linf = 0.0;
        for (int m = 0; m < d; ++m) linf = std::max(linf, std::abs(xi[m]));
        double v = std::abs(ghat[a]) * std::pow(1.0 + norm2(xi, d), d + 1.0 + eps);
        if (linf <= split)
            inner_max = std::max(inner_max, v);
        else
            outer_max = std::max(outer_max, v);
    }
    const bool decay_ok = outer_max <= 2.5 * inner_max;
    if (!decay_ok)
        throw config_error("criteria", "decay_probe",
                           "prototype transform decays slower than (1+|xi|)^-(d+1+eps)");

    std::vector<cdouble> g1hat(grid.size()), g2hat(grid.size());
    for (std::size_t a = 0; a < ghat.size(); ++a) {
        Point xi = grid.freq_point(a);
        double bracket = 1.0;
        for (int m = 0; m < d; ++m) bracket += xi[m] * xi[m];
        const double b2 = std::pow(bracket, -c);
        g2hat[a] = b2;
        g1hat[a] = ghat[a] / b2;
    }

    Factorization out;
    out.gamma1 = SampledField::from_freq(grid, std::move(g1hat));
    out.gamma2 = SampledField::from_freq(grid, std::move(g2hat));
    out.report.decay_ok = decay_ok;

    // Verification: periodic convolution on the grid via the product of the
    // stored transforms, compared with gamma itself.
    double err2 = 0.0, ref2 = 0.0;
    auto f1 = out.gamma1.freq();
    auto f2 = out.gamma2.freq();
    for (std::size_t a = 0; a < ghat.size(); ++a) {
        err2 += std::norm(ghat[a] - f1[a] * f2[a]);
        ref2 += std::norm(ghat[a]);
    }
    out.report.reconstruction_error = (ref2 == 0.0) ? 0.0 : std::sqrt(err2 / ref2);

    const int Kw = d + 1;
    double wsup = 0.0;
    auto g2 = out.gamma2.space();
    for (std::size_t a = 0; a < g2.size(); ++a) {
        Point x = grid.point(a);
        wsup = std::max(wsup, std::pow(1.0 + norm2(x, d), Kw) * std::abs(g2[a]));
    }
    out.report.gamma2_weighted_sup = wsup;
    double fact = 1.0;
    for (int m = 2; m <= Kw; ++m) fact *= m;
    out.report.gamma2_decay_bound = sphere_surface(d) * std::pow(2.0, 1 + d + 3 * Kw) * fact *
                                    std::pow(1.0 + d, 1 + 2 * Kw);
    return out;
}

// ---------------------------------------------------------------------------
// Lattice series

LatticeSeries lattice_series_bound(int d) {
    if (d < 1 || d > 3) throw config_error("criteria", "dimension", "d must lie in {1, 2, 3}");
    const long long Kmax = (d == 1) ? 100000 : (d == 2) ? 4000 : 400;
    LatticeSeries s;
    s.partial = 1.0; // k = 0
    for (long long m = 1; m <= Kmax; ++m) {
        // Number of k with ||k||_inf = m: (2m+1)^d - (2m-1)^d.
        double shell = std::pow(2.0 * m + 1.0, d) - std::pow(2.0 * m - 1.0, d);
        s.partial += shell * std::pow(1.0 + m, -(d + 1.0));
    }
    // shell(m) <= 2d (2m+1)^(d-1) <= 2d 3^(d-1) m^(d-1), so each tail term is
    // <= 2d 3^(d-1) m^(-2); sum_{m > K} m^(-2) <= 1/K.
    s.tail = 2.0 * d * std::pow(3.0, d - 1) / static_cast<double>(Kmax);
    if (!(s.total() <= std::pow(6.0, d)))
        throw invariant_failure("criteria", "lattice_series",
                                "lattice series bound exceeds 6^d");
    return s;
}

} // namespace decospace
