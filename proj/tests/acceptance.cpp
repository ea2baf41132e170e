// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "decospace/bapu.hpp"
#include "decospace/covering.hpp"
#include "decospace/criteria.hpp"
#include "decospace/decomp.hpp"
#include "decospace/frames.hpp"
#include "decospace/grid.hpp"
#include "decospace/testfields.hpp"

using namespace decospace;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_criterion(int number, const char* name, double time_limit,
                   const std::function<std::string()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    double dt = seconds_since(t0);
    if (ok && time_limit > 0.0 && dt > time_limit) {
        ok = false;
        detail += " [time limit exceeded]";
    }
    if (!ok) ++g_failures;
    std::printf("criterion %d (%s): %s (%s; %.1f s)\n", number, name, ok ? "PASS" : "FAIL",
                detail.c_str(), dt);
    std::fflush(stdout);
}

struct Check {
    bool ok = true;
    void require(bool cond) { ok = ok && cond; }
};

double rel_l2_error(const SampledField& a, const SampledField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.space().size(); ++i) {
        num += std::norm(a.space()[i] - b.space()[i]);
        den += std::norm(b.space()[i]);
    }
    return std::sqrt(num / den);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// Shared Besov d = 1 configuration used by criteria 1-4.
struct BesovSetup {
    StructuredCovering cov = build_besov_covering(1);
    TruncatedIndexSet idx = truncate(cov, 24.0); // j <= 6
    GridSpec grid{1, 2048, 16.0};
    Partition part = build_partition(cov, idx, grid, 4);
    PrototypeSpec proto = PrototypeSpec::gaussian(16.0);
};

std::string criterion_semidiscrete() {
    BesovSetup su;
    auto sys = FrameSystem::create(su.cov, su.idx, su.grid, 0.5, su.proto);
    auto dual = dual_windows(sys, 0.1);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        auto f = random_band_limited(su.grid, 100 + t);
        auto rec = semidiscrete_reconstruct(f, sys, su.part, dual);
        worst = std::max(worst, rel_l2_error(rec, f));
    }
    if (worst > 1e-8) throw std::runtime_error(fmt("max relative error %.2e > 1e-8", worst));
    return fmt("max relative error %.2e over 20 fields", worst);
}

std::string criterion_bapu_independence() {
    BesovSetup su;
    auto part_b = build_partition(su.cov, su.idx, su.grid, 6, 0.5);
    const std::pair<double, double> pqs[] = {{2.0, 2.0}, {1.0, 1.0}, {0.5, 0.5}, {kInf, kInf}};
    double worst_spread = 0.0, lo_all = kInf, hi_all = 0.0;
    for (auto [p, q] : pqs) {
        SpaceConfig ca(su.part, p, q, ModerateWeightSpec::one(), WeightSpec::one());
        SpaceConfig cb(part_b, p, q, ModerateWeightSpec::one(), WeightSpec::one());
        double lo = kInf, hi = 0.0;
        for (int t = 0; t < 20; ++t) {
            auto f = random_band_limited(su.grid, 300 + t);
            double r = decomp_norm(f, ca) / decomp_norm(f, cb);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        worst_spread = std::max(worst_spread, hi / lo);
        lo_all = std::min(lo_all, lo);
        hi_all = std::max(hi_all, hi);
        if (lo < 1.0 / 50.0 || hi > 50.0)
            throw std::runtime_error(fmt("ratio range [%.3g, %.3g] leaves [1/50, 50]", lo, hi));
        if (hi / lo > 10.0)
            throw std::runtime_error(fmt("ratio spread %.3g > 10 at p = q = %.3g", hi / lo, p));
    }
    return fmt("ratios in [%.3g, %.3g], worst spread %.3g", lo_all, hi_all, worst_spread);
}

std::string criterion_atomic() {
    BesovSetup su;
    auto mean_residual = [&](double delta) {
        auto sys = FrameSystem::create(su.cov, su.idx, su.grid, delta, su.proto);
        auto dual = dual_windows(sys, 0.1);
        double acc = 0.0;
        const int trials = 10;
        for (int t = 0; t < trials; ++t) {
            auto f = random_band_limited(su.grid, 500 + t);
            auto step = atomic_step(f, sys, su.part, dual);
            double num = 0.0, den = 0.0;
            for (std::size_t a = 0; a < su.grid.size(); ++a) {
                num += std::norm(f.freq()[a] - step.Tf.freq()[a]);
                den += std::norm(f.freq()[a]);
            }
            acc += std::sqrt(num / den);
        }
        return acc / trials;
    };
    double r2 = mean_residual(0.5);
    double r4 = mean_residual(0.25);
    double r8 = mean_residual(0.125);
    if (!(r8 <= 0.75 * r4 && r4 <= 0.75 * r2))
        throw std::runtime_error(
            fmt("residuals %.3g, %.3g, %.3g break the 0.75 decline", r2, r4, r8));

    auto sys16 = FrameSystem::create(su.cov, su.idx, su.grid, 1.0 / 16.0, su.proto);
    auto dual16 = dual_windows(sys16, 0.1);
    int worst_iters = 0;
    for (int t = 0; t < 3; ++t) {
        auto f = random_band_limited(su.grid, 700 + t);
        auto res = neumann_reconstruct(f, sys16, su.part, dual16, 1e-6, 30);
        if (!res.report.converged || rel_l2_error(res.f_rec, f) > 1e-6)
            throw std::runtime_error("Neumann did not reach 1e-6 within 30 iterations");
        worst_iters = std::max(worst_iters, res.report.iterations);
    }
    return fmt("residuals %.3g / %.3g / %.3g; Neumann converged", r2, r4, r8) +
           fmt(" in <= %.0f iterations at delta = 1/16", double(worst_iters));
}

std::string criterion_banach() {
    BesovSetup su;
    auto sys = FrameSystem::create(su.cov, su.idx, su.grid, 1.0 / 16.0, su.proto);
    auto dual = dual_windows(sys, 0.1);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        auto f = random_band_limited(su.grid, 900 + t);
        auto res = banach_reconstruct(analyze(f, sys), sys, su.part, dual, 1e-8, 60);
        if (!res.report.converged) throw std::runtime_error("tuple iteration did not converge");
        worst = std::max(worst, rel_l2_error(res.f_rec, f));
    }
    if (worst > 1e-6)
        throw std::runtime_error(fmt("round-trip error %.2e > 1e-6", worst));

    double worst_spread = 0.0;
    for (auto [p, q] : {std::pair{2.0, 2.0}, {1.0, 1.0}}) {
        SpaceConfig cfg(su.part, p, q, ModerateWeightSpec::one(), WeightSpec::one());
        double lo = kInf, hi = 0.0;
        for (int t = 0; t < 20; ++t) {
            auto f = random_band_limited(su.grid, 1100 + t);
            double r = coefficient_norm(analyze(f, sys), sys, p, q, ModerateWeightSpec::one(),
                                        WeightSpec::one()) /
                       decomp_norm(f, cfg);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        if (hi / lo > 10.0)
            throw std::runtime_error(fmt("norm-ratio spread %.3g > 10 at p = %.3g", hi / lo, p));
        worst_spread = std::max(worst_spread, hi / lo);
    }
    return fmt("round-trip error %.2e, worst norm-ratio spread %.3g", worst, worst_spread);
}

std::string criterion_schur() {
    CriteriaParams prm; // p = q = 2, eps = 1/2
    QuadratureSpec quad{64};

    // Admissible: alpha = 1/2 covering with a fast-decaying gaussian. The
    // width 1/2 keeps the overlap tails between neighboring pieces small;
    // a unit-width gaussian leaves a structural 7-11% gain on the edge row
    // sums at every truncation depth, even though it is equally admissible.
    auto acov = build_alpha_covering(1, 0.5, 1.0);
    auto afull = truncate(acov, 64.0);
    auto ahalf = truncate(acov, 32.0);
    auto aproto_full =
        std::vector<PrototypeSpec>(afull.indices.size(), PrototypeSpec::gaussian(0.5));
    auto aproto_half =
        std::vector<PrototypeSpec>(ahalf.indices.size(), PrototypeSpec::gaussian(0.5));
    auto w1 = ModerateWeightSpec::one();
    double stab_frame = schur_stability(
        schur_matrix_frame(acov, afull, aproto_full, w1, prm, quad),
        schur_matrix_frame(acov, ahalf, aproto_half, w1, prm, quad));
    double stab_atomic = schur_stability(
        schur_matrix_atomic(acov, afull, aproto_full, w1, prm, quad),
        schur_matrix_atomic(acov, ahalf, aproto_half, w1, prm, quad));
    if (stab_frame > 1.05 || stab_atomic > 1.05)
        throw std::runtime_error(
            fmt("admissible stability %.3f / %.3f > 1.05", stab_frame, stab_atomic));

    // Inadmissible: Besov frame criterion with w = dyadic(1), i.e. s1 = 1
    // against a prototype with no excess decay (L2 = 0): column sums diverge.
    CriteriaParams bad = prm;
    bad.s1 = 1.0;
    auto bcov = build_besov_covering(1);
    auto bfull = truncate(bcov, 64.0);
    auto bhalf = truncate(bcov, 32.0);
    auto wdy = ModerateWeightSpec::dyadic(1.0);
    double stab_bad = schur_stability(
        schur_matrix_frame(bcov, bfull,
                           std::vector<PrototypeSpec>(bfull.indices.size(),
                                                      PrototypeSpec::gaussian(16.0)),
                           wdy, bad, quad),
        schur_matrix_frame(bcov, bhalf,
                           std::vector<PrototypeSpec>(bhalf.indices.size(),
                                                      PrototypeSpec::gaussian(16.0)),
                           wdy, bad, quad));
    if (stab_bad < 1.25)
        throw std::runtime_error(fmt("inadmissible stability %.3f < 1.25", stab_bad));
    return fmt("admissible %.3f / %.3f, inadmissible %.3f", stab_frame, stab_atomic, stab_bad);
}

std::string criterion_numeric_bounds() {
    auto t_ramp = std::chrono::steady_clock::now();
    // Smooth ramp derivative bound.
    for (int N = 1; N <= 6; ++N) {
        auto p = ramp_poly(N);
        double bound = std::pow(24.0, N + 1);
        for (int m = 2; m <= N + 1; ++m) bound *= m;
        for (int ell = 0; ell <= N; ++ell) {
            double sup = 0.0;
            for (int i = 0; i <= 100000; ++i)
                sup = std::max(sup, std::abs(p.derivative(ell, i / 100000.0)));
            if (sup > bound)
                throw std::runtime_error(fmt("ramp sup %.3g exceeds bound at N = %.0f",
                                             sup, double(N)));
        }
    }

    if (seconds_since(t_ramp) > 5.0) throw std::runtime_error("ramp bound check too slow");

    auto t_series = std::chrono::steady_clock::now();
    // Lattice series with certified tails.
    for (int d : {1, 2, 3}) {
        auto s = lattice_series_bound(d);
        if (!(s.total() <= std::pow(6.0, d)) || !(s.tail >= 0.0))
            throw std::runtime_error(fmt("lattice series %.4f exceeds 6^%0.f", s.total(),
                                         double(d)));
    }

    if (seconds_since(t_series) > 5.0) throw std::runtime_error("lattice series check too slow");

    auto t_cluster = std::chrono::steady_clock::now();
    // Clustering map norm estimate on random sequences.
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 300.0);
    auto cl = clusters(cov, idx);
    auto w = ModerateWeightSpec::dyadic(0.5);
    auto cons = admissibility_constants(cov, idx, cl);
    double CQw = weight_moderateness(cov, w, idx, cl);
    std::vector<double> weights(idx.indices.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = w(idx.indices[i]);
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double q : {0.5, 1.0, 2.0, kInf}) {
        double bound = CQw * std::pow(double(cons.N_Q), 1.0 + (std::isinf(q) ? 0.0 : 1.0 / q));
        for (int t = 0; t < 100; ++t) {
            std::vector<cdouble> c(idx.indices.size());
            for (auto& v : c) v = cdouble(uni(rng), uni(rng));
            auto gc = clustering_map(c, cl);
            std::vector<double> ac(c.size()), agc(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                ac[i] = std::abs(c[i]);
                agc[i] = std::abs(gc[i]);
            }
            if (weighted_lq(agc, weights, q) > bound * weighted_lq(ac, weights, q) * (1.0 + 1e-12))
                throw std::runtime_error("clustering map norm estimate violated");
        }
    }
    if (seconds_since(t_cluster) > 5.0) throw std::runtime_error("clustering check too slow");
    return "ramp, lattice-series, and clustering bounds all hold";
}

std::string criterion_factorization() {
    double worst = 0.0;
    for (int d : {1, 2}) {
        GridSpec grid = (d == 1) ? GridSpec(1, 2048, 16.0) : GridSpec(2, 256, 8.0);
        for (const PrototypeSpec& proto :
             {PrototypeSpec::gaussian(16.0), PrototypeSpec::cutoff_transform(4, 1.0, 1.0)}) {
            auto fac = factorize(proto, 0.5, grid);
            worst = std::max(worst, fac.report.reconstruction_error);
            if (fac.report.reconstruction_error > 1e-8)
                throw std::runtime_error(
                    fmt("reconstruction error %.2e > 1e-8 in d = %.0f",
                        fac.report.reconstruction_error, double(d)));
        }
    }
    return fmt("max reconstruction error %.2e", worst);
}

std::string criterion_frame_bound_trend() {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 12.0); // j <= 5
    GridSpec grid(1, 1024, 16.0);
    auto proto = PrototypeSpec::gaussian(16.0);
    double worst = 0.0;
    for (std::uint64_t seed : {7ull, 1007ull, 2007ull}) {
        auto coarse =
            frame_bounds_l2(FrameSystem::create(cov, idx, grid, 0.125, proto), 3, seed);
        auto fine =
            frame_bounds_l2(FrameSystem::create(cov, idx, grid, 0.0625, proto), 3, seed);
        if (!(coarse.A > 0.0 && fine.A > 0.0))
            throw std::runtime_error("estimated lower frame bound is not positive");
        double rc = coarse.B / coarse.A;
        double rf = fine.B / fine.A;
        worst = std::max(worst, rf / rc);
        if (rf > 1.05 * rc)
            throw std::runtime_error(
                fmt("B/A grew from %.4f to %.4f when halving delta", rc, rf));
    }
    return fmt("worst (B/A at 1/16)/(B/A at 1/8) = %.4f over 3 seeds", worst);
}

} // namespace

int main() {
    run_criterion(1, "semidiscrete reconstruction", 10.0, criterion_semidiscrete);
    run_criterion(2, "BAPU independence", 0.0, criterion_bapu_independence);
    run_criterion(3, "atomic contraction and Neumann reconstruction", 60.0, criterion_atomic);
    run_criterion(4, "Banach-frame round trip", 0.0, criterion_banach);
    run_criterion(5, "Schur-criteria separation", 120.0, criterion_schur);
    run_criterion(6, "stated numeric bounds", 15.0, criterion_numeric_bounds);
    run_criterion(7, "convolution factorization", 5.0, criterion_factorization);
    run_criterion(8, "frame-bound trend", 60.0, criterion_frame_bound_trend);
    if (g_failures > 0) {
        std::printf("%d of 8 criteria FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
