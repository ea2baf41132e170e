// decospace: configuration-driven experiment runner for the decomposition
// space library. Subcommands map one-to-one onto the library modules; every
// run prints a JSON summary to stdout and optionally writes JSON/CSV files
// into the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "decospace/amalgam.hpp"
#include "decospace/bapu.hpp"
#include "decospace/config.hpp"
#include "decospace/covering.hpp"
#include "decospace/criteria.hpp"
#include "decospace/decomp.hpp"
#include "decospace/frames.hpp"
#include "decospace/grid.hpp"
#include "decospace/io.hpp"
#include "decospace/testfields.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace decospace;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Invocation {
    ExperimentConfig cfg;
    bool emit_json = true;
    bool emit_csv = false;
};

void print_and_save(const Invocation& inv, const std::string& name, const ordered_json& report) {
    std::string text = report.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (inv.emit_json) {
        fs::create_directories(inv.cfg.out_dir);
        std::ofstream out(inv.cfg.out_dir + "/" + name + ".json");
        out << text;
    }
}

void save_rows(const Invocation& inv, const std::string& name, const std::string& header,
               const std::vector<std::string>& rows) {
    if (!inv.emit_csv) return;
    fs::create_directories(inv.cfg.out_dir);
    write_csv(inv.cfg.out_dir + "/" + name + ".csv", header, rows);
}

double rel_l2_error(const SampledField& a, const SampledField& b) {
    double numr = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.space().size(); ++i) {
        numr += std::norm(a.space()[i] - b.space()[i]);
        den += std::norm(b.space()[i]);
    }
    return std::sqrt(numr / den);
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces

std::vector<PrototypeSpec> prototypes_for(const ExperimentConfig& cfg,
                                          const TruncatedIndexSet& idx) {
    std::vector<PrototypeSpec> out;
    out.reserve(idx.indices.size());
    PrototypeSpec base = cfg.prototype.build();
    std::optional<PrototypeSpec> wav;
    if (cfg.wavelet) wav = cfg.wavelet->build();
    for (const CoverIndex& i : idx.indices)
        out.push_back((wav && i.j >= 1) ? *wav : base);
    return out;
}

FrameSystem build_frame(const ExperimentConfig& cfg, const StructuredCovering& cov,
                        const TruncatedIndexSet& idx, double delta) {
    if (cfg.wavelet)
        return FrameSystem::create_besov_wavelet(cov, idx, cfg.grid, delta,
                                                 cfg.prototype.build(), cfg.wavelet->build());
    return FrameSystem::create(cov, idx, cfg.grid, delta, cfg.prototype.build());
}

SpaceConfig build_space(const ExperimentConfig& cfg, Partition part) {
    return SpaceConfig(std::move(part), cfg.p, cfg.q, cfg.build_weight(),
                       cfg.build_space_weight());
}

// ---------------------------------------------------------------------------
// covering

int cmd_covering(const Invocation& inv) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto cl = clusters(cov, idx);
    auto cons = admissibility_constants(cov, idx, cl);
    double CQw = weight_moderateness(cov, cfg.build_weight(), idx, cl);

    auto idx2 = truncate(cov, 2.0 * cfg.Xi);
    auto cons2 = admissibility_constants(cov, idx2, clusters(cov, idx2));
    double cq_change = std::abs(cons2.C_Q - cons.C_Q) / cons.C_Q;

    auto report = covering_check(cov, idx, cfg.grid);

    ordered_json j;
    j["kind"] = cfg.covering_kind;
    j["d"] = cfg.grid.d;
    j["Xi"] = cfg.Xi;
    j["members"] = idx.indices.size();
    j["N_Q"] = cons.N_Q;
    j["R_Q"] = cons.R_Q;
    j["C_Q"] = cons.C_Q;
    j["C_Q_at_doubled_Xi"] = cons2.C_Q;
    j["C_Q_relative_change"] = cq_change;
    j["weight_moderateness"] = CQw;
    j["covered"] = report.covered;
    j["inner_covered"] = report.inner_covered;
    j["empty_truncation"] = idx.empty_warning;
    print_and_save(inv, "covering", j);

    std::vector<std::string> rows;
    for (std::size_t i = 0; i < idx.indices.size(); ++i) {
        auto piece = cov.piece(idx.indices[i]);
        rows.push_back(cov.index_name(idx.indices[i]) + "," + num(piece.t) + "," +
                       num(piece.b[0]) + "," + num(piece.b[1]) + "," +
                       std::to_string(cl[i].size()));
    }
    save_rows(inv, "covering", "index,t,b0,b1,cluster_size", rows);
    return 0;
}

// ---------------------------------------------------------------------------
// bapu

int cmd_bapu(const Invocation& inv) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto part = build_partition(cov, idx, cfg.grid, cfg.partition_N, cfg.plateau_blend);

    auto v0 = WeightSpec::companion(cfg.mu);
    auto per = bapu_constant_per_index(part, cfg.p, v0);
    double C = *std::max_element(per.begin(), per.end());

    MultiIndex e1{1, 0};
    auto deriv_per = partition_derivative_sups_per_index(part, e1);
    double deriv_sup = *std::max_element(deriv_per.begin(), deriv_per.end());

    // Partition-of-unity residual on the inner trusted band.
    double band = 0.9 * std::min(cfg.Xi, cfg.grid.trusted_radius());
    double residual = 0.0;
    for (std::size_t a = 0; a < cfg.grid.size(); ++a) {
        Point xi = cfg.grid.freq_point(a);
        if (norm2(xi, cfg.grid.d) > band) continue;
        double sum = 0.0;
        for (const auto& phi_i : part.phi) sum += phi_i[a];
        residual = std::max(residual, std::abs(sum - 1.0));
    }

    ordered_json j;
    j["p"] = cfg.p;
    j["mu"] = cfg.mu;
    j["partition_N"] = cfg.partition_N;
    j["plateau_blend"] = cfg.plateau_blend;
    j["bapu_constant"] = C;
    j["derivative_sup_order1"] = deriv_sup;
    j["partition_sum_residual"] = residual;
    j["residual_band"] = band;
    print_and_save(inv, "bapu", j);

    std::vector<std::string> rows;
    for (std::size_t i = 0; i < per.size(); ++i)
        rows.push_back(cov.index_name(idx.indices[i]) + "," + num(per[i]) + "," +
                       num(deriv_per[i]));
    save_rows(inv, "bapu", "index,bapu_value,derivative_sup_order1", rows);
    return 0;
}

// ---------------------------------------------------------------------------
// norm

int cmd_norm(const Invocation& inv) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto space = build_space(
        cfg, build_partition(cov, idx, cfg.grid, cfg.partition_N, cfg.plateau_blend));

    std::vector<std::string> rows;
    ordered_json trials = ordered_json::array();
    double lo = kInf, hi = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
        auto f = random_band_limited(cfg.grid, seed);
        double dn = decomp_norm(f, space);
        double l2 = weighted_lp_norm(f, 2.0, WeightSpec::one());
        double ratio = dn / l2;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        trials.push_back({{"seed", seed}, {"decomp_norm", dn}, {"l2_norm", l2}});
        rows.push_back(std::to_string(t) + "," + std::to_string(seed) + "," + num(dn) + "," +
                       num(l2) + "," + num(ratio));
    }

    ordered_json j;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["s"] = cfg.s;
    j["mu"] = cfg.mu;
    j["trials"] = trials;
    j["ratio_spread"] = hi / lo;
    print_and_save(inv, "norm", j);
    save_rows(inv, "norm", "trial,seed,decomp_norm,l2_norm,ratio", rows);
    return 0;
}

// ---------------------------------------------------------------------------
// frame

int cmd_frame_analyze(const Invocation& inv) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto sys = build_frame(cfg, cov, idx, cfg.deltas.front());

    auto f = random_band_limited(cfg.grid, cfg.seed);
    auto C = analyze(f, sys);
    double cnorm = coefficient_norm(C, sys, cfg.p, cfg.q, cfg.build_weight(),
                                    cfg.build_space_weight());

    fs::create_directories(cfg.out_dir);
    std::string path = cfg.out_dir + "/coefficients.dscf";
    write_coefficients_dscf(path, C);
    if (inv.emit_csv) write_coefficients_csv(cfg.out_dir + "/coefficients.csv", C);

    ordered_json j;
    j["delta"] = cfg.deltas.front();
    j["seed"] = cfg.seed;
    j["coefficient_norm"] = cnorm;
    j["coefficients"] = path;
    print_and_save(inv, "frame_analyze", j);
    return 0;
}

int cmd_frame_synthesize(const Invocation& inv, const std::string& in_path) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto sys = build_frame(cfg, cov, idx, cfg.deltas.front());

    CoefficientArray C;
    if (!in_path.empty()) {
        C = read_coefficients_dscf(in_path);
    } else {
        auto f = random_band_limited(cfg.grid, cfg.seed);
        C = analyze(f, sys);
    }
    auto g = synthesize(C, sys);

    fs::create_directories(cfg.out_dir);
    std::string path = cfg.out_dir + "/synthesized.dspf";
    write_field_dspf(path, g);
    if (inv.emit_csv) write_field_csv(cfg.out_dir + "/synthesized.csv", g);

    ordered_json j;
    j["delta"] = cfg.deltas.front();
    j["coefficients"] = in_path.empty() ? "analyze(seeded field)" : in_path;
    j["l2_norm"] = weighted_lp_norm(g, 2.0, WeightSpec::one());
    j["field"] = path;
    print_and_save(inv, "frame_synthesize", j);
    return 0;
}

int cmd_frame_reconstruct(const Invocation& inv, double tol, int max_iter) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto sys = build_frame(cfg, cov, idx, cfg.deltas.front());
    auto part = build_partition(cov, idx, cfg.grid, cfg.partition_N, cfg.plateau_blend);
    auto dual = dual_windows(sys, cfg.dual_margin);

    auto f = random_band_limited(cfg.grid, cfg.seed);
    auto semi = semidiscrete_reconstruct(f, sys, part, dual);
    double semi_err = rel_l2_error(semi, f);

    auto nm = neumann_reconstruct(f, sys, part, dual, tol, max_iter);
    double nm_err = rel_l2_error(nm.f_rec, f);

    ordered_json j;
    j["delta"] = cfg.deltas.front();
    j["seed"] = cfg.seed;
    j["semidiscrete_error"] = semi_err;
    j["neumann_error"] = nm_err;
    j["neumann_iterations"] = nm.report.iterations;
    j["neumann_converged"] = nm.report.converged;
    j["neumann_residuals"] = nm.report.residuals;
    print_and_save(inv, "frame_reconstruct", j);

    std::vector<std::string> rows;
    for (std::size_t i = 0; i < nm.report.residuals.size(); ++i)
        rows.push_back(std::to_string(i) + "," + num(nm.report.residuals[i]));
    save_rows(inv, "frame_reconstruct", "iteration,residual", rows);
    return 0;
}

int cmd_frame_bounds(const Invocation& inv) {
    const ExperimentConfig& cfg = inv.cfg;
    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto sys = build_frame(cfg, cov, idx, cfg.deltas.front());
    auto fb = frame_bounds_l2(sys, cfg.trials, cfg.seed);

    ordered_json j;
    j["delta"] = cfg.deltas.front();
    j["trials"] = cfg.trials;
    j["A"] = fb.A;
    j["B"] = fb.B;
    j["B_over_A"] = fb.B / fb.A;
    print_and_save(inv, "frame_bounds", j);
    return 0;
}

// ---------------------------------------------------------------------------
// criteria

double sphere_surface_measure(int d) {
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
    }
}

// Worst-case admissible density from the explicit constant chain of the
// atomic-decomposition theorem, evaluated in log space (the chain routinely
// leaves double range). The Omega suprema run over the truncation only.
ordered_json pessimistic_delta0(const ExperimentConfig& cfg, const StructuredCovering& cov,
                                const TruncatedIndexSet& idx, const SchurMatrix& atomic) {
    CriteriaParams prm = cfg.build_criteria();
    const int d = cfg.grid.d;
    const double p = std::isinf(prm.p) ? 1.0 : std::min(prm.p, 1.0e9);
    const double K = prm.K();
    const double s_d = sphere_surface_measure(d);

    auto cons = admissibility_constants(cov, idx, clusters(cov, idx));
    double omega0 = 1.0;
    for (const CoverIndex& i : idx.indices)
        omega0 = std::max(omega0, 1.0 / cov.piece(i).t);
    const double omega1 = cfg.build_space_weight().omega1();

    // Omega2: sup_i of the weighted norm of the inverse transform of the
    // reciprocal windows theta_i (theta_i * gammahat_i = 1 on the base set).
    auto sys = build_frame(cfg, cov, idx, cfg.deltas.front());
    // The reciprocal windows only need to invert gammahat on the base sets;
    // a fast-decaying prototype may reject the configured margin, so shrink
    // it until the support fits.
    double margin = cfg.dual_margin;
    std::optional<DualWindows> built;
    while (!built) {
        try {
            built = dual_windows(sys, margin);
        } catch (const invariant_failure&) {
            margin /= 2.0;
            if (margin < 1e-4) throw;
        }
    }
    const DualWindows& dual = *built;
    const auto wK = WeightSpec::companion(K); // [2(1+|x|)]^K; rescaled below
    double omega2 = 0.0;
    for (const auto& theta_i : dual.theta) {
        auto fi = SampledField::from_freq(cfg.grid, std::vector<cdouble>(theta_i.begin(),
                                                                         theta_i.end()));
        double ni = (p >= 1.0)
                        ? weighted_lp_norm(fi, 1.0, wK)
                        : wiener_norm(fi, Window::cube(1.0), p, wK);
        omega2 = std::max(omega2, ni / std::pow(2.0, K));
    }

    // Omega4: weighted sups of the universal factor gamma2 and its gradient.
    const double K0 = K + d / std::min(1.0, p) + 1.0;
    auto fac = factorize(cfg.prototype.build(), prm.eps, cfg.grid);
    std::vector<cdouble> grad_hat(fac.gamma2.freq().begin(), fac.gamma2.freq().end());
    for (std::size_t a = 0; a < grad_hat.size(); ++a) {
        Point xi = cfg.grid.freq_point(a);
        grad_hat[a] *= cdouble(0.0, 2.0 * std::numbers::pi * norm2(xi, d));
    }
    auto grad = SampledField::from_freq(cfg.grid, std::move(grad_hat));
    double sup_g2 = 0.0, sup_dg2 = 0.0;
    for (std::size_t a = 0; a < cfg.grid.size(); ++a) {
        double wx = std::pow(1.0 + norm2(cfg.grid.point(a), d), K0);
        sup_g2 = std::max(sup_g2, wx * std::abs(fac.gamma2.space()[a]));
        sup_dg2 = std::max(sup_dg2, wx * std::abs(grad.space()[a]));
    }
    const double omega4 = sup_g2 + sup_dg2;

    const double c_vec = schur_operator_bound(atomic, prm.p);

    double log10_inv;
    if (prm.p >= 1.0 || std::isinf(prm.p)) {
        log10_inv = std::log10(2.0 * s_d / std::sqrt(double(d))) +
                    (K + d + 3.0) * std::log10(std::pow(2.0, 17) * d * d * (K + 2.0 + d)) +
                    (d + 1.0) * std::log10(1.0 + cons.R_Q) + 4.0 * K * std::log10(omega0) +
                    4.0 * std::log10(omega1) + std::log10(omega2) + std::log10(omega4) +
                    std::log10(c_vec);
    } else {
        double e = K + 2.0 + (d + 1.0) / p;
        log10_inv = (d / p) * std::log10(std::pow(2.0, 14) / std::pow(double(d), 1.5)) -
                    std::log10(std::pow(2.0, 45) * std::pow(double(d), 17)) +
                    (1.0 / p) * std::log10(s_d / p) +
                    e * std::log10(std::pow(2.0, 68) * std::pow(double(d), 14) *
                                   std::pow(K + 1.0 + (d + 1.0) / p, 3)) +
                    (1.0 + 3.0 * d / p) * std::log10(1.0 + cons.R_Q) +
                    16.0 * K * std::log10(omega0) + 16.0 * std::log10(omega1) +
                    std::log10(omega2) + std::log10(omega4) + std::log10(c_vec) / p;
    }

    ordered_json j;
    j["value"] = std::pow(10.0, -log10_inv);
    j["log10"] = -log10_inv;
    j["Omega0"] = omega0;
    j["Omega1"] = omega1;
    j["Omega2"] = omega2;
    j["Omega4"] = omega4;
    j["C_operator_bound"] = c_vec;
    j["note"] = "pessimistic paper bound; Omega suprema evaluated on the truncation only";
    return j;
}

int cmd_criteria(const Invocation& inv, double truncation) {
    const ExperimentConfig& cfg = inv.cfg;
    double Xi = truncation > 0.0 ? truncation : cfg.Xi;
    auto cov = cfg.build_covering();
    auto full = truncate(cov, Xi);
    auto half = truncate(cov, Xi / 2.0);

    auto prm = cfg.build_criteria();
    QuadratureSpec quad{cfg.quadrature_nodes};
    auto w = cfg.build_weight();

    auto mf_full = schur_matrix_frame(cov, full, prototypes_for(cfg, full), w, prm, quad);
    auto mf_half = schur_matrix_frame(cov, half, prototypes_for(cfg, half), w, prm, quad);
    auto ma_full = schur_matrix_atomic(cov, full, prototypes_for(cfg, full), w, prm, quad);
    auto ma_half = schur_matrix_atomic(cov, half, prototypes_for(cfg, half), w, prm, quad);

    auto sums_f = schur_sums(mf_full);
    auto sums_a = schur_sums(ma_full);
    double stab_f = schur_stability(mf_full, mf_half);
    double stab_a = schur_stability(ma_full, ma_half);
    double stability = std::max(stab_f, stab_a);

    bool finite = std::isfinite(sums_f.C1) && std::isfinite(sums_f.C2) &&
                  std::isfinite(sums_a.C1) && std::isfinite(sums_a.C2);
    std::string verdict =
        (finite && stability <= 1.05) ? "admissible-certified" : "not-certified";

    ordered_json params;
    params["p"] = prm.p;
    params["q"] = prm.q;
    params["p0"] = prm.p0;
    params["q0"] = prm.q0;
    params["eps"] = prm.eps;
    params["mu"] = prm.mu;
    params["mu0"] = prm.mu0;
    params["s0"] = prm.s0;
    params["s1"] = prm.s1;
    params["quadrature_nodes"] = cfg.quadrature_nodes;

    ordered_json j;
    j["covering"] = cfg.covering_kind;
    j["Xi"] = Xi;
    j["params"] = params;
    j["frame"] = {{"C1", sums_f.C1}, {"C2", sums_f.C2}, {"stability", stab_f}};
    j["atomic"] = {{"C1", sums_a.C1}, {"C2", sums_a.C2}, {"stability", stab_a}};
    j["C1"] = std::max(sums_f.C1, sums_a.C1);
    j["C2"] = std::max(sums_f.C2, sums_a.C2);
    j["stability"] = stability;
    j["verdict"] = verdict;
    if (cfg.covering_kind == "alpha") {
        auto th = alpha_thresholds(cfg.grid.d, cfg.alpha, prm.p0, prm.q0, prm.s0, prm.mu0,
                                   prm.eps);
        j["thresholds"] = {{"N0_frame", th.N0_frame},
                           {"M0_atomic", th.M0_atomic},
                           {"Lambda", th.Lambda}};
    } else if (cfg.covering_kind == "besov") {
        auto th = besov_thresholds(cfg.grid.d, prm.p0, prm.q0, prm.s0, prm.s1, prm.mu0,
                                   prm.eps);
        j["thresholds"] = {{"frame_L_min", th.frame_L_min},
                           {"frame_L1_min", th.frame_L1_min},
                           {"frame_L2_min", th.frame_L2_min},
                           {"atomic_L_min", th.atomic_L_min},
                           {"atomic_L1_min", th.atomic_L1_min},
                           {"atomic_L2_min", th.atomic_L2_min}};
    }
    j["pessimistic_delta0"] = pessimistic_delta0(cfg, cov, full, ma_full);
    print_and_save(inv, "criteria", j);

    std::vector<std::string> rows;
    const std::size_t n = full.indices.size();
    for (std::size_t i = 0; i < n; ++i) {
        double fr = 0.0, fc = 0.0, ar = 0.0, ac = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            fr += mf_full.at(i, l);
            fc += mf_full.at(l, i);
            ar += ma_full.at(i, l);
            ac += ma_full.at(l, i);
        }
        rows.push_back(cov.index_name(full.indices[i]) + "," + num(fr) + "," + num(fc) + "," +
                       num(ar) + "," + num(ac));
    }
    save_rows(inv, "criteria", "index,frame_row_sum,frame_col_sum,atomic_row_sum,atomic_col_sum",
              rows);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const Invocation& inv, std::vector<double> deltas) {
    const ExperimentConfig& cfg = inv.cfg;
    if (deltas.empty()) deltas = cfg.deltas;
    for (double delta : deltas)
        if (!(delta > 0.0 && delta <= 1.0))
            throw config_error("cli", "sweep", "each delta must lie in (0, 1]");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());

    auto cov = cfg.build_covering();
    auto idx = truncate(cov, cfg.Xi);
    auto part = build_partition(cov, idx, cfg.grid, cfg.partition_N, cfg.plateau_blend);
    auto space = build_space(cfg, part);
    auto f = random_band_limited(cfg.grid, cfg.seed);
    double dn = decomp_norm(f, space);
    double fnorm = weighted_lp_norm(f, 2.0, WeightSpec::one());

    std::vector<std::string> rows;
    ordered_json points = ordered_json::array();
    std::vector<double> residuals;
    for (double delta : deltas) {
        auto sys = build_frame(cfg, cov, idx, delta);
        auto dual = dual_windows(sys, cfg.dual_margin);
        auto step = atomic_step(f, sys, part, dual);
        std::vector<cdouble> diff(f.space().begin(), f.space().end());
        for (std::size_t a = 0; a < diff.size(); ++a) diff[a] -= step.Tf.space()[a];
        double residual = 0.0;
        for (cdouble v : diff) residual += std::norm(v);
        residual = std::sqrt(residual) / fnorm;

        int iters = -1; // -1: the Neumann series did not contract at this density
        try {
            auto nm = neumann_reconstruct(f, sys, part, dual, 1e-8, 100);
            iters = nm.report.iterations;
        } catch (const no_contraction_error&) {
        }

        double cnorm = coefficient_norm(analyze(f, sys), sys, cfg.p, cfg.q, cfg.build_weight(),
                                        cfg.build_space_weight());
        double ratio = cnorm / dn;
        residuals.push_back(residual);
        rows.push_back(num(delta) + "," + num(residual) + "," + std::to_string(iters) + "," +
                       num(cnorm) + "," + num(dn) + "," + num(ratio));
        points.push_back({{"delta", delta},
                          {"residual", residual},
                          {"iters", iters},
                          {"coeff_norm", cnorm},
                          {"decomp_norm", dn},
                          {"ratio", ratio}});
    }

    std::string verdict = "insufficient points";
    if (deltas.size() >= 3) {
        bool monotone = true;
        for (std::size_t i = 1; i < residuals.size(); ++i)
            if (residuals[i] > residuals[i - 1] * (1.0 + 1e-12)) monotone = false;
        verdict = monotone ? "residual non-increasing" : "residual not monotone";
    }

    ordered_json j;
    j["seed"] = cfg.seed;
    j["points"] = points;
    j["verdict"] = verdict;
    print_and_save(inv, "sweep", j);
    save_rows(inv, "sweep", "delta,residual,iters,coeff_norm,decomp_norm,ratio", rows);
    return 0;
}

// ---------------------------------------------------------------------------
// verify

void require(bool cond, const std::string& module, const std::string& name,
             const std::string& detail) {
    if (!cond) throw invariant_failure(module, name, detail);
    std::printf("ok %s.%s\n", module.c_str(), name.c_str());
}

void verify_grid(std::uint64_t seed) {
    GridSpec g(1, 256, 8.0);
    auto f = random_band_limited(g, seed);
    auto round = SampledField::from_freq(g, std::vector<cdouble>(f.freq().begin(),
                                                                 f.freq().end()));
    require(rel_l2_error(round, f) <= 1e-12, "grid", "transform_round_trip",
            "space -> frequency -> space must be the identity");

    double space2 = weighted_lp_norm(f, 2.0, WeightSpec::one());
    double freq2 = 0.0;
    for (cdouble v : f.freq()) freq2 += std::norm(v);
    freq2 = std::sqrt(freq2 * std::pow(g.freq_step(), g.d));
    require(std::abs(space2 - freq2) <= 1e-10 * space2, "grid", "parseval",
            "the transform must preserve the L2 norm");
}

void verify_covering(std::uint64_t) {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 24.0);
    auto report = covering_check(cov, idx, GridSpec(1, 1024, 16.0));
    require(report.covered && report.inner_covered, "covering", "band_covered",
            "every trusted grid frequency must lie in some inner set");
    auto idx2 = truncate(cov, 48.0);
    bool subset = true;
    for (const CoverIndex& i : idx.indices)
        if (std::find(idx2.indices.begin(), idx2.indices.end(), i) == idx2.indices.end())
            subset = false;
    require(subset, "covering", "truncation_monotone",
            "doubling Xi must only add members");
}

void verify_bapu(std::uint64_t) {
    GridSpec g(1, 1024, 16.0); // trusted radius 12
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 12.0);
    auto part = build_partition(cov, idx, g, 4);
    double band = 0.9 * std::min(12.0, g.trusted_radius());
    double worst = 0.0;
    bool in_range = true;
    for (std::size_t a = 0; a < g.size(); ++a) {
        double sum = 0.0;
        for (const auto& phi_i : part.phi) {
            sum += phi_i[a];
            if (phi_i[a] < -1e-12 || phi_i[a] > 1.0 + 1e-12) in_range = false;
        }
        if (norm2(g.freq_point(a), 1) <= band) worst = std::max(worst, std::abs(sum - 1.0));
    }
    require(in_range, "bapu", "phi_range", "each phi_i must take values in [0, 1]");
    require(worst <= 1e-9, "bapu", "partition_of_unity",
            "sum of phi_i must equal 1 on the inner band");
}

void verify_amalgam(std::uint64_t seed) {
    GridSpec g(1, 256, 4.0);
    auto f = random_band_limited(g, seed);
    Window q = Window::cube(0.5);
    double plain = weighted_lp_norm(f, 2.0, WeightSpec::one());
    double wiener = wiener_norm(f, q, 2.0, WeightSpec::one());
    require(plain <= wiener * (1.0 + 1e-12), "amalgam", "wiener_dominates",
            "the amalgam norm must dominate the plain norm");
    auto m1 = maximal_function(f, Window::cube(0.25));
    auto m2 = maximal_function(f, Window::cube(0.75));
    bool monotone = true;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (m1.space()[i].real() > m2.space()[i].real() + 1e-14) monotone = false;
    require(monotone, "amalgam", "maximal_monotone",
            "the maximal function must grow with the window");
}

void verify_decomp(std::uint64_t seed) {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 24.0);
    GridSpec g(1, 2048, 16.0);
    auto part = build_partition(cov, idx, g, 4);
    SpaceConfig space(part, 2.0, 2.0, ModerateWeightSpec::one(), WeightSpec::one());
    auto f = random_band_limited(g, seed);
    std::vector<cdouble> acc(g.size(), 0.0);
    for (std::size_t i = 0; i < idx.indices.size(); ++i) {
        auto piece = frequency_piece(f, space, i);
        for (std::size_t a = 0; a < acc.size(); ++a) acc[a] += piece.space()[a];
    }
    auto sum = SampledField::from_space(g, std::move(acc));
    require(rel_l2_error(sum, f) <= 1e-9, "decomp", "pieces_sum",
            "frequency pieces must sum back to the field");

    double n1 = decomp_norm(f, space);
    std::vector<cdouble> scaled(f.space().begin(), f.space().end());
    for (auto& v : scaled) v *= 3.0;
    double n3 = decomp_norm(SampledField::from_space(g, std::move(scaled)), space);
    require(std::abs(n3 - 3.0 * n1) <= 1e-12 * n3, "decomp", "homogeneity",
            "the quasi-norm must be absolutely homogeneous");
}

void verify_frames(std::uint64_t seed) {
    auto cov = build_besov_covering(1);
    auto idx = truncate(cov, 24.0);
    GridSpec g(1, 2048, 16.0);
    auto sys = FrameSystem::create(cov, idx, g, 0.0625, PrototypeSpec::gaussian(16.0));
    require(nonvanishing_check(sys).pass, "frames", "nonvanishing",
            "the prototype transform must be bounded away from zero on the base sets");
    auto part = build_partition(cov, idx, g, 4);
    auto dual = dual_windows(sys);
    auto f = random_band_limited(g, seed);
    auto rec = semidiscrete_reconstruct(f, sys, part, dual);
    require(rel_l2_error(rec, f) <= 1e-8, "frames", "semidiscrete_identity",
            "semidiscrete reconstruction must reproduce band-limited fields");
}

void verify_criteria(std::uint64_t) {
    require(lattice_series_bound(1).total() <= 6.0, "criteria", "lattice_series",
            "the standard decay series must respect its stated bound");
    auto fac = factorize(PrototypeSpec::gaussian(1.0), 1.0, GridSpec(1, 512, 16.0));
    require(fac.report.reconstruction_error <= 1e-8, "criteria", "factorization",
            "the convolution factorization must reproduce the prototype");
    SchurMatrix m;
    m.idx.indices = {CoverIndex{0, {0, 0}}, CoverIndex{1, {0, 0}}, CoverIndex{2, {0, 0}}};
    m.entries = {1, 0, 0, 0, 4, 0, 0, 0, 9};
    require(std::abs(schur_operator_bound(m, 0.5) - 9.0) <= 1e-12, "criteria", "schur_bound",
            "the p = 1/2 Schur bound on a diagonal matrix is the squared max root sum");
}

int cmd_verify(const Invocation& inv, const std::string& which) {
    const std::uint64_t seed = inv.cfg.seed;
    struct Suite {
        const char* name;
        void (*run)(std::uint64_t);
    };
    const Suite suites[] = {{"grid", verify_grid},         {"covering", verify_covering},
                            {"bapu", verify_bapu},         {"amalgam", verify_amalgam},
                            {"decomp", verify_decomp},     {"frames", verify_frames},
                            {"criteria", verify_criteria}};
    ordered_json results;
    for (const Suite& s : suites) {
        if (which != "all" && which != s.name) continue;
        s.run(seed);
        results[s.name] = "pass";
    }
    ordered_json j;
    j["seed"] = seed;
    j["suites"] = results;
    print_and_save(inv, "verify", j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decomposition space experiment runner"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::int64_t seed_flag = -1;
    std::string out_dir_flag;
    std::vector<std::string> emit{"json"};
    app.add_option("--config", config_path, "experiment configuration file");
    app.add_option("--seed", seed_flag, "override the configured seed");
    app.add_option("--out-dir", out_dir_flag, "override the configured output directory");
    app.add_option("--emit", emit, "report formats to write (json, csv)")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* covering = app.add_subcommand("covering", "covering constants and checks");
    auto* bapu = app.add_subcommand("bapu", "partition of unity constants");
    auto* norm = app.add_subcommand("norm", "decomposition norms of seeded fields");

    auto* frame = app.add_subcommand("frame", "frame pipelines");
    frame->require_subcommand(1);
    auto* f_analyze = frame->add_subcommand("analyze", "coefficients of a seeded field");
    auto* f_synth = frame->add_subcommand("synthesize", "field from coefficients");
    std::string synth_in;
    f_synth->add_option("--in", synth_in, "coefficient file (.dscf); default: analyze first");
    auto* f_rec = frame->add_subcommand("reconstruct", "semidiscrete and Neumann reconstruction");
    double rec_tol = 1e-8;
    int rec_max_iter = 50;
    f_rec->add_option("--tol", rec_tol, "Neumann residual tolerance");
    f_rec->add_option("--max-iter", rec_max_iter, "Neumann iteration cap");
    auto* f_bounds = frame->add_subcommand("bounds", "empirical L2 frame bounds");

    auto* criteria = app.add_subcommand("criteria", "Schur admissibility criteria");
    double truncation = 0.0;
    criteria->add_option("--truncation", truncation, "override the truncation Xi");

    auto* sweep = app.add_subcommand("sweep", "atomic residuals across densities");
    std::vector<double> sweep_deltas;
    sweep->add_option("--deltas", sweep_deltas, "densities to sweep")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run a module invariant suite");
    std::string verify_which = "all";
    verify->add_option("suite", verify_which, "module suite or 'all'")
        ->check(CLI::IsMember({"grid", "covering", "bapu", "amalgam", "decomp", "frames",
                               "criteria", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Invocation inv;
        if (!config_path.empty()) inv.cfg = parse_experiment_config(config_path);
        if (seed_flag >= 0) inv.cfg.seed = static_cast<std::uint64_t>(seed_flag);
        if (!out_dir_flag.empty()) inv.cfg.out_dir = out_dir_flag;
        inv.cfg.validate();
        inv.emit_json = std::find(emit.begin(), emit.end(), "json") != emit.end();
        inv.emit_csv = std::find(emit.begin(), emit.end(), "csv") != emit.end();

        if (covering->parsed()) return cmd_covering(inv);
        if (bapu->parsed()) return cmd_bapu(inv);
        if (norm->parsed()) return cmd_norm(inv);
        if (frame->parsed()) {
            if (f_analyze->parsed()) return cmd_frame_analyze(inv);
            if (f_synth->parsed()) return cmd_frame_synthesize(inv, synth_in);
            if (f_rec->parsed()) return cmd_frame_reconstruct(inv, rec_tol, rec_max_iter);
            if (f_bounds->parsed()) return cmd_frame_bounds(inv);
        }
        if (criteria->parsed()) return cmd_criteria(inv, truncation);
        if (sweep->parsed()) return cmd_sweep(inv, sweep_deltas);
        if (verify->parsed()) return cmd_verify(inv, verify_which);
        return 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const numeric_guard_error& e) {
        std::fprintf(stderr, "numeric guard: %s\n", e.what());
        return 3;
    } catch (const invariant_failure& e) {
        std::fprintf(stderr, "invariant failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
