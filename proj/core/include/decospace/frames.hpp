#pragma once

#include <optional>
#include <vector>

#include "decospace/bapu.hpp"
#include "decospace/covering.hpp"
#include "decospace/decomp.hpp"
#include "decospace/grid.hpp"

namespace decospace {

// Retained lattice indices k per covering member: delta * T_i^{-T} k must stay
// on the torus with a 4h safety margin.
struct LatticeRange {
    MultiIndex kmin{0, 0};
    MultiIndex kmax{0, 0}; // inclusive

    std::size_t count(int d) const;
    std::size_t flatten(const MultiIndex& k, int d) const;
};

// Structured frame system Psi_delta = (L_{delta T_i^{-T} k} gamma^{[i]}).
struct FrameSystem {
    StructuredCovering covering;
    TruncatedIndexSet idx;
    GridSpec grid;
    double delta = 1.0;
    std::vector<PrototypeSpec> prototypes; // one per truncation position
    std::vector<LatticeRange> lattice;

    // Constant prototype family.
    static FrameSystem create(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                              const GridSpec& grid, double delta, const PrototypeSpec& gamma);
    // Besov wavelet family: scaling prototype on index 0, wavelet on j >= 1.
    static FrameSystem create_besov_wavelet(const StructuredCovering& cov,
                                            const TruncatedIndexSet& idx, const GridSpec& grid,
                                            double delta, const PrototypeSpec& scaling,
                                            const PrototypeSpec& wavelet);

    double lattice_step(std::size_t i) const; // eta = delta / t_i
    Point lattice_point(std::size_t i, const MultiIndex& k) const;
    // Frequency samples of F[gamma^{[i]}] (l2) or F[gamma^{(i)}] (l1) on the grid.
    std::vector<cdouble> filter_hat(std::size_t i, Normalization norm) const;
};

struct CoefficientArray {
    double delta = 1.0;
    int d = 1;
    std::vector<LatticeRange> ranges;
    std::vector<std::vector<cdouble>> values; // [index position][flattened k]

    static CoefficientArray zero_like(const FrameSystem& sys);
};

struct NonvanishingReport {
    bool pass = false;
    double floor_c = 0.0; // min over indices of min |gammahat_i| on the base set
    std::vector<double> per_index_min;
    Point worst_point{0.0, 0.0}; // normalized coordinates of the global minimum
};

NonvanishingReport nonvanishing_check(const FrameSystem& sys);

struct DualWindows {
    double floor_c = 0.0;
    double margin = 0.1;
    std::vector<std::vector<cdouble>> theta; // [index position][grid flat]
};

// theta_i = eta_cut / gammahat_i in normalized coordinates, sampled on the
// grid; eta_cut == 1 on the closed base set and is supported where
// |gammahat_i| > c/2.
DualWindows dual_windows(const FrameSystem& sys, double margin = 0.1);

// c_k^{(i)} = (gamma^{[i]} * f)(delta T_i^{-T} k).
CoefficientArray analyze(const SampledField& f, const FrameSystem& sys);

// Outer weighted l^q over i (weight |det T_i|^{1/2 - 1/p} w_i) of inner
// weighted l^p over k (weight v(delta T_i^{-T} k)).
double coefficient_norm(const CoefficientArray& C, const FrameSystem& sys, double p, double q,
                        const ModerateWeightSpec& w, const WeightSpec& v);

SampledField synthesize(const CoefficientArray& C, const FrameSystem& sys);

// Synth_D o m_theta o Ana_Gamma: returns sum_i F^{-1}(phi_i theta_i
// gammahat^{(i)} fhat), which collapses to f up to grid error.
SampledField semidiscrete_reconstruct(const SampledField& f, const FrameSystem& sys,
                                      const Partition& part, const DualWindows& dual);

// D^(delta) and T^(delta) = S^(delta) o D^(delta).
struct AtomicStep {
    CoefficientArray C;
    SampledField Tf;
};
AtomicStep atomic_step(const SampledField& f, const FrameSystem& sys, const Partition& part,
                       const DualWindows& dual);

struct NeumannReport {
    int iterations = 0;
    std::vector<double> residuals; // relative, per iteration
    bool converged = false;
};

struct NeumannResult {
    CoefficientArray C;
    SampledField f_rec;
    NeumannReport report;
};

NeumannResult neumann_reconstruct(const SampledField& f, const FrameSystem& sys,
                                  const Partition& part, const DualWindows& dual, double tol,
                                  int max_iter);

// R_delta: step-function synthesis, projection F, Neumann inversion of the
// tuple operator, then Synth_D o m_theta.
struct BanachResult {
    SampledField f_rec;
    NeumannReport report;
};
BanachResult banach_reconstruct(const CoefficientArray& C_in, const FrameSystem& sys,
                                const Partition& part, const DualWindows& dual, double tol,
                                int max_iter);

struct FrameBounds {
    double A = 0.0;
    double B = 0.0;
};
FrameBounds frame_bounds_l2(const FrameSystem& sys, int trials, std::uint64_t seed = 7);

} // namespace decospace
