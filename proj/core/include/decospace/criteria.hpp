#pragma once

#include <vector>

#include "decospace/covering.hpp"
#include "decospace/grid.hpp"

namespace decospace {

// Exponent bookkeeping for the Schur-matrix criteria. All derived quantities
// are recomputed on demand; nothing is cached.
struct CriteriaParams {
    double p = 2.0;
    double q = 2.0;
    double p0 = 1.0; // in (0, 1]
    double q0 = 1.0; // in (0, 1]
    double eps = 0.5;
    double mu = 0.0; // weight exponent of the space actually considered
    double mu0 = 0.0;
    double s0 = 0.0;
    double s1 = 0.0;

    double K() const; // |mu|
    double tau() const;
    int N(int d) const; // >= d+1 by construction
    double sigma_frame(int d) const;
    double sigma_atomic(int d) const;
    double theta() const; // max(0, 1/p - 1)

    void validate() const;
};

struct QuadratureSpec {
    int nodes_per_axis = 64;
};

struct SchurMatrix {
    enum class Tag { frame, atomic };

    Tag tag = Tag::frame;
    TruncatedIndexSet idx;
    std::vector<double> entries; // row-major; frame rows = j, atomic rows = i

    std::size_t n() const { return idx.indices.size(); }
    double at(std::size_t row, std::size_t col) const { return entries[row * n() + col]; }
    double& at(std::size_t row, std::size_t col) { return entries[row * n() + col]; }
};

// M_{j,i} of the Banach-frame criterion: weight/dilation prefactor times the
// tensor-midpoint quadrature of max_{|alpha| <= N, |beta| <= 1}
// |d^alpha [(2 pi i zeta)^beta gammahat_j](zeta)| over Q_i.
SchurMatrix schur_matrix_frame(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                               const std::vector<PrototypeSpec>& prototypes,
                               const ModerateWeightSpec& w, const CriteriaParams& params,
                               const QuadratureSpec& quad = {});

// N_{i,j} of the atomic criterion, with the gamma_{j,1} factor
// gammahat_{j,1} = gammahat_j * {zeta}^{(d+1+eps)/2} and no beta maximization.
SchurMatrix schur_matrix_atomic(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                                const std::vector<PrototypeSpec>& prototypes,
                                const ModerateWeightSpec& w, const CriteriaParams& params,
                                const QuadratureSpec& quad = {});

struct SchurSums {
    double C1 = 0.0; // max over columns of the column sum
    double C2 = 0.0; // max over rows of the row sum
};
SchurSums schur_sums(const SchurMatrix& M);

// Max over shared rows/columns of (full-truncation sum)/(half-truncation sum).
double schur_stability(const SchurMatrix& full, const SchurMatrix& half);

// Lemma-style bound: max{C1, C2} for p in (1, inf); (max_col sum_row M^p)^{1/p}
// for p <= 1; max row sum for p = inf.
double schur_operator_bound(const SchurMatrix& M, double p);

struct AlphaThresholds {
    double N0_frame = 0.0;
    double M0_atomic = 0.0;
    double Lambda = 0.0;
};
AlphaThresholds alpha_thresholds(int d, double alpha, double p0, double q0, double s0,
                                 double mu0, double eps);

// Strict lower bounds on the prototype decay orders (L, L1, L2).
struct BesovThresholds {
    double frame_L_min = 0.0;
    double frame_L1_min = 0.0;
    double frame_L2_min = 0.0;
    double frame_theta = 0.0;
    double atomic_L_min = 0.0;
    double atomic_L1_min = 0.0;
    double atomic_L2_min = 0.0;
    double atomic_theta0 = 0.0;
    double atomic_kappa = 0.0;
};
BesovThresholds besov_thresholds(int d, double p0, double q0, double s0, double s1, double mu0,
                                 double eps);

struct FactorizeReport {
    bool decay_ok = false;
    double reconstruction_error = 0.0; // ||gamma - gamma1 * gamma2|| / ||gamma|| in L2
    double gamma2_weighted_sup = 0.0;  // sup (1+|x|)^K |gamma2(x)| on the grid, K = d+1
    double gamma2_decay_bound = 0.0;   // s_d 2^{1+d+3K} K! (1+d)^{1+2K}
};

struct Factorization {
    SampledField gamma1;
    SampledField gamma2;
    FactorizeReport report;
};

// gamma = gamma1 * gamma2 with gammahat2 = {xi}^{-(d+1+eps)/2}, {xi} = 1+|xi|^2.
Factorization factorize(const PrototypeSpec& gamma, double eps, const GridSpec& grid);

struct LatticeSeries {
    double partial = 0.0;
    double tail = 0.0;
    double total() const { return partial + tail; }
};

// Sum_{k in Z^d} (1+||k||_inf)^{-(d+1)} with a certified integral tail;
// asserts total <= 6^d. d <= 3.
LatticeSeries lattice_series_bound(int d);

} // namespace decospace
