#pragma once

#include "decospace/bapu.hpp"
#include "decospace/covering.hpp"
#include "decospace/grid.hpp"

namespace decospace {

// Everything needed to evaluate the decomposition quasi-norm
// |(|F^{-1}(phi_i fhat)|_{L^p_v})_i|_{l^q_w}.
struct SpaceConfig {
    Partition partition; // carries the covering, truncation, and grid
    double p = 2.0;
    double q = 2.0;
    ModerateWeightSpec w;
    WeightSpec v;

    SpaceConfig(Partition part, double p_, double q_, ModerateWeightSpec w_, WeightSpec v_);
};

// F^{-1}(phi_i fhat) for the i-th truncation position.
SampledField frequency_piece(const SampledField& f, const SpaceConfig& cfg, std::size_t i);

double decomp_norm(const SampledField& f, const SpaceConfig& cfg);

// Weighted l^q aggregation shared by decomp_norm and the coefficient-space
// norms: (sum_i (w_i x_i)^q)^{1/q}, max for q = infinity.
double weighted_lq(std::span<const double> values, std::span<const double> weights, double q);

// Clustering map (Gamma_Q c)_i = sum_{l in i*} c_l.
std::vector<cdouble> clustering_map(std::span<const cdouble> c, const ClusterMap& cl);

} // namespace decospace
