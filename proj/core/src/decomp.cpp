#include "decospace/decomp.hpp"

#include <algorithm>
#include <cmath>

namespace decospace {

SpaceConfig::SpaceConfig(Partition part, double p_, double q_, ModerateWeightSpec w_,
                         WeightSpec v_)
    : partition(std::move(part)), p(p_), q(q_), w(w_), v(v_) {
    if (!(p > 0.0) || !(q > 0.0))
        throw config_error("decomp", "exponents", "p and q must be positive");
}

SampledField frequency_piece(const SampledField& f, const SpaceConfig& cfg, std::size_t i) {
    const GridSpec& g = cfg.partition.grid;
    if (!(f.spec() == g))
        throw config_error("decomp", "grid_mismatch", "field grid differs from the partition grid");
    if (i >= cfg.partition.phi.size())
        throw config_error("decomp", "index", "truncation position out of range");
    require_band_limited(f, "decomp");
    auto fr = f.freq();
    std::vector<cdouble> piece(fr.size());
    for (std::size_t a = 0; a < piece.size(); ++a) piece[a] = cfg.partition.phi[i][a] * fr[a];
    return SampledField::from_freq(g, std::move(piece));
}

double weighted_lq(std::span<const double> values, std::span<const double> weights, double q) {
    if (std::isinf(q)) {
        double mx = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            mx = std::max(mx, weights[i] * values[i]);
        return mx;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        acc += std::pow(weights[i] * values[i], q);
    return std::pow(acc, 1.0 / q);
}

double decomp_norm(const SampledField& f, const SpaceConfig& cfg) {
    const std::size_t ni = cfg.partition.idx.indices.size();
    std::vector<double> piece_norms(ni), weights(ni);
    for (std::size_t i = 0; i < ni; ++i) {
        piece_norms[i] = weighted_lp_norm(frequency_piece(f, cfg, i), cfg.p, cfg.v);
        weights[i] = cfg.w(cfg.partition.idx.indices[i]);
    }
    return weighted_lq(piece_norms, weights, cfg.q);
}

std::vector<cdouble> clustering_map(std::span<const cdouble> c, const ClusterMap& cl) {
    if (c.size() != cl.size())
        throw config_error("decomp", "clustering_map", "sequence length differs from cluster map");
    std::vector<cdouble> out(c.size(), cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < cl.size(); ++i)
        for (std::size_t l : cl[i]) out[i] += c[l];
    return out;
}

} // namespace decospace
