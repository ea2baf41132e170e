#include "decospace/amalgam.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace decospace {

Window Window::cube(double c) {
    if (!(c > 0.0)) throw config_error("amalgam", "window", "cube halfwidth must be > 0");
    return Window{c};
}

Window Window::affine_cube(double t, double c) {
    if (!(std::abs(t) > 0.0)) throw config_error("amalgam", "window", "singular dilation");
    return cube(c / std::abs(t));
}

namespace {

// Integer offsets o with |o * h| <= halfwidth; degrades to {0} for windows
// smaller than one grid cell.
std::vector<int> window_offsets(const GridSpec& g, double halfwidth) {
    if (halfwidth >= g.L)
        throw config_error("amalgam", "window_size", "window does not fit inside a half-torus");
    int reach = static_cast<int>(std::floor(halfwidth / g.h() + 1e-12));
    std::vector<int> off;
    for (int o = -reach; o <= reach; ++o) off.push_back(o);
    return off;
}

template <typename Reduce>
SampledField window_reduce(const SampledField& f, const Window& Q, Reduce reduce) {
    const GridSpec& g = f.spec();
    auto sp = f.space();
    std::vector<int> off = window_offsets(g, Q.halfwidth);
    std::vector<cdouble> out(g.size());
    std::vector<cdouble> values;
    values.reserve(off.size() * off.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
        MultiIndex ix = g.unflatten(a);
        values.clear();
        if (g.d == 1) {
            for (int o : off) {
                int j = ((ix[0] + o) % g.n + g.n) % g.n;
                values.push_back(sp[static_cast<std::size_t>(j)]);
            }
        } else {
            for (int o0 : off)
                for (int o1 : off) {
                    MultiIndex jx{((ix[0] + o0) % g.n + g.n) % g.n,
                                  ((ix[1] + o1) % g.n + g.n) % g.n};
                    values.push_back(sp[g.flatten(jx)]);
                }
        }
        out[a] = reduce(values);
    }
    return SampledField::from_space(g, std::move(out));
}

} // namespace

SampledField maximal_function(const SampledField& f, const Window& Q) {
    return window_reduce(f, Q, [](const std::vector<cdouble>& vals) {
        double mx = 0.0;
        for (const cdouble& v : vals) mx = std::max(mx, std::abs(v));
        return cdouble{mx, 0.0};
    });
}

double wiener_norm(const SampledField& f, const Window& Q, double p, const WeightSpec& v) {
    return weighted_lp_norm(maximal_function(f, Q), p, v);
}

SampledField oscillation(const SampledField& f, const Window& Q) {
    return window_reduce(f, Q, [](const std::vector<cdouble>& vals) {
        double mx = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            for (std::size_t j = i + 1; j < vals.size(); ++j)
                mx = std::max(mx, std::abs(vals[i] - vals[j]));
        return cdouble{mx, 0.0};
    });
}

} // namespace decospace
