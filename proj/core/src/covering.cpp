#include "decospace/covering.hpp"

#include <algorithm>
#include <cmath>

namespace decospace {

BaseSet BaseSet::ball(double radius) {
    if (!(radius > 0.0)) throw config_error("covering", "base_set", "ball radius must be > 0");
    BaseSet s;
    s.kind = Kind::ball;
    s.r = radius;
    return s;
}

BaseSet BaseSet::annulus(double inner, double outer) {
    if (!(0.0 < inner && inner < outer))
        throw config_error("covering", "base_set", "annulus needs 0 < a < b");
    BaseSet s;
    s.kind = Kind::annulus;
    s.a = inner;
    s.b = outer;
    return s;
}

BaseSet BaseSet::cube(double halfwidth) {
    if (!(halfwidth > 0.0)) throw config_error("covering", "base_set", "cube halfwidth must be > 0");
    BaseSet s;
    s.kind = Kind::cube;
    s.r = halfwidth;
    return s;
}

bool BaseSet::contains(const Point& p, int d) const {
    switch (kind) {
    case Kind::ball:
        return norm2(p, d) < r;
    case Kind::annulus: {
        double rho = norm2(p, d);
        return a < rho && rho < b;
    }
    case Kind::cube:
        for (int m = 0; m < d; ++m)
            if (std::abs(p[m]) >= r) return false;
        return true;
    }
    return false;
}

bool BaseSet::contains_closed(const Point& p, int d) const {
    const double slack = 1e-12;
    switch (kind) {
    case Kind::ball:
        return norm2(p, d) <= r * (1.0 + slack);
    case Kind::annulus: {
        double rho = norm2(p, d);
        return a * (1.0 - slack) <= rho && rho <= b * (1.0 + slack);
    }
    case Kind::cube:
        for (int m = 0; m < d; ++m)
            if (std::abs(p[m]) > r * (1.0 + slack)) return false;
        return true;
    }
    return false;
}

double BaseSet::bounding_radius() const {
    switch (kind) {
    case Kind::ball:
        return r;
    case Kind::annulus:
        return b;
    case Kind::cube:
        return r; // per-axis halfwidth; Euclidean bound applied by callers as needed
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

StructuredCovering build_besov_covering(int d) {
    if (d != 1 && d != 2) throw config_error("covering", "dimension", "d must be 1 or 2");
    StructuredCovering c;
    c.kind = StructuredCovering::Kind::besov;
    c.d = d;
    return c;
}

StructuredCovering build_alpha_covering(int d, double alpha, double r) {
    if (d != 1 && d != 2) throw config_error("covering", "dimension", "d must be 1 or 2");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw config_error("covering", "alpha_range", "alpha must lie in [0, 1)");
    if (!(r > 0.0)) throw config_error("covering", "radius", "r must be > 0");
    StructuredCovering c;
    c.kind = StructuredCovering::Kind::alpha;
    c.d = d;
    c.alpha = alpha;
    c.r = r;
    return c;
}

StructuredCovering build_uniform_covering(int d, double r) {
    StructuredCovering c = build_alpha_covering(d, 0.0, r);
    c.kind = StructuredCovering::Kind::uniform;
    return c;
}

AffinePiece StructuredCovering::piece(const CoverIndex& i) const {
    AffinePiece p;
    switch (kind) {
    case Kind::besov:
        if (i.j < 0) throw config_error("covering", "index", "besov index must be >= 0");
        if (i.j == 0) {
            p.t = 1.0;
            p.base = BaseSet::ball(2.0);
            p.inner = BaseSet::ball(1.8);
        } else {
            p.t = std::pow(2.0, i.j);
            p.base = BaseSet::annulus(0.25, 4.0);
            p.inner = BaseSet::annulus(0.3, 3.7);
        }
        p.b = {0.0, 0.0};
        return p;
    case Kind::alpha: {
        double kn = 0.0;
        for (int m = 0; m < d; ++m) kn += static_cast<double>(i.k[m]) * i.k[m];
        kn = std::sqrt(kn);
        if (kn == 0.0)
            throw config_error("covering", "index", "alpha covering excludes k = 0");
        double scale = std::pow(kn, alpha0());
        p.t = scale;
        for (int m = 0; m < d; ++m) p.b[m] = scale * i.k[m];
        p.base = BaseSet::ball(r);
        p.inner = BaseSet::ball(0.95 * r);
        return p;
    }
    case Kind::uniform:
        p.t = 1.0;
        for (int m = 0; m < d; ++m) p.b[m] = static_cast<double>(i.k[m]);
        p.base = BaseSet::ball(r);
        p.inner = BaseSet::ball(0.95 * r);
        return p;
    }
    throw config_error("covering", "kind", "unreachable");
}

std::string StructuredCovering::index_name(const CoverIndex& i) const {
    if (kind == Kind::besov) return std::to_string(i.j);
    std::string s = std::to_string(i.k[0]);
    if (d == 2) s += "," + std::to_string(i.k[1]);
    return s;
}

// ---------------------------------------------------------------------------

TruncatedIndexSet truncate(const StructuredCovering& cov, double Xi) {
    if (!(Xi > 0.0)) throw config_error("covering", "truncation", "Xi must be > 0");
    TruncatedIndexSet out;
    out.Xi = Xi;
    const double corner = Xi * std::sqrt(static_cast<double>(cov.d));

    if (cov.kind == StructuredCovering::Kind::besov) {
        out.indices.push_back({0, {0, 0}});
        for (int j = 1;; ++j) {
            // Closed annulus [2^{j-2}, 2^{j+2}] meets the box iff the inner
            // radius does not exceed the box corner.
            if (std::pow(2.0, j - 2) > corner) break;
            out.indices.push_back({j, {0, 0}});
        }
        return out;
    }

    // alpha / uniform: closed ball of radius r*t_k at b_k meets the box iff
    // dist(b_k, box) <= r*t_k. Enumerate |k|_inf up to an analytic cap.
    const bool uniform = cov.kind == StructuredCovering::Kind::uniform;
    const double a0 = uniform ? 0.0 : cov.alpha0();
    int cap = 1;
    while (true) {
        double kn = static_cast<double>(cap);
        double t = std::pow(kn, a0);
        if (kn * t - cov.r * t > corner) break;
        ++cap;
        if (cap > 1 << 24)
            throw config_error("covering", "truncation", "truncation cap overflow");
    }
    auto consider = [&](int k0, int k1) {
        CoverIndex ci{0, {k0, k1}};
        if (!uniform && k0 == 0 && k1 == 0) return;
        AffinePiece p = cov.piece(ci);
        double dist2 = 0.0;
        for (int m = 0; m < cov.d; ++m) {
            double excess = std::max(0.0, std::abs(p.b[m]) - Xi);
            dist2 += excess * excess;
        }
        if (std::sqrt(dist2) <= cov.r * p.t) out.indices.push_back(ci);
    };
    if (cov.d == 1) {
        for (int k0 = -cap; k0 <= cap; ++k0) consider(k0, 0);
    } else {
        for (int k0 = -cap; k0 <= cap; ++k0)
            for (int k1 = -cap; k1 <= cap; ++k1) consider(k0, k1);
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.empty_warning = out.indices.empty();
    return out;
}

namespace {

struct ConcreteSet {
    // Scaled/translated base set: kind ball -> ball(rad) at center;
    // kind annulus -> radial shell (lo, hi) centered at the origin.
    BaseSet::Kind kind;
    double rad = 0.0, lo = 0.0, hi = 0.0;
    Point center{0.0, 0.0};
};

ConcreteSet concretize(const AffinePiece& p) {
    ConcreteSet s;
    s.kind = p.base.kind;
    switch (p.base.kind) {
    case BaseSet::Kind::ball:
        s.rad = p.t * p.base.r;
        s.center = p.b;
        break;
    case BaseSet::Kind::annulus:
        if (p.b[0] != 0.0 || p.b[1] != 0.0)
            throw config_error("covering", "geometry", "off-center annuli are unsupported");
        s.lo = p.t * p.base.a;
        s.hi = p.t * p.base.b;
        break;
    case BaseSet::Kind::cube:
        throw config_error("covering", "geometry", "cube covering members are unsupported");
    }
    return s;
}

bool intersects(const ConcreteSet& x, const ConcreteSet& y, int d) {
    using K = BaseSet::Kind;
    if (x.kind == K::ball && y.kind == K::ball) {
        Point diff{x.center[0] - y.center[0], x.center[1] - y.center[1]};
        return norm2(diff, d) < x.rad + y.rad;
    }
    if (x.kind == K::annulus && y.kind == K::annulus)
        return x.lo < y.hi && y.lo < x.hi;
    const ConcreteSet& ball = (x.kind == K::ball) ? x : y;
    const ConcreteSet& ann = (x.kind == K::ball) ? y : x;
    double rho = norm2(ball.center, d);
    double dist = 0.0;
    if (rho < ann.lo)
        dist = ann.lo - rho;
    else if (rho > ann.hi)
        dist = rho - ann.hi;
    return dist < ball.rad;
}

} // namespace

ClusterMap clusters(const StructuredCovering& cov, const TruncatedIndexSet& idx) {
    const std::size_t n = idx.indices.size();
    std::vector<ConcreteSet> sets(n);
    for (std::size_t i = 0; i < n; ++i) sets[i] = concretize(cov.piece(idx.indices[i]));
    ClusterMap cl(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l)
            if (intersects(sets[i], sets[l], cov.d)) cl[i].push_back(l);
    }
    return cl;
}

AdmissibilityConstants admissibility_constants(const StructuredCovering& cov,
                                               const TruncatedIndexSet& idx,
                                               const ClusterMap& cl) {
    AdmissibilityConstants out;
    for (std::size_t i = 0; i < idx.indices.size(); ++i) {
        out.N_Q = std::max(out.N_Q, static_cast<int>(cl[i].size()));
        AffinePiece pi = cov.piece(idx.indices[i]);
        out.R_Q = std::max(out.R_Q, pi.base.bounding_radius());
        for (std::size_t l : cl[i]) {
            AffinePiece pl = cov.piece(idx.indices[l]);
            // |T_i^{-1} T_l| = t_l / t_i for scalar linear parts.
            out.C_Q = std::max(out.C_Q, pl.t / pi.t);
        }
    }
    return out;
}

double ModerateWeightSpec::operator()(const CoverIndex& i) const {
    switch (kind) {
    case Kind::one:
        return 1.0;
    case Kind::alpha_power: {
        double k2 = static_cast<double>(i.k[0]) * i.k[0] + static_cast<double>(i.k[1]) * i.k[1];
        return std::pow(1.0 + k2, 0.5 * s / (1.0 - alpha));
    }
    case Kind::dyadic:
        return std::pow(2.0, i.j * s);
    }
    return 1.0;
}

double weight_moderateness(const StructuredCovering& cov, const ModerateWeightSpec& w,
                           const TruncatedIndexSet& idx, const ClusterMap& cl) {
    (void)cov;
    double c = 0.0;
    for (std::size_t i = 0; i < idx.indices.size(); ++i) {
        double wi = w(idx.indices[i]);
        for (std::size_t l : cl[i]) c = std::max(c, wi / w(idx.indices[l]));
    }
    return c;
}

CoveringReport covering_check(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                              const GridSpec& grid) {
    if (idx.Xi < grid.trusted_radius())
        throw config_error("covering", "covering_check",
                           "truncation Xi is smaller than the trusted band");
    CoveringReport rep;
    rep.covered = true;
    rep.inner_covered = true;
    const double band = grid.trusted_radius();
    std::vector<AffinePiece> pieces(idx.indices.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) pieces[i] = cov.piece(idx.indices[i]);

    for (std::size_t a = 0; a < grid.size(); ++a) {
        Point xi = grid.freq_point(a);
        double linf = 0.0;
        for (int m = 0; m < grid.d; ++m) linf = std::max(linf, std::abs(xi[m]));
        if (linf > band) continue;
        bool in_outer = false, in_inner = false;
        for (const AffinePiece& p : pieces) {
            Point u{0.0, 0.0};
            for (int m = 0; m < grid.d; ++m) u[m] = (xi[m] - p.b[m]) / p.t;
            if (!in_outer && p.base.contains_closed(u, grid.d)) in_outer = true;
            if (!in_inner && p.inner.contains_closed(u, grid.d)) in_inner = true;
            if (in_outer && in_inner) break;
        }
        if (!in_outer) {
            rep.covered = false;
            if (rep.uncovered.size() < 10) rep.uncovered.push_back(xi);
        }
        if (!in_inner) {
            rep.inner_covered = false;
            if (rep.inner_uncovered.size() < 10) rep.inner_uncovered.push_back(xi);
        }
    }
    return rep;
}

} // namespace decospace
