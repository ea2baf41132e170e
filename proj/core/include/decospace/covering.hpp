#pragma once

#include <compare>
#include <string>
#include <vector>

#include "decospace/grid.hpp"

namespace decospace {

// Base sets Q' in normalized coordinates, centered at the origin.
struct BaseSet {
    enum class Kind { ball, annulus, cube };
    Kind kind = Kind::ball;
    double r = 1.0; // ball radius / cube halfwidth
    double a = 0.0; // annulus inner radius
    double b = 0.0; // annulus outer radius

    static BaseSet ball(double radius);
    static BaseSet annulus(double inner, double outer);
    static BaseSet cube(double halfwidth);

    // Open-set membership (used for cluster geometry).
    bool contains(const Point& p, int d) const;
    // Closure membership (used by covering_check: boundary points count as
    // covered, matching the closed sets Q-bar of the covering property).
    bool contains_closed(const Point& p, int d) const;
    double bounding_radius() const;
};

// Index into a structured covering. Besov coverings use j; alpha/uniform
// lattices use k (second component ignored for d = 1).
struct CoverIndex {
    int j = 0;
    std::array<int, 2> k{0, 0};

    auto operator<=>(const CoverIndex&) const = default;
};

// One covering member Q_i = t * base + b (all in-scope coverings have scalar
// linear parts T_i = t * identity).
struct AffinePiece {
    double t = 1.0;
    Point b{0.0, 0.0};
    BaseSet base;
    BaseSet inner;
};

struct StructuredCovering {
    enum class Kind { besov, alpha, uniform };
    Kind kind = Kind::besov;
    int d = 1;
    double alpha = 0.0; // alpha-modulation exponent
    double r = 1.0;     // ball radius for alpha/uniform

    double alpha0() const { return alpha / (1.0 - alpha); }
    AffinePiece piece(const CoverIndex& i) const;
    std::string index_name(const CoverIndex& i) const;
};

StructuredCovering build_besov_covering(int d);
StructuredCovering build_alpha_covering(int d, double alpha, double r);
StructuredCovering build_uniform_covering(int d, double r);

struct TruncatedIndexSet {
    std::vector<CoverIndex> indices;
    double Xi = 0.0;
    bool empty_warning = false; // set when no Q_i meets the box
};

// Indices whose closed Q_i meets [-Xi, Xi]^d, decided analytically.
TruncatedIndexSet truncate(const StructuredCovering& cov, double Xi);

// clusters[i] = positions (into idx.indices) of all l with Q_l meeting Q_i
// (open sets, closed-form geometry).
using ClusterMap = std::vector<std::vector<std::size_t>>;
ClusterMap clusters(const StructuredCovering& cov, const TruncatedIndexSet& idx);

struct AdmissibilityConstants {
    int N_Q = 0;    // max cluster size
    double R_Q = 0; // max base-set bounding radius
    double C_Q = 0; // max over clustered pairs of |T_i^{-1} T_l|
};
AdmissibilityConstants admissibility_constants(const StructuredCovering& cov,
                                               const TruncatedIndexSet& idx,
                                               const ClusterMap& cl);

struct ModerateWeightSpec {
    enum class Kind { one, alpha_power, dyadic };
    Kind kind = Kind::one;
    double s = 0.0;
    double alpha = 0.0; // only for alpha_power: w_k = <k>^{s/(1-alpha)}

    static ModerateWeightSpec one() { return {}; }
    static ModerateWeightSpec alpha_power(double s, double alpha) {
        return {Kind::alpha_power, s, alpha};
    }
    static ModerateWeightSpec dyadic(double s) { return {Kind::dyadic, s, 0.0}; }

    double operator()(const CoverIndex& i) const;
};

double weight_moderateness(const StructuredCovering& cov, const ModerateWeightSpec& w,
                           const TruncatedIndexSet& idx, const ClusterMap& cl);

struct CoveringReport {
    bool covered = false;       // every inner-band grid point in some Q_i
    bool inner_covered = false; // ... and in some inner set
    std::vector<Point> uncovered;
    std::vector<Point> inner_uncovered;
};

CoveringReport covering_check(const StructuredCovering& cov, const TruncatedIndexSet& idx,
                              const GridSpec& grid);

} // namespace decospace
