#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decospace/covering.hpp"
#include "decospace/criteria.hpp"
#include "decospace/grid.hpp"

namespace decospace {

struct PrototypeConfig {
    std::string kind = "gaussian"; // gaussian | bspline | cutoff
    double a = 16.0;               // gaussian width
    int order = 3;                 // bspline order
    int N = 4;                     // cutoff smoothness
    double R = 1.0;                // cutoff plateau halfwidth
    double s = 1.0;                // cutoff transition width

    PrototypeSpec build() const;
};

// Everything an experiment run needs, parsed from one structured text file.
// Sections mirror the module names; unknown sections or keys are errors.
struct ExperimentConfig {
    GridSpec grid{1, 2048, 16.0};

    std::string covering_kind = "besov"; // besov | alpha | uniform
    double alpha = 0.5;
    double r = 1.0;
    double Xi = 24.0;

    int partition_N = 4;
    double plateau_blend = 0.0;

    double p = 2.0;
    double q = 2.0;
    double s = 0.0;
    double mu = 0.0;

    PrototypeConfig prototype;
    std::optional<PrototypeConfig> wavelet; // Besov j >= 1 branch, if distinct

    std::vector<double> deltas{0.0625};
    double dual_margin = 0.1;

    CriteriaParams criteria;
    int quadrature_nodes = 64;

    std::uint64_t seed = 7;
    int trials = 3;

    std::string out_dir = ".";

    StructuredCovering build_covering() const;
    TruncatedIndexSet build_truncation() const;
    ModerateWeightSpec build_weight() const;
    WeightSpec build_space_weight() const;
    CriteriaParams build_criteria() const; // criteria section + space exponents

    void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_text(const std::string& text, const std::string& origin);

} // namespace decospace
