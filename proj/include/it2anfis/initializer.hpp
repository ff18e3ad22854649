#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "it2anfis/matrix.hpp"
#include "it2anfis/rule_base.hpp"

namespace it2anfis {

using FeatureRange = std::pair<double, double>;  // (min, max)

struct InitConfig {
    std::size_t n_rules = 7;
    double alpha = 0.2;  // uncertain-mean width as a fraction of the partition width
    double sigma_min = kSigmaMin;
    double consequent_std = 0.01;
    std::uint64_t seed = 0;
    Mode mode = Mode::IT2;
    double q = 0.5;  // type-reduction weight
    /// false assigns rule j to stratum j on every feature (diagonal centres).
    bool lhs_permute = true;

    void validate() const;
};

/// Latin-hypercube rule centres: for every feature the R centres fall one per
/// equal-width stratum of [min, max), with a seeded stratum permutation per
/// feature and a uniform offset inside the stratum. Returns an R x F matrix.
Matrix lhs_centers(const std::vector<FeatureRange>& ranges, std::size_t n_rules, std::uint64_t seed,
                   bool permute = true);

/// (max - min) / ceil(R^(1/F)).
double partition_width(const FeatureRange& range, std::size_t n_rules, std::size_t n_features);

RuleBase build_rulebase(const InitConfig& cfg, const std::vector<FeatureRange>& ranges);

/// Per-column (min, max) over the given rows of X.
std::vector<FeatureRange> feature_ranges(const Matrix& X, const std::vector<std::size_t>& rows);

}  // namespace it2anfis
