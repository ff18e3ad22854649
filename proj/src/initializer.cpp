#include "it2anfis/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace it2anfis {

void InitConfig::validate() const {
    if (n_rules < 1) throw ModelError("init: n_rules must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("init: alpha must lie in (0, 1]");
    if (!(q >= 0.0 && q <= 1.0)) throw ModelError("init: q must lie in [0, 1]");
    if (!(sigma_min > 0.0)) throw ModelError("init: sigma_min must be positive");
    if (!(consequent_std >= 0.0)) throw ModelError("init: consequent_std must be >= 0");
}

Matrix lhs_centers(const std::vector<FeatureRange>& ranges, std::size_t n_rules, std::uint64_t seed,
                   bool permute) {
    if (n_rules < 1) throw ModelError("lhs: n_rules must be >= 1");
    for (std::size_t f = 0; f < ranges.size(); ++f) {
        if (!(ranges[f].first < ranges[f].second)) {
            throw ModelError("lhs: degenerate range for feature " + std::to_string(f));
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double R = static_cast<double>(n_rules);

    Matrix centers(n_rules, ranges.size());
    std::vector<std::size_t> strata(n_rules);
    for (std::size_t f = 0; f < ranges.size(); ++f) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        if (permute) std::shuffle(strata.begin(), strata.end(), rng);
        const auto [lo, hi] = ranges[f];
        const double w = (hi - lo) / R;
        for (std::size_t j = 0; j < n_rules; ++j) {
            const double start = lo + static_cast<double>(strata[j]) * w;
            double c = start + unit(rng) * w;
            // Guard the half-open stratum against rounding up to its right edge.
            if (c >= start + w) c = std::nextafter(start + w, start);
            centers(j, f) = c;
        }
    }
    return centers;
}

double partition_width(const FeatureRange& range, std::size_t n_rules, std::size_t n_features) {
    const double root = std::pow(static_cast<double>(n_rules), 1.0 / static_cast<double>(n_features));
    // pow may land a hair above an exact integer root (e.g. 1024^(1/10)).
    double parts = std::ceil(root);
    if (parts - root > 1.0 - 1e-9) parts -= 1.0;
    return (range.second - range.first) / parts;
}

RuleBase build_rulebase(const InitConfig& cfg, const std::vector<FeatureRange>& ranges) {
    cfg.validate();
    if (ranges.empty()) throw ModelError("init: no features");
    const std::size_t R = cfg.n_rules;
    const std::size_t F = ranges.size();

    const Matrix centers = lhs_centers(ranges, R, cfg.seed, cfg.lhs_permute);

    // Consequents draw from a stream separate from the centres so that toggling
    // lhs_permute leaves them unchanged.
    std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> normal(0.0, cfg.consequent_std);

    RuleBase rb;
    rb.mode = cfg.mode;
    rb.q = cfg.q;
    rb.rules.resize(R);
    for (std::size_t j = 0; j < R; ++j) {
        auto& rule = rb.rules[j];
        rule.antecedents.resize(F);
        for (std::size_t f = 0; f < F; ++f) {
            const double wf = partition_width(ranges[f], R, F);
            const double c = centers(j, f);
            const double half = is_type1(cfg.mode) ? 0.0 : 0.5 * cfg.alpha * wf;
            rule.antecedents[f] = {c - half, c + half, std::max(0.5 * wf, cfg.sigma_min)};
        }
        rule.consequent.w.resize(F);
        for (auto& w : rule.consequent.w) w = cfg.consequent_std > 0.0 ? normal(rng) : 0.0;
        rule.consequent.b = cfg.consequent_std > 0.0 ? normal(rng) : 0.0;
        if (cfg.mode == Mode::Type1Order0) std::fill(rule.consequent.w.begin(), rule.consequent.w.end(), 0.0);
    }
    return rb;
}

std::vector<FeatureRange> feature_ranges(const Matrix& X, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw ModelError("feature_ranges: no rows");
    std::vector<FeatureRange> out(X.cols());
    for (std::size_t f = 0; f < X.cols(); ++f) {
        out[f] = {X(rows.front(), f), X(rows.front(), f)};
        for (auto i : rows) {
            out[f].first = std::min(out[f].first, X(i, f));
            out[f].second = std::max(out[f].second, X(i, f));
        }
    }
    return out;
}

}  // namespace it2anfis
