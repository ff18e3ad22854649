#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "it2anfis/dataset.hpp"
#include "it2anfis/rule_base.hpp"

namespace it2anfis {

struct FeatureUncertainty {
    std::size_t rule_index = 0;
    std::size_t feature_index = 0;
    double fou_area = 0.0;
    double interval_width = 0.0;  // c2 - c1
};

struct RuleUncertainty {
    std::size_t rule_index = 0;
    double mean_fou_area = 0.0;
    double max_fou_area = 0.0;
    double consequent_l1_norm = 0.0;  // sum |w| + |b|
};

struct InstanceUncertainty {
    std::size_t index = 0;
    IntervalPrediction prediction;  // original target units
};

struct UncertaintyReport {
    std::vector<FeatureUncertainty> per_feature;  // R * F entries, rule-major
    std::vector<RuleUncertainty> per_rule;
    std::optional<std::vector<InstanceUncertainty>> per_instance;

    /// Rule indices ordered by mean FOU area, widest first (ties by index).
    std::vector<std::size_t> rules_by_uncertainty() const;
};

struct RuleAttribution {
    std::size_t rule_index = 0;
    double upper = 0.0;  // normalized upper strength
    double lower = 0.0;  // normalized lower strength
};

struct InstanceExplanation {
    IntervalPrediction prediction;  // original target units
    std::vector<RuleAttribution> top_rules;
};

inline constexpr std::size_t kDefaultFouPoints = 256;

/// [c1 - 3 sigma, c2 + 3 sigma].
std::pair<double, double> default_fou_window(const Antecedent& ant);

/// Trapezoidal area between the upper and lower membership functions.
double fou_area(const Antecedent& ant, std::pair<double, double> window, std::size_t n_points = kDefaultFouPoints);
double fou_area(const Antecedent& ant);

UncertaintyReport explain_model(const RuleBase& rb);

/// Maps every field of a standardized prediction through the target scaler.
IntervalPrediction to_original_units(const IntervalPrediction& p, const StandardScaler& scaler);

/// Prediction in original units plus rules ranked by mean normalized strength.
InstanceExplanation explain_instance(const RuleBase& rb, std::span<const double> x, const StandardScaler& scaler);

/// Instance-level intervals for every row of a normalized feature matrix.
std::vector<InstanceUncertainty> explain_instances(const RuleBase& rb, const Matrix& X, const StandardScaler& scaler);

/// One IF-THEN block per rule in normalized units, with original units
/// alongside when scaling is supplied.
std::string export_rules_text(const RuleBase& rb, const std::vector<std::string>& feature_names,
                              const std::optional<Scaling>& scaling = std::nullopt);

nlohmann::json to_json(const UncertaintyReport& report);

/// Standalone SVG with one panel per feature showing the upper and lower
/// membership curves of rule j with the FOU shaded.
std::string rule_svg(const RuleBase& rb, std::size_t rule_index, const std::vector<std::string>& feature_names);

/// Writes rule_<j>.svg for every rule into dir; returns the written paths.
std::vector<std::filesystem::path> write_rule_svgs(const RuleBase& rb, const std::vector<std::string>& feature_names,
                                                   const std::filesystem::path& dir);

}  // namespace it2anfis
