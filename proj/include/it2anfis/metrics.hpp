#pragma once

#include <optional>
#include <span>

namespace it2anfis {

struct MetricSet {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    /// Percent. Empty when some true value is zero.
    std::optional<double> mape;
};

/// Regression metrics in the units of the inputs (MWh for reported results).
/// Throws std::invalid_argument on empty or mismatched inputs.
MetricSet evaluate(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace it2anfis
