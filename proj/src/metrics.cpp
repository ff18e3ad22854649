#include "it2anfis/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace it2anfis {

MetricSet evaluate(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("evaluate: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("evaluate: no samples");

    double se = 0.0, ae = 0.0, ape = 0.0;
    bool mape_defined = true;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_pred[i] - y_true[i];
        se += e * e;
        ae += std::abs(e);
        if (y_true[i] == 0.0) {
            mape_defined = false;
        } else {
            ape += std::abs(e) / std::abs(y_true[i]);
        }
    }
    const double n = static_cast<double>(y_true.size());
    MetricSet m;
    m.mse = se / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = ae / n;
    if (mape_defined) m.mape = 100.0 * ape / n;
    return m;
}

}  // namespace it2anfis
