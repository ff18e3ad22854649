#pragma once

#include <cstdint>
#include <span>

#include "it2anfis/dataset.hpp"
#include "it2anfis/initializer.hpp"
#include "it2anfis/metrics.hpp"
#include "it2anfis/model_io.hpp"
#include "it2anfis/trainer.hpp"

namespace it2anfis {

/// Builds the initial rule base for mode from the training-split feature ranges.
RuleBase initial_rulebase(const Dataset& data, InitConfig init);

/// Metrics of the model on normalized rows, reported in original target units.
MetricSet evaluate_model(const RuleBase& rb, const Matrix& X, std::span<const double> y_std,
                         const StandardScaler& target);

struct RunSpec {
    Mode mode = Mode::IT2;
    std::size_t n_rules = 7;
    std::uint64_t seed = 0;
};

struct RunOutcome {
    Model model;
    Dataset data;
    TrainState state;
    MetricSet train;
    MetricSet val;
    MetricSet test;
    double train_mse_std = 0.0;  // standardized units
};

/// One complete run: split and normalize with spec.seed, initialize, train,
/// evaluate on all three splits. The same seed drives split, init and training.
RunOutcome run_experiment(const RawTable& raw, const RunSpec& spec, InitConfig init, TrainConfig train_cfg,
                          const EpochObserver& observer = {});

}  // namespace it2anfis
