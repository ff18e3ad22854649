#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "it2anfis/dataset.hpp"
#include "it2anfis/matrix.hpp"
#include "it2anfis/rule_base.hpp"

namespace it2anfis {

struct RateBounds {
    double min;
    double max;
    double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
};

struct TrainConfig {
    std::size_t max_epochs = 500;
    std::size_t batch_size = 64;
    double eta_cons = 0.01;
    double eta_ant = 0.001;
    RateBounds eta_cons_bounds{1e-5, 0.05};
    RateBounds eta_ant_bounds{1e-6, 0.02};
    double lr_up = 1.05;
    double lr_down_cons = 0.9;
    double lr_down_ant = 0.95;
    double lambda_l1 = 0.05;
    double lambda_l2 = 0.001;
    double grad_clip = 0.1;
    double min_separation = kMinSeparation;
    std::size_t patience = 50;
    std::uint64_t seed = 0;
    bool train_antecedents = true;
    /// Experimental: gradient step on q after each antecedent update.
    bool learn_q = false;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;
    double eta_cons = 0.0;
    double eta_ant = 0.0;
    bool checkpointed = false;
};

struct TrainState {
    std::size_t epoch = 0;
    double eta_cons = 0.0;
    double eta_ant = 0.0;
    double best_val_mse = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    RuleBase best_snapshot;
    std::size_t epochs_since_improvement = 0;
    std::vector<EpochRecord> history;
};

struct ConsequentGradients {
    Matrix d_w;  // R x F
    std::vector<double> d_b;
};

struct AntecedentGradients {
    Matrix d_c1;  // R x F
    Matrix d_c2;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Combined normalized firing factor per rule:
/// q * fL_j / sum(fL) + (1 - q) * fU_j / sum(fU).
std::vector<double> combined_firing(const FiringStrengths& fs, double q);

/// Gradients of half the mean squared error over the selected rows:
/// d_w[j] = mean(e * phi_j * x), d_b[j] = mean(e * phi_j) with e = y_pred - y.
/// Weights are reported as zero in the zero-order mode.
ConsequentGradients consequent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y,
                                         std::span<const std::size_t> rows);
ConsequentGradients consequent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y);

/// Exact gradients of the mean squared error with respect to every c1 and c2,
/// obtained by differentiating the full inference chain. At branch seams the
/// derivative of the branch that evaluation selects is used.
AntecedentGradients antecedent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y);

/// d MSE / d q = mean(2 e (y_lower - y_upper)).
double q_gradient(const RuleBase& rb, const Matrix& X, std::span<const double> y);

/// w <- w - eta (grad + l2 w + l1 sign(w)), same for b, with sign(0) = 0.
void apply_consequent_update(RuleBase& rb, const ConsequentGradients& grads, double eta_cons, double lambda_l1,
                             double lambda_l2);

/// c <- c - eta clip(grad, -clip, clip) for both bounds, then enforce_constraints.
/// Type-1 modes move the collapsed centre rigidly by the summed bound gradient.
void apply_antecedent_update(RuleBase& rb, const AntecedentGradients& grads, double eta_ant, double clip,
                             double min_separation = kMinSeparation);

/// Swaps crossed bounds and widens narrow intervals symmetrically about their
/// midpoint to min_separation. No-op for type-1 modes.
void enforce_constraints(RuleBase& rb, double min_separation = kMinSeparation);

/// Epoch-level learning-rate schedule keyed on the change of training MSE.
void adapt_learning_rates(TrainState& state, const TrainConfig& cfg, double mse_prev, double mse_now);

struct TrainResult {
    RuleBase model;  // best-validation checkpoint
    RuleBase final_model;
    TrainState state;
};

using EpochObserver = std::function<void(const EpochRecord&, const RuleBase&)>;

/// Trains consequents by mini-batch descent and antecedents by full-batch
/// clipped descent, with early stopping on validation MSE. Deterministic in
/// cfg.seed. The observer sees the model at the end of every epoch.
TrainResult train(RuleBase rb, const Dataset& data, const TrainConfig& cfg, const EpochObserver& observer = {});

}  // namespace it2anfis
