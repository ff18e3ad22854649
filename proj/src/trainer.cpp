#include "it2anfis/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace it2anfis {

namespace {

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

inline double clip(double v, double bound) { return std::clamp(v, -bound, bound); }

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool consequents_finite(const RuleBase& rb) {
    for (const auto& rule : rb.rules) {
        if (!all_finite(rule.consequent.w) || !std::isfinite(rule.consequent.b)) return false;
    }
    return true;
}

bool antecedents_finite(const RuleBase& rb) {
    for (const auto& rule : rb.rules) {
        for (const auto& a : rule.antecedents) {
            if (!std::isfinite(a.c1) || !std::isfinite(a.c2)) return false;
        }
    }
    return true;
}

template <typename RowFn>
ConsequentGradients consequent_gradients_impl(const RuleBase& rb, const Matrix& X, std::span<const double> y,
                                              std::size_t count, RowFn row_of) {
    const std::size_t R = rb.n_rules();
    const std::size_t F = rb.n_features();
    ConsequentGradients g{Matrix(R, F), std::vector<double>(R, 0.0)};
    if (count == 0) return g;
    const bool zero_order = rb.mode == Mode::Type1Order0;
    const double inv_n = 1.0 / static_cast<double>(count);

    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t n = row_of(k);
        const auto x = X.row(n);
        const auto fs = fire(rb, x);
        double y_lower = 0.0, y_upper = 0.0;
        for (std::size_t j = 0; j < R; ++j) {
            const double yj = rb.rules[j].consequent.evaluate(x);
            y_lower += fs.lower[j] * yj;
            y_upper += fs.upper[j] * yj;
        }
        const double e = rb.q * y_lower + (1.0 - rb.q) * y_upper - y[n];
        const auto phi = combined_firing(fs, rb.q);
        for (std::size_t j = 0; j < R; ++j) {
            const double s = e * phi[j] * inv_n;
            g.d_b[j] += s;
            if (!zero_order) {
                for (std::size_t f = 0; f < F; ++f) g.d_w(j, f) += s * x[f];
            }
        }
    }
    return g;
}

}  // namespace

void TrainConfig::validate() const {
    if (max_epochs < 1) throw TrainingError("train: max_epochs must be >= 1");
    if (batch_size < 1) throw TrainingError("train: batch_size must be >= 1");
    if (!(eta_cons > 0.0 && eta_ant > 0.0)) throw TrainingError("train: learning rates must be positive");
    if (!(eta_cons_bounds.min > 0.0 && eta_cons_bounds.min <= eta_cons_bounds.max) ||
        !(eta_ant_bounds.min > 0.0 && eta_ant_bounds.min <= eta_ant_bounds.max)) {
        throw TrainingError("train: learning-rate bounds must be positive and ordered");
    }
    if (!(lambda_l1 >= 0.0 && lambda_l2 >= 0.0)) throw TrainingError("train: regularization must be >= 0");
    if (!(grad_clip > 0.0)) throw TrainingError("train: grad_clip must be positive");
    if (patience < 1) throw TrainingError("train: patience must be >= 1");
}

std::vector<double> combined_firing(const FiringStrengths& fs, double q) {
    const double sum_lower = std::accumulate(fs.lower.begin(), fs.lower.end(), 0.0);
    const double sum_upper = std::accumulate(fs.upper.begin(), fs.upper.end(), 0.0);
    std::vector<double> phi(fs.lower.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
        phi[j] = q * fs.lower[j] / sum_lower + (1.0 - q) * fs.upper[j] / sum_upper;
    }
    return phi;
}

ConsequentGradients consequent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y,
                                         std::span<const std::size_t> rows) {
    return consequent_gradients_impl(rb, X, y, rows.size(), [&](std::size_t k) { return rows[k]; });
}

ConsequentGradients consequent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y) {
    return consequent_gradients_impl(rb, X, y, X.rows(), [](std::size_t k) { return k; });
}

AntecedentGradients antecedent_gradients(const RuleBase& rb, const Matrix& X, std::span<const double> y) {
    const std::size_t R = rb.n_rules();
    const std::size_t F = rb.n_features();
    const std::size_t N = X.rows();
    AntecedentGradients g{Matrix(R, F), Matrix(R, F)};
    if (N == 0) return g;

    // Per-sample scratch: d log(membership) / d centre for each branch.
    Matrix dlow_c1(R, F), dlow_c2(R, F), dup_c1(R, F), dup_c2(R, F);
    std::vector<double> mu_lower(R), mu_upper(R), yj(R);
    const double q = rb.q;

    for (std::size_t n = 0; n < N; ++n) {
        const auto x = X.row(n);
        for (std::size_t j = 0; j < R; ++j) {
            const auto& ants = rb.rules[j].antecedents;
            double ml = 1.0, mu = 1.0;
            for (std::size_t f = 0; f < F; ++f) {
                const auto& a = ants[f];
                const double inv_var = 1.0 / (a.sigma * a.sigma);
                const auto m = membership_bounds(a, x[f]);
                ml *= m.lower;
                mu *= m.upper;
                const bool lower_uses_c2 = x[f] <= a.mid();
                dlow_c2(j, f) = lower_uses_c2 ? (x[f] - a.c2) * inv_var : 0.0;
                dlow_c1(j, f) = lower_uses_c2 ? 0.0 : (x[f] - a.c1) * inv_var;
                dup_c1(j, f) = x[f] < a.c1 ? (x[f] - a.c1) * inv_var : 0.0;
                dup_c2(j, f) = x[f] > a.c2 ? (x[f] - a.c2) * inv_var : 0.0;
            }
            mu_lower[j] = ml;
            mu_upper[j] = mu;
            yj[j] = rb.rules[j].consequent.evaluate(x);
        }
        const double sum_lower = std::accumulate(mu_lower.begin(), mu_lower.end(), 0.0);
        const double sum_upper = std::accumulate(mu_upper.begin(), mu_upper.end(), 0.0);
        const bool lower_live = sum_lower >= kStrengthFloor;
        const bool upper_live = sum_upper >= kStrengthFloor;
        const double uniform = 1.0 / static_cast<double>(R);

        double y_lower = 0.0, y_upper = 0.0;
        for (std::size_t j = 0; j < R; ++j) {
            y_lower += (lower_live ? mu_lower[j] / sum_lower : uniform) * yj[j];
            y_upper += (upper_live ? mu_upper[j] / sum_upper : uniform) * yj[j];
        }
        const double e = q * y_lower + (1.0 - q) * y_upper - y[n];
        const double scale = 2.0 * e / static_cast<double>(N);

        // d y_lower / d mu_lower_j = (y_j - y_lower) / sum_lower, and
        // d mu_lower_j / d c = mu_lower_j * dlog(m)/dc. The uniform fallback is flat.
        for (std::size_t j = 0; j < R; ++j) {
            const double a_low = lower_live ? q * (mu_lower[j] / sum_lower) * (yj[j] - y_lower) : 0.0;
            const double a_up = upper_live ? (1.0 - q) * (mu_upper[j] / sum_upper) * (yj[j] - y_upper) : 0.0;
            if (a_low == 0.0 && a_up == 0.0) continue;
            for (std::size_t f = 0; f < F; ++f) {
                g.d_c1(j, f) += scale * (a_low * dlow_c1(j, f) + a_up * dup_c1(j, f));
                g.d_c2(j, f) += scale * (a_low * dlow_c2(j, f) + a_up * dup_c2(j, f));
            }
        }
    }
    return g;
}

double q_gradient(const RuleBase& rb, const Matrix& X, std::span<const double> y) {
    if (X.rows() == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t n = 0; n < X.rows(); ++n) {
        const auto p = predict_one(rb, X.row(n));
        acc += 2.0 * (p.y_pred - y[n]) * (p.y_lower - p.y_upper);
    }
    return acc / static_cast<double>(X.rows());
}

void apply_consequent_update(RuleBase& rb, const ConsequentGradients& grads, double eta_cons, double lambda_l1,
                             double lambda_l2) {
    const bool zero_order = rb.mode == Mode::Type1Order0;
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        auto& c = rb.rules[j].consequent;
        if (!zero_order) {
            for (std::size_t f = 0; f < c.w.size(); ++f) {
                c.w[f] -= eta_cons * (grads.d_w(j, f) + lambda_l2 * c.w[f] + lambda_l1 * sign(c.w[f]));
            }
        }
        c.b -= eta_cons * (grads.d_b[j] + lambda_l2 * c.b + lambda_l1 * sign(c.b));
    }
}

void apply_antecedent_update(RuleBase& rb, const AntecedentGradients& grads, double eta_ant, double clip_bound,
                             double min_separation) {
    const bool collapsed = is_type1(rb.mode);
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        auto& ants = rb.rules[j].antecedents;
        for (std::size_t f = 0; f < ants.size(); ++f) {
            if (collapsed) {
                const double step = eta_ant * clip(grads.d_c1(j, f) + grads.d_c2(j, f), clip_bound);
                ants[f].c1 -= step;
                ants[f].c2 = ants[f].c1;
            } else {
                ants[f].c1 -= eta_ant * clip(grads.d_c1(j, f), clip_bound);
                ants[f].c2 -= eta_ant * clip(grads.d_c2(j, f), clip_bound);
            }
        }
    }
    enforce_constraints(rb, min_separation);
}

void enforce_constraints(RuleBase& rb, double min_separation) {
    if (is_type1(rb.mode)) return;
    for (auto& rule : rb.rules) {
        for (auto& a : rule.antecedents) {
            if (a.c1 > a.c2) std::swap(a.c1, a.c2);
            if (a.c2 - a.c1 < min_separation) {
                const double mid = a.mid();
                a.c1 = mid - 0.5 * min_separation;
                a.c2 = mid + 0.5 * min_separation;
                // Rounding of mid +- half can leave the width a few ulps short.
                while (a.c2 - a.c1 < min_separation) a.c2 = std::nextafter(a.c2, INFINITY);
            }
        }
    }
}

void adapt_learning_rates(TrainState& state, const TrainConfig& cfg, double mse_prev, double mse_now) {
    if (mse_prev - mse_now > 0.0) {
        state.eta_cons *= cfg.lr_up;
        state.eta_ant *= cfg.lr_up;
    } else {
        state.eta_cons *= cfg.lr_down_cons;
        state.eta_ant *= cfg.lr_down_ant;
    }
    state.eta_cons = cfg.eta_cons_bounds.clamp(state.eta_cons);
    state.eta_ant = cfg.eta_ant_bounds.clamp(state.eta_ant);
}

TrainResult train(RuleBase rb, const Dataset& data, const TrainConfig& cfg, const EpochObserver& observer) {
    cfg.validate();
    validate(rb);
    if (rb.n_features() != data.n_features()) {
        throw TrainingError("model has " + std::to_string(rb.n_features()) + " features, data has " +
                            std::to_string(data.n_features()));
    }
    if (data.split.train.empty()) throw TrainingError("training split is empty");

    const Matrix X_train = data.rows_X(data.split.train);
    const std::vector<double> y_train = data.rows_y(data.split.train);
    const Matrix X_val = data.rows_X(data.split.val);
    const std::vector<double> y_val = data.rows_y(data.split.val);
    const bool has_val = !data.split.val.empty();

    TrainState state;
    state.eta_cons = cfg.eta_cons_bounds.clamp(cfg.eta_cons);
    state.eta_ant = cfg.eta_ant_bounds.clamp(cfg.eta_ant);
    state.best_snapshot = rb;

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(X_train.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});

    double mse_prev = mse(rb, X_train, y_train);
    if (!std::isfinite(mse_prev)) throw TrainingError("initial training loss is not finite");

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        state.epoch = epoch;
        const std::string at = "epoch " + std::to_string(epoch) + ": ";

        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            const auto grads = consequent_gradients(rb, X_train, y_train, std::span(order).subspan(start, len));
            apply_consequent_update(rb, grads, state.eta_cons, cfg.lambda_l1, cfg.lambda_l2);
        }
        if (!consequents_finite(rb)) throw TrainingError(at + "non-finite consequent parameters (w, b)");
        const RuleBase after_consequents = rb;

        if (cfg.train_antecedents) {
            const auto grads = antecedent_gradients(rb, X_train, y_train);
            if (!all_finite(grads.d_c1.data()) || !all_finite(grads.d_c2.data())) {
                throw TrainingError(at + "non-finite gradient in antecedent parameters (c1, c2)");
            }
            apply_antecedent_update(rb, grads, state.eta_ant, cfg.grad_clip, cfg.min_separation);
            if (!antecedents_finite(rb)) throw TrainingError(at + "non-finite antecedent parameters (c1, c2)");
        }
        if (cfg.learn_q) {
            const double dq = q_gradient(rb, X_train, y_train);
            if (std::isfinite(dq)) rb.q = std::clamp(rb.q - state.eta_ant * clip(dq, cfg.grad_clip), 0.0, 1.0);
        }

        const double train_mse = mse(rb, X_train, y_train);
        const double val_mse = has_val ? mse(rb, X_val, y_val) : train_mse;
        if (!std::isfinite(train_mse) || !std::isfinite(val_mse)) {
            const bool consequent_fault = !std::isfinite(mse(after_consequents, X_train, y_train));
            throw TrainingError(at + "non-finite loss after updating " +
                                (consequent_fault ? "consequent parameters (w, b)" : "antecedent parameters (c1, c2, q)"));
        }

        adapt_learning_rates(state, cfg, mse_prev, train_mse);
        mse_prev = train_mse;

        EpochRecord rec{epoch, train_mse, val_mse, state.eta_cons, state.eta_ant, false};
        if (val_mse < state.best_val_mse) {
            state.best_val_mse = val_mse;
            state.best_epoch = epoch;
            state.best_snapshot = rb;
            state.epochs_since_improvement = 0;
            rec.checkpointed = true;
        } else {
            ++state.epochs_since_improvement;
        }
        state.history.push_back(rec);
        if (observer) observer(rec, rb);
        if (state.epochs_since_improvement >= cfg.patience) break;
    }

    return TrainResult{state.best_snapshot, std::move(rb), std::move(state)};
}

}  // namespace it2anfis
