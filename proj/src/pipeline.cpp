#include "it2anfis/pipeline.hpp"

namespace it2anfis {

RuleBase initial_rulebase(const Dataset& data, InitConfig init) {
    return build_rulebase(init, feature_ranges(data.X, data.split.train));
}

MetricSet evaluate_model(const RuleBase& rb, const Matrix& X, std::span<const double> y_std,
                         const StandardScaler& target) {
    std::vector<double> truth, pred;
    truth.reserve(X.rows());
    pred.reserve(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        truth.push_back(target.inverse(y_std[i]));
        pred.push_back(target.inverse(predict_one(rb, X.row(i)).y_pred));
    }
    return evaluate(truth, pred);
}

RunOutcome run_experiment(const RawTable& raw, const RunSpec& spec, InitConfig init, TrainConfig train_cfg,
                          const EpochObserver& observer) {
    RunOutcome out;
    out.data = normalize_and_split(raw, spec.seed);
    init.mode = spec.mode;
    init.n_rules = spec.n_rules;
    init.seed = spec.seed;
    train_cfg.seed = spec.seed;

    auto result = train(initial_rulebase(out.data, init), out.data, train_cfg, observer);
    out.state = std::move(result.state);

    const auto& d = out.data;
    const auto& rb = result.model;
    const auto& ts = d.target_scaler;
    const auto X_train = d.rows_X(d.split.train);
    const auto y_train = d.rows_y(d.split.train);
    out.train = evaluate_model(rb, X_train, y_train, ts);
    out.val = evaluate_model(rb, d.rows_X(d.split.val), d.rows_y(d.split.val), ts);
    out.test = evaluate_model(rb, d.rows_X(d.split.test), d.rows_y(d.split.test), ts);
    out.train_mse_std = mse(rb, X_train, y_train);

    out.model = Model{rb, d.scaling(), d.feature_names, d.target_name, spec.seed};
    return out;
}

}  // namespace it2anfis
