#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "it2anfis/dataset.hpp"
#include "it2anfis/explainer.hpp"
#include "it2anfis/metrics.hpp"
#include "it2anfis/model_io.hpp"
#include "it2anfis/pipeline.hpp"
#include "it2anfis/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace it2anfis;

namespace {

struct DataOptions {
    std::string path;
    bool synthetic = false;
    std::string target = "energy_mwh";
    std::string date_col;
    std::vector<std::string> ignore_cols;
    SyntheticSpec spec;
};

struct ModelOptions {
    std::size_t rules = 7;
    std::uint64_t seed = 0;
    std::string mode = "it2";
    bool order1 = false;
    double alpha = 0.2;
    double q = 0.5;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
    cmd->add_option("--data", o.path, "CSV data file");
    cmd->add_flag("--synthetic", o.synthetic, "Use generated data instead of --data");
    cmd->add_option("--target", o.target, "Target column")->capture_default_str();
    cmd->add_option("--date-col", o.date_col, "Date column to skip");
    cmd->add_option("--ignore-cols", o.ignore_cols, "Further non-feature columns")->delimiter(',');
    cmd->add_option("--n-samples", o.spec.n_samples)->capture_default_str();
    cmd->add_option("--n-features", o.spec.n_features)->capture_default_str();
    cmd->add_option("--latent-rules", o.spec.n_latent_rules)->capture_default_str();
    cmd->add_option("--noise-std", o.spec.noise_std)->capture_default_str();
    cmd->add_option("--synth-seed", o.spec.seed)->capture_default_str();
}

void add_model_options(CLI::App* cmd, ModelOptions& o, bool with_rules = true) {
    if (with_rules) cmd->add_option("--rules", o.rules, "Number of fuzzy rules")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed for split, initialization and training")->capture_default_str();
    cmd->add_option("--mode", o.mode, "it2 | anfis0 | anfis1")->capture_default_str();
    cmd->add_flag("--order1", o.order1, "Shorthand for --mode anfis1");
    cmd->add_option("--alpha", o.alpha, "Uncertain-mean width factor")->capture_default_str();
    cmd->add_option("--q", o.q, "Type-reduction weight")->capture_default_str();
}

void add_train_options(CLI::App* cmd, TrainConfig& t) {
    cmd->add_option("--max-epochs", t.max_epochs)->capture_default_str();
    cmd->add_option("--batch-size", t.batch_size)->capture_default_str();
    cmd->add_option("--patience", t.patience)->capture_default_str();
    cmd->add_option("--lambda-l1", t.lambda_l1)->capture_default_str();
    cmd->add_option("--lambda-l2", t.lambda_l2)->capture_default_str();
}

RawTable load_data(const DataOptions& o) {
    if (o.synthetic) return generate_synthetic(o.spec);
    if (o.path.empty()) throw std::runtime_error("no data source: pass --data PATH or --synthetic");
    std::optional<std::string> date;
    if (!o.date_col.empty()) date = o.date_col;
    auto raw = load_csv(o.path, o.target, date, o.ignore_cols);
    if (raw.dropped_count > 0) {
        std::cerr << "note: dropped " << raw.dropped_count << " rows with missing or non-numeric values\n";
    }
    return raw;
}

Mode resolve_mode(const ModelOptions& o) { return o.order1 ? Mode::Type1Order1 : parse_mode(o.mode); }

InitConfig init_config(const ModelOptions& o) {
    InitConfig init;
    init.n_rules = o.rules;
    init.alpha = o.alpha;
    init.q = o.q;
    init.seed = o.seed;
    init.mode = resolve_mode(o);
    return init;
}

json metrics_json(const MetricSet& m) {
    return {{"mse", m.mse}, {"rmse", m.rmse}, {"mae", m.mae}, {"mape", m.mape ? json(*m.mape) : json(nullptr)}};
}

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void print_metrics(const std::string& label, const MetricSet& m) {
    std::cout << label << ": MSE " << fmt(m.mse, "%.2f") << "  RMSE " << fmt(m.rmse, "%.2f") << "  MAE "
              << fmt(m.mae, "%.2f") << "  MAPE " << (m.mape ? fmt(*m.mape, "%.2f") + "%" : std::string("n/a"))
              << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_synth(const DataOptions& d, const std::string& out) {
    const auto raw = generate_synthetic(d.spec);
    write_csv(raw, out);
    std::cout << "wrote " << raw.rows.size() << " rows x " << raw.feature_indices().size() << " features to " << out
              << "\n";
    return 0;
}

int cmd_train(const DataOptions& d, const ModelOptions& m, const TrainConfig& t, const fs::path& out, bool svg) {
    const auto raw = load_data(d);
    fs::create_directories(out);
    std::ofstream log(out / "epochs.jsonl");
    if (!log) throw std::runtime_error("cannot write '" + (out / "epochs.jsonl").string() + "'");
    const auto init = init_config(m);
    const auto result = run_experiment(raw, {init.mode, init.n_rules, m.seed}, init, t,
                                       [&](const EpochRecord& r, const RuleBase&) {
                                           log << json{{"epoch", r.epoch},
                                                       {"train_mse", r.train_mse},
                                                       {"val_mse", r.val_mse},
                                                       {"eta_cons", r.eta_cons},
                                                       {"eta_ant", r.eta_ant},
                                                       {"checkpointed", r.checkpointed}}
                                                      .dump()
                                               << "\n";
                                       });

    save_model(result.model, out / "model.json");
    write_text(out / "rules.txt",
               export_rules_text(result.model.rules, result.model.feature_names, result.model.scaling));
    const auto& split = result.data.split;
    write_json(out / "metrics.json", {{"mode", std::string(short_name(init.mode))},
                                      {"rules", init.n_rules},
                                      {"seed", m.seed},
                                      {"epochs", result.state.history.size()},
                                      {"best_epoch", result.state.best_epoch},
                                      {"train", metrics_json(result.train)},
                                      {"val", metrics_json(result.val)},
                                      {"test", metrics_json(result.test)},
                                      {"train_mse_std", result.train_mse_std},
                                      {"split", {{"train", split.train}, {"val", split.val}, {"test", split.test}}}});
    if (svg) write_rule_svgs(result.model.rules, result.model.feature_names, out / "svg");

    std::cout << to_string(init.mode) << " R=" << init.n_rules << " F=" << result.model.rules.n_features()
              << " seed=" << m.seed << ": " << result.state.history.size() << " epochs, best epoch "
              << result.state.best_epoch << "\n";
    print_metrics("train", result.train);
    print_metrics("val  ", result.val);
    print_metrics("test ", result.test);
    std::cout << "train MSE (standardized): " << real17(result.train_mse_std) << "\n";
    std::cout << "model written to " << (out / "model.json").string() << "\n";
    return 0;
}

int cmd_predict(const fs::path& model_path, const fs::path& input, const fs::path& out) {
    const auto model = load_model(model_path);
    const auto X = apply_feature_scalers(load_feature_csv(input, model.feature_names), model.scaling.features);
    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot write '" + out.string() + "'");
    csv << "index,y_pred_mwh,interval_lo_mwh,interval_hi_mwh,width_mwh\n";
    const auto& t = model.scaling.target;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto p = to_original_units(predict_one(model.rules, X.row(i)), t);
        csv << i << ',' << real17(p.y_pred) << ',' << real17(p.lo) << ',' << real17(p.hi) << ',' << real17(p.width)
            << '\n';
    }
    std::cout << "wrote " << X.rows() << " predictions to " << out.string() << "\n";
    return 0;
}

int cmd_evaluate(const fs::path& model_path, const DataOptions& d, bool target_given, const std::string& out) {
    const auto model = load_model(model_path);
    auto opts = d;
    if (!target_given) opts.target = model.target_name;
    const auto raw = load_data(opts);
    const auto X = apply_feature_scalers(extract_columns(raw, model.feature_names), model.scaling.features);
    const auto t = raw.target_index();
    std::vector<double> truth, pred;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        truth.push_back(raw.rows[i][t]);
        pred.push_back(model.scaling.target.inverse(predict_one(model.rules, X.row(i)).y_pred));
    }
    const auto m = evaluate(truth, pred);
    print_metrics("all rows (" + std::to_string(X.rows()) + ")", m);
    if (!out.empty()) write_json(out, {{"rows", X.rows()}, {"metrics", metrics_json(m)}});
    return 0;
}

int cmd_explain(const fs::path& model_path, const std::string& input, const fs::path& out, bool svg) {
    const auto model = load_model(model_path);
    auto report = explain_model(model.rules);
    if (!input.empty()) {
        const auto X = apply_feature_scalers(load_feature_csv(input, model.feature_names), model.scaling.features);
        report.per_instance = explain_instances(model.rules, X, model.scaling.target);
    }
    fs::create_directories(out);
    write_json(out / "report.json", to_json(report));
    write_text(out / "rules.txt", export_rules_text(model.rules, model.feature_names, model.scaling));
    std::size_t n_svg = 0;
    if (svg) n_svg = write_rule_svgs(model.rules, model.feature_names, out / "svg").size();

    std::cout << "rules by mean FOU area (widest first):\n";
    for (auto j : report.rules_by_uncertainty()) {
        const auto& r = report.per_rule[j];
        std::cout << "  rule " << j + 1 << ": mean " << fmt(r.mean_fou_area, "%.5f") << ", max "
                  << fmt(r.max_fou_area, "%.5f") << "\n";
    }
    std::cout << "report written to " << (out / "report.json").string();
    if (n_svg) std::cout << ", " << n_svg << " SVG files in " << (out / "svg").string();
    std::cout << "\n";
    return 0;
}

std::vector<std::size_t> parse_rule_counts(const std::vector<std::string>& specs) {
    std::vector<std::size_t> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
            out.push_back(std::stoul(s));
            continue;
        }
        const auto lo = std::stoul(s.substr(0, colon)), hi = std::stoul(s.substr(colon + 1));
        if (lo > hi) throw std::invalid_argument("rule range '" + s + "' is empty");
        for (auto r = lo; r <= hi; ++r) out.push_back(r);
    }
    return out;
}

int cmd_sweep(const DataOptions& d, const ModelOptions& m, SweepConfig cfg, const std::vector<std::string>& rules,
              const std::vector<std::string>& modes, const fs::path& out, bool svg) {
    const auto raw = load_data(d);
    if (!rules.empty()) cfg.rule_counts = parse_rule_counts(rules);
    if (!modes.empty()) {
        cfg.modes.clear();
        for (const auto& s : modes) cfg.modes.push_back(parse_mode(s));
    }
    cfg.init = init_config(m);
    cfg.seed_base = m.seed;
    std::cout << "sweep: " << cfg.modes.size() << " modes x " << cfg.rule_counts.size() << " rule counts x "
              << cfg.n_seeds << " seeds on " << cfg.parallelism << " workers\n";
    const auto result = run_sweep(raw, cfg);

    fs::create_directories(out);
    write_sweep_csv(result, out / "sweep.csv");
    write_aggregate_csv(result, out / "aggregate.csv");
    write_json(out / "summary.json", sweep_summary(result, cfg));
    if (svg) write_text(out / "chart.svg", sweep_chart_svg(result));

    for (const auto& a : result.aggregates) {
        std::cout << short_name(a.mode) << " R=" << a.n_rules << ": mean test MSE " << fmt(a.mean_test_mse, "%.2f")
                  << " [" << fmt(a.min_test_mse, "%.2f") << ", " << fmt(a.max_test_mse, "%.2f") << "], "
                  << a.n_ok << "/" << cfg.n_seeds << " ok\n";
    }
    std::cout << "results written to " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval type-2 ANFIS training, explanation and benchmarking"};
    app.require_subcommand(1);

    DataOptions data;
    ModelOptions model;
    TrainConfig train_cfg;
    SweepConfig sweep_cfg;
    std::string synth_out, train_out, predict_out, evaluate_out, explain_out, sweep_out, model_path, input;
    std::vector<std::string> rule_counts, modes;
    bool svg = false;

    auto* synth = app.add_subcommand("synth", "Write a synthetic data set as CSV");
    add_data_options(synth, data);
    synth->add_option("--out", synth_out, "Output CSV")->required();

    auto* train = app.add_subcommand("train", "Train one model and write model, epoch log and metrics");
    add_data_options(train, data);
    add_model_options(train, model);
    add_train_options(train, train_cfg);
    train->add_option("--out", train_out, "Output directory")->default_val("run");
    train->add_flag("--svg", svg, "Also write per-rule FOU plots");

    auto* predict = app.add_subcommand("predict", "Predict with intervals for every row of a CSV");
    predict->add_option("--model", model_path, "Model JSON")->required();
    predict->add_option("--input", input, "Input CSV with the model's feature columns")->required();
    predict->add_option("--out", predict_out, "Output CSV")->default_val("predictions.csv");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics of a saved model on a labelled CSV");
    evaluate_cmd->add_option("--model", model_path, "Model JSON")->required();
    add_data_options(evaluate_cmd, data);
    evaluate_cmd->add_option("--out", evaluate_out, "Optional metrics JSON");

    auto* explain = app.add_subcommand("explain", "Uncertainty report, rule text and optional plots");
    explain->add_option("--model", model_path, "Model JSON")->required();
    explain->add_option("--input", input, "Optional CSV for per-instance intervals");
    explain->add_option("--out", explain_out, "Output directory")->default_val("explain");
    explain->add_flag("--svg", svg, "Write one FOU plot per rule");

    auto* sweep = app.add_subcommand("sweep", "Train over rule counts, seeds and modes");
    add_data_options(sweep, data);
    add_model_options(sweep, model, false);
    add_train_options(sweep, sweep_cfg.train);
    sweep->add_option("--rule-counts", rule_counts, "Rule counts, e.g. 5:50 or 5,7,10")->delimiter(',');
    sweep->add_option("--seeds", sweep_cfg.n_seeds, "Seeds per rule count")->capture_default_str();
    sweep->add_option("--modes", modes, "it2,anfis0,anfis1")->delimiter(',');
    sweep->add_option("--parallelism", sweep_cfg.parallelism, "Worker threads")->capture_default_str();
    sweep->add_option("--out", sweep_out, "Output directory")->default_val("sweep");
    sweep->add_flag("--svg", svg, "Write the rule-count chart");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(data, synth_out);
        if (*train) return cmd_train(data, model, train_cfg, train_out, svg);
        if (*predict) return cmd_predict(model_path, input, predict_out);
        if (*evaluate_cmd) return cmd_evaluate(model_path, data, evaluate_cmd->count("--target") > 0, evaluate_out);
        if (*explain) return cmd_explain(model_path, input, explain_out, svg);
        if (*sweep) return cmd_sweep(data, model, sweep_cfg, rule_counts, modes, sweep_out, svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
