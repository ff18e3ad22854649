#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "it2anfis/dataset.hpp"
#include "it2anfis/initializer.hpp"
#include "it2anfis/metrics.hpp"
#include "it2anfis/rule_base.hpp"
#include "it2anfis/trainer.hpp"

namespace it2anfis {

struct SweepConfig {
    std::vector<std::size_t> rule_counts;  // default 5..50
    std::size_t n_seeds = 10;
    std::vector<Mode> modes{Mode::IT2};
    std::size_t parallelism = 1;
    std::uint64_t seed_base = 0;
    InitConfig init;
    TrainConfig train;

    SweepConfig();
    void validate() const;
};

/// seed_base * 10000 + R * 100 + seed_index, so adding rule counts never
/// changes the seeds of existing runs.
std::uint64_t derive_run_seed(std::uint64_t seed_base, std::size_t n_rules, std::size_t seed_index);

struct SweepRow {
    Mode mode = Mode::IT2;
    std::size_t n_rules = 0;
    std::size_t seed_index = 0;
    std::uint64_t seed = 0;  // derived run seed
    MetricSet test;
    MetricSet val;
    double wall_ms = 0.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SweepAggregate {
    Mode mode = Mode::IT2;
    std::size_t n_rules = 0;
    std::size_t n_ok = 0;
    double mean_test_mse = 0.0;
    double min_test_mse = 0.0;
    double max_test_mse = 0.0;
    double mean_test_rmse = 0.0;
    double mean_test_mae = 0.0;
    double mean_test_mape = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by (mode, R, seed_index)
    std::vector<SweepAggregate> aggregates;

    const SweepAggregate* find(Mode mode, std::size_t n_rules) const;
};

/// Runs |modes| x |rule_counts| x n_seeds independent trainings on a pool of
/// cfg.parallelism workers. Failed runs are recorded with their error status.
SweepResult run_sweep(const RawTable& raw, const SweepConfig& cfg);

/// Per-(mode, R) mean/min/max over the successful rows.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

/// Long-form CSV: mode,rules,seed,test_mse,test_rmse,test_mae,test_mape,val_mse,wall_ms,status
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_aggregate_csv(const SweepResult& result, const std::filesystem::path& path);
nlohmann::json sweep_summary(const SweepResult& result, const SweepConfig& cfg);

/// Mean test MSE line with a min-max band per mode against the rule count.
std::string sweep_chart_svg(const SweepResult& result);

}  // namespace it2anfis
