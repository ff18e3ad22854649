#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "it2anfis/sweep.hpp"

using namespace it2anfis;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
    SweepConfig cfg;
    cfg.rule_counts = {5, 7, 10};
    cfg.n_seeds = 2;
    cfg.seed_base = 3;
    cfg.train.max_epochs = 8;
    return cfg;
}

const RawTable& table() {
    static const RawTable raw = generate_synthetic({150, 3, 3, 3.0, 21});
    return raw;
}

std::vector<std::string> csv_without_wall_time(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() > 8) cells.erase(cells.begin() + 8);
        std::string joined;
        for (const auto& c : cells) joined += c + ",";
        out.push_back(joined);
    }
    return out;
}

}  // namespace

TEST(Sweep, CountsRowsAndAggregates) {
    const auto res = run_sweep(table(), small_config());
    EXPECT_EQ(res.rows.size(), 6u);
    EXPECT_EQ(res.aggregates.size(), 3u);
    for (const auto& r : res.rows) EXPECT_TRUE(r.ok()) << r.status;
    ASSERT_NE(res.find(Mode::IT2, 7), nullptr);
    EXPECT_EQ(res.find(Mode::Type1Order0, 7), nullptr);
}

TEST(Sweep, SeedDerivation) {
    EXPECT_EQ(derive_run_seed(0, 7, 3), 703u);
    EXPECT_EQ(derive_run_seed(2, 50, 9), 25009u);
    const auto res = run_sweep(table(), small_config());
    for (const auto& r : res.rows) EXPECT_EQ(r.seed, 30000 + r.n_rules * 100 + r.seed_index);
}

TEST(Sweep, DeterministicCsv) {
    const auto dir = fs::temp_directory_path() / "it2anfis_sweep_tests";
    fs::create_directories(dir);
    const auto cfg = small_config();
    write_sweep_csv(run_sweep(table(), cfg), dir / "a.csv");
    write_sweep_csv(run_sweep(table(), cfg), dir / "b.csv");
    const auto a = csv_without_wall_time(dir / "a.csv");
    EXPECT_EQ(a, csv_without_wall_time(dir / "b.csv"));
    ASSERT_EQ(a.size(), 7u);
    EXPECT_EQ(a[0], "mode,rules,seed,test_mse,test_rmse,test_mae,test_mape,val_mse,status,");
}

TEST(Sweep, SerialEqualsParallel) {
    auto cfg = small_config();
    cfg.modes = {Mode::IT2, Mode::Type1Order1};
    const auto serial = run_sweep(table(), cfg);
    cfg.parallelism = 4;
    const auto parallel = run_sweep(table(), cfg);
    ASSERT_EQ(serial.rows.size(), parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        EXPECT_EQ(serial.rows[i].seed, parallel.rows[i].seed);
        EXPECT_EQ(serial.rows[i].mode, parallel.rows[i].mode);
        EXPECT_EQ(serial.rows[i].test.mse, parallel.rows[i].test.mse);
        EXPECT_EQ(serial.rows[i].val.mse, parallel.rows[i].val.mse);
    }
}

TEST(Sweep, AggregatesRecomputableFromRows) {
    const auto res = run_sweep(table(), small_config());
    for (const auto& a : res.aggregates) {
        double sum = 0.0, lo = INFINITY, hi = -INFINITY;
        std::size_t n = 0;
        for (const auto& r : res.rows) {
            if (r.mode != a.mode || r.n_rules != a.n_rules || !r.ok()) continue;
            sum += r.test.mse;
            lo = std::min(lo, r.test.mse);
            hi = std::max(hi, r.test.mse);
            ++n;
        }
        EXPECT_EQ(a.n_ok, n);
        EXPECT_NEAR(a.mean_test_mse, sum / static_cast<double>(n), 1e-9 * hi);
        EXPECT_EQ(a.min_test_mse, lo);
        EXPECT_EQ(a.max_test_mse, hi);
        EXPECT_LE(a.min_test_mse, a.mean_test_mse);
        EXPECT_LE(a.mean_test_mse, a.max_test_mse);
    }
}

TEST(Sweep, FailuresAreIsolated) {
    RawTable tiny = generate_synthetic({12, 2, 1, 1.0, 1});
    auto cfg = small_config();
    cfg.rule_counts = {1};
    cfg.n_seeds = 1;
    cfg.train.max_epochs = 3;
    // Constant feature column: every run fails at normalization but the sweep completes.
    for (auto& r : tiny.rows) r[0] = 1.0;
    const auto res = run_sweep(tiny, cfg);
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_FALSE(res.rows[0].ok());
    EXPECT_NE(res.rows[0].status.find("error"), std::string::npos);
    EXPECT_EQ(res.aggregates[0].n_ok, 0u);
    EXPECT_TRUE(std::isnan(res.aggregates[0].mean_test_mse));
}

TEST(Sweep, SummaryAndChart) {
    const auto cfg = small_config();
    const auto res = run_sweep(table(), cfg);
    const auto doc = sweep_summary(res, cfg);
    EXPECT_EQ(doc["runs"], 6);
    EXPECT_EQ(doc["failed_runs"], 0);
    EXPECT_TRUE(doc["best_by_mode"].contains("it2"));
    const auto svg = sweep_chart_svg(res);
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Sweep, ConfigValidation) {
    auto cfg = small_config();
    cfg.rule_counts.clear();
    EXPECT_THROW(run_sweep(table(), cfg), std::invalid_argument);
    cfg = small_config();
    cfg.n_seeds = 0;
    EXPECT_THROW(run_sweep(table(), cfg), std::invalid_argument);
}
