#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "it2anfis/dataset.hpp"

using namespace it2anfis;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
    const auto dir = fs::temp_directory_path() / "it2anfis_dataset_tests";
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << contents;
    return path;
}

RawTable small_table(std::size_t n) {
    RawTable t;
    t.column_names = {"a", "b", "energy_mwh"};
    t.target_column = "energy_mwh";
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        t.rows.push_back({x, 10.0 - 0.5 * x + (i % 3), 200.0 + 3.0 * x});
    }
    return t;
}

}  // namespace

TEST(LoadCsv, DropsRowsWithNaN) {
    const auto path = temp_file("nan.csv",
                                "date,a,b,energy_mwh\n"
                                "2014-01-01,1,2,250\n"
                                "2014-01-02,2,NaN,260\n"
                                "2014-01-03,3,4,270\n"
                                "2014-01-04,4,5,280\n"
                                "2014-01-05,5,6,290\n");
    const auto t = load_csv(path, "energy_mwh", std::string("date"));
    EXPECT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.dropped_count, 1u);
    EXPECT_EQ(t.feature_names(), (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(t.dates.size(), 4u);
    EXPECT_EQ(t.dates[1], "2014-01-03");
}

TEST(LoadCsv, HeaderOnlyIsAnError) {
    const auto path = temp_file("header.csv", "a,b,energy_mwh\n");
    EXPECT_THROW(load_csv(path, "energy_mwh"), DataError);
}

TEST(LoadCsv, MissingFileAndMissingTarget) {
    try {
        load_csv("/nonexistent/melbourne.csv", "energy_mwh");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/melbourne.csv"), std::string::npos);
    }
    const auto path = temp_file("notarget.csv", "a,b\n1,2\n");
    EXPECT_THROW(load_csv(path, "energy_mwh"), DataError);
}

TEST(LoadCsv, QuotedHeaderAndIgnoredColumns) {
    const auto path = temp_file("quoted.csv",
                                "\"id\",\"Average Inflow\",\"energy, MWh\"\n"
                                "a1,3.5,270\n"
                                "a2,\"4.5\",280\n");
    const auto t = load_csv(path, "energy, MWh", std::nullopt, {"id"});
    EXPECT_EQ(t.column_names, (std::vector<std::string>{"Average Inflow", "energy, MWh"}));
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][0], 4.5);
}

TEST(LoadCsv, ThirteenFeatureSyntheticFile) {
    const auto raw = generate_synthetic({1000, 13, 4, 5.0, 3});
    const auto path = fs::temp_directory_path() / "it2anfis_dataset_tests" / "synthetic.csv";
    fs::create_directories(path.parent_path());
    write_csv(raw, path);
    const auto t = load_csv(path, "energy_mwh");
    EXPECT_EQ(t.rows.size(), 1000u);
    EXPECT_EQ(t.feature_indices().size(), 13u);
    EXPECT_EQ(t.rows, raw.rows);  // %.17g round-trips
}

TEST(Split, SixtyFourSixteenTwenty) {
    const auto s = split_sizes_for(1000);
    EXPECT_EQ(s.train.size(), 640u);
    EXPECT_EQ(s.val.size(), 160u);
    EXPECT_EQ(s.test.size(), 200u);
    for (std::size_t n : {10u, 11u, 37u, 99u, 1001u}) {
        const auto t = split_sizes_for(n);
        EXPECT_EQ(t.train.size() + t.val.size() + t.test.size(), n);
        EXPECT_LE(std::abs(static_cast<double>(t.train.size()) - 0.64 * n), 1.0);
        EXPECT_LE(std::abs(static_cast<double>(t.val.size()) - 0.16 * n), 1.0);
        EXPECT_LE(std::abs(static_cast<double>(t.test.size()) - 0.20 * n), 1.0);
    }
}

TEST(NormalizeAndSplit, DisjointCoveringDeterministic) {
    const auto raw = generate_synthetic({200, 3, 2, 1.0, 9});
    const auto a = normalize_and_split(raw, 42);
    const auto b = normalize_and_split(raw, 42);
    EXPECT_EQ(a, b);
    std::set<std::size_t> all;
    for (const auto* part : {&a.split.train, &a.split.val, &a.split.test}) {
        for (auto i : *part) EXPECT_TRUE(all.insert(i).second) << "index " << i << " repeated";
    }
    EXPECT_EQ(all.size(), 200u);
    const auto c = normalize_and_split(raw, 43);
    EXPECT_NE(a.split, c.split);
}

TEST(NormalizeAndSplit, TrainingStatisticsOnly) {
    const auto raw = generate_synthetic({300, 4, 3, 2.0, 5});
    const auto ds = normalize_and_split(raw, 1);
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        double lo = INFINITY, hi = -INFINITY;
        for (auto i : ds.split.train) {
            lo = std::min(lo, raw.rows[i][f]);
            hi = std::max(hi, raw.rows[i][f]);
            EXPECT_GE(ds.X(i, f), 0.0);
            EXPECT_LE(ds.X(i, f), 1.0);
        }
        EXPECT_EQ(ds.feature_scalers[f].min, lo);
        EXPECT_EQ(ds.feature_scalers[f].max, hi);
    }
    EXPECT_GT(ds.target_scaler.std, 0.0);
    const auto t = raw.target_index();
    for (auto i : ds.split.train) {
        const double back = inverse_target(ds.y[i], ds.target_scaler);
        EXPECT_LE(std::abs(back - raw.rows[i][t]), 1e-12 * std::abs(raw.rows[i][t]));
    }
}

TEST(NormalizeAndSplit, MidpointScalesToHalf) {
    MinMaxScaler s{2.0, 10.0};
    EXPECT_EQ(s.transform(6.0), 0.5);
}

TEST(NormalizeAndSplit, ConstantColumnsAreRejected) {
    auto raw = small_table(20);
    for (auto& r : raw.rows) r[1] = 7.0;
    try {
        normalize_and_split(raw, 0);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
    }
    raw = small_table(20);
    for (auto& r : raw.rows) r[2] = 250.0;
    EXPECT_THROW(normalize_and_split(raw, 0), DataError);
    EXPECT_THROW(normalize_and_split(small_table(9), 0), DataError);
}

TEST(InverseTarget, Linear) {
    const StandardScaler s{260.0, 40.0};
    EXPECT_EQ(inverse_target(0.0, s), 260.0);
    EXPECT_EQ(inverse_target(1.0, s), 300.0);
    EXPECT_EQ(inverse_target(-2.0, s), 180.0);
}

TEST(Synthetic, Deterministic) {
    const SyntheticSpec spec{100, 5, 3, 2.0, 1};
    EXPECT_EQ(generate_synthetic(spec).rows, generate_synthetic(spec).rows);
    auto other = spec;
    other.seed = 2;
    EXPECT_NE(generate_synthetic(spec).rows, generate_synthetic(other).rows);
}

TEST(Synthetic, ThousandByThirteen) {
    const auto raw = generate_synthetic({1000, 13, 4, 5.0, 0});
    EXPECT_EQ(raw.rows.size(), 1000u);
    EXPECT_EQ(raw.feature_indices().size(), 13u);
    EXPECT_EQ(raw.column_names.size(), 14u);
}

TEST(Synthetic, SingleNoiselessRuleIsAffine) {
    const auto raw = generate_synthetic({200, 6, 1, 0.0, 4});
    const std::size_t n = raw.rows.size(), F = 6;
    Eigen::MatrixXd A(n, F + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < F; ++f) A(i, f) = raw.rows[i][f];
        A(i, F) = 1.0;
        y(i) = raw.rows[i][F];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    const double max_resid = (A * coef - y).cwiseAbs().maxCoeff();
    EXPECT_LT(max_resid, 1e-9);
}

TEST(Synthetic, InvalidSpec) {
    EXPECT_THROW(generate_synthetic({5, 2, 1, 0.0, 0}), DataError);
    EXPECT_THROW(generate_synthetic({50, 0, 1, 0.0, 0}), DataError);
    EXPECT_THROW(generate_synthetic({50, 2, 1, -1.0, 0}), DataError);
}
