#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "it2anfis/model_io.hpp"
#include "support/oracles.hpp"

using namespace it2anfis;
namespace fs = std::filesystem;

namespace {

Model random_model(std::size_t R, std::size_t F, std::uint64_t seed, Mode mode = Mode::IT2) {
    std::mt19937_64 rng(seed);
    Model m;
    m.rules = oracle::random_rulebase(R, F, rng, mode);
    m.rules.q = 0.37;
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (std::size_t f = 0; f < F; ++f) {
        const double lo = u(rng);
        m.scaling.features.push_back({lo, lo + 1.0 + std::abs(u(rng))});
        m.feature_names.push_back("feature " + std::to_string(f));
    }
    m.scaling.target = {270.123456789, 41.987654321};
    m.target_name = "energy_mwh";
    m.seed = seed;
    return m;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "it2anfis_model_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(ModelIo, RoundTripIsExact) {
    for (auto mode : {Mode::IT2, Mode::Type1Order0, Mode::Type1Order1}) {
        const auto m = random_model(7, 4, 11 + static_cast<int>(mode), mode);
        const auto path = scratch("roundtrip.json");
        save_model(m, path);
        EXPECT_EQ(load_model(path), m);
    }
}

TEST(ModelIo, PredictionsIdenticalAfterReload) {
    const auto m = random_model(5, 3, 2);
    const auto path = scratch("predict.json");
    save_model(m, path);
    const auto back = load_model(path);
    std::mt19937_64 rng(8);
    const auto X = oracle::random_inputs(100, 3, rng, -0.2, 1.2);
    const auto a = predict_batch(m.rules, X);
    const auto b = predict_batch(back.rules, X);
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(a[i].y_pred, b[i].y_pred);
        EXPECT_EQ(a[i].lo, b[i].lo);
        EXPECT_EQ(a[i].hi, b[i].hi);
    }
}

TEST(ModelIo, RuleCountMismatchIsSchemaError) {
    auto doc = model_to_json(random_model(7, 2, 3));
    doc["rules"].erase(doc["rules"].size() - 1);
    try {
        model_from_json(doc);
        FAIL();
    } catch (const ModelFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("R=7"), std::string::npos) << e.what();
    }
}

TEST(ModelIo, SchemaViolations) {
    const auto good = model_to_json(random_model(3, 2, 4));
    auto doc = good;
    doc["format_version"] = kModelFormatVersion + 1;
    EXPECT_THROW(model_from_json(doc), ModelFormatError);
    doc = good;
    doc.erase("target_scaler");
    EXPECT_THROW(model_from_json(doc), ModelFormatError);
    doc = good;
    doc["rules"][0]["w"].push_back(1.0);
    EXPECT_THROW(model_from_json(doc), ModelFormatError);
    doc = good;
    doc["mode"] = "kmeans";
    EXPECT_THROW(model_from_json(doc), ModelFormatError);
}

TEST(ModelIo, UnreadableFiles) {
    EXPECT_THROW(load_model("/nonexistent/model.json"), ModelFormatError);
    const auto path = scratch("garbage.json");
    std::ofstream(path) << "{ not json";
    EXPECT_THROW(load_model(path), ModelFormatError);
}
