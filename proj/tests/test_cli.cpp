#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "it2anfis/dataset.hpp"
#include "it2anfis/model_io.hpp"

using namespace it2anfis;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int status = 0;
    std::string output;
};

struct ScratchDir {
    fs::path path = fs::temp_directory_path() / ("it2anfis_cli_tests_" + std::to_string(::getpid()));
    ScratchDir() { fs::create_directories(path); }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const fs::path& workdir() {
    static const ScratchDir dir;
    return dir.path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run cli(const std::string& args) {
    const auto log = workdir() / "last_output.txt";
    const std::string cmd = std::string(IT2ANFIS_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

std::vector<std::vector<std::string>> read_csv_cells(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

const fs::path& data_file() {
    static const fs::path data = [] {
        const auto p = workdir() / "data.csv";
        const auto r = cli("synth --out " + p.string() + " --n-samples 300 --n-features 5 --synth-seed 4");
        EXPECT_EQ(r.status, 0) << r.output;
        return p;
    }();
    return data;
}

// One trained 7-rule model shared by several tests.
const fs::path& trained_dir() {
    static const fs::path dir = [] {
        const auto out = workdir() / "run7";
        const auto r = cli("train --data " + data_file().string() + " --rules 7 --seed 0 --max-epochs 40 --out " +
                           out.string());
        EXPECT_EQ(r.status, 0) << r.output;
        return out;
    }();
    return dir;
}

}  // namespace

TEST(Cli, TrainWritesModelWithHeaderArity) {
    const auto model = load_model(trained_dir() / "model.json");
    EXPECT_EQ(model.rules.n_rules(), 7u);
    EXPECT_EQ(model.rules.n_features(), 5u);
    EXPECT_EQ(model.feature_names.front(), "x1");
    const auto metrics = json::parse(slurp(trained_dir() / "metrics.json"));
    EXPECT_EQ(metrics["rules"], 7);
    std::ifstream log(trained_dir() / "epochs.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(log, line)) {
        const auto rec = json::parse(line);
        EXPECT_TRUE(rec.contains("checkpointed"));
        EXPECT_EQ(rec["epoch"], ++lines);
    }
    EXPECT_EQ(lines, metrics["epochs"].get<std::size_t>());
}

TEST(Cli, PredictReproducesTrainingMse) {
    const auto preds = workdir() / "train_preds.csv";
    const auto r = cli("predict --model " + (trained_dir() / "model.json").string() + " --input " +
                       data_file().string() + " --out " + preds.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto cells = read_csv_cells(preds);
    ASSERT_EQ(cells[0], (std::vector<std::string>{"index", "y_pred_mwh", "interval_lo_mwh", "interval_hi_mwh",
                                                  "width_mwh"}));
    const auto raw = load_csv(data_file(), "energy_mwh");
    ASSERT_EQ(cells.size(), raw.rows.size() + 1);
    const auto metrics = json::parse(slurp(trained_dir() / "metrics.json"));
    double acc = 0.0;
    const auto train_idx = metrics["split"]["train"].get<std::vector<std::size_t>>();
    for (auto i : train_idx) {
        const double e = std::stod(cells[i + 1][1]) - raw.rows[i][raw.target_index()];
        acc += e * e;
        EXPECT_LE(std::stod(cells[i + 1][2]), std::stod(cells[i + 1][1]));
        EXPECT_LE(std::stod(cells[i + 1][1]), std::stod(cells[i + 1][3]));
    }
    const double reported = metrics["train"]["mse"].get<double>();
    EXPECT_NEAR(acc / static_cast<double>(train_idx.size()), reported, 1e-9 * reported);
}

TEST(Cli, TypeOneModelPredictsZeroWidth) {
    const auto out = workdir() / "anfis1";
    auto r = cli("train --data " + data_file().string() +
                 " --rules 3 --mode anfis1 --max-epochs 5 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto preds = workdir() / "anfis1_preds.csv";
    r = cli("predict --model " + (out / "model.json").string() + " --input " + data_file().string() +
            " --out " + preds.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto cells = read_csv_cells(preds);
    for (std::size_t i = 1; i < cells.size(); ++i) EXPECT_EQ(std::stod(cells[i][4]), 0.0);

    r = cli("explain --model " + (out / "model.json").string() + " --out " + (workdir() / "anfis1_explain").string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto report = json::parse(slurp(workdir() / "anfis1_explain" / "report.json"));
    for (const auto& e : report["per_feature"]) EXPECT_LT(e["fou_area"].get<double>(), 1e-9);
}

TEST(Cli, EmptyInputGivesHeaderOnlyOutput) {
    const auto input = workdir() / "empty.csv";
    std::ofstream(input) << "x1,x2,x3,x4,x5\n";
    const auto preds = workdir() / "empty_preds.csv";
    const auto r = cli("predict --model " + (trained_dir() / "model.json").string() + " --input " + input.string() +
                       " --out " + preds.string());
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(slurp(preds), "index,y_pred_mwh,interval_lo_mwh,interval_hi_mwh,width_mwh\n");
}

TEST(Cli, PredictRejectsArityAndVersionMismatch) {
    const auto input = workdir() / "narrow.csv";
    std::ofstream(input) << "x1,x2\n0.1,0.2\n";
    auto r = cli("predict --model " + (trained_dir() / "model.json").string() + " --input " + input.string() +
                 " --out " + (workdir() / "narrow_preds.csv").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("x3"), std::string::npos) << r.output;

    auto doc = json::parse(slurp(trained_dir() / "model.json"));
    doc["format_version"] = 99;
    const auto bad_model = workdir() / "future_model.json";
    std::ofstream(bad_model) << doc.dump();
    r = cli("predict --model " + bad_model.string() + " --input " + data_file().string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("format_version"), std::string::npos) << r.output;
}

TEST(Cli, MissingDataFileNamesThePath) {
    const auto r = cli("train --data /no/such/dir/melbourne.csv --rules 7");
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("/no/such/dir/melbourne.csv"), std::string::npos) << r.output;
}

TEST(Cli, ExplainReportShapeAndSvgs) {
    const auto out = workdir() / "explain7";
    const auto r = cli("explain --model " + (trained_dir() / "model.json").string() + " --input " +
                       data_file().string() + " --svg --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto report = json::parse(slurp(out / "report.json"));
    EXPECT_EQ(report["per_rule"].size(), 7u);
    EXPECT_EQ(report["per_feature"].size(), 35u);
    EXPECT_EQ(report["per_instance"].size(), 300u);
    std::size_t svgs = 0;
    for (const auto& entry : fs::directory_iterator(out / "svg")) {
        boost::property_tree::ptree tree;
        EXPECT_NO_THROW(boost::property_tree::read_xml(entry.path().string(), tree)) << entry.path();
        ++svgs;
    }
    EXPECT_EQ(svgs, 7u);

    const auto again = workdir() / "explain7b";
    ASSERT_EQ(cli("explain --model " + (trained_dir() / "model.json").string() + " --out " + again.string()).status,
              0);
    EXPECT_EQ(json::parse(slurp(again / "report.json"))["per_rule"], report["per_rule"]);
    EXPECT_NE(slurp(out / "rules.txt").find("RULE 7"), std::string::npos);
}

TEST(Cli, SyntheticAffineTrainingReportsTinyError) {
    const auto out = workdir() / "affine";
    const auto r = cli("train --synthetic --n-features 3 --latent-rules 1 --noise-std 0 --rules 1 --order1 "
                       "--lambda-l1 0 --lambda-l2 0 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto metrics = json::parse(slurp(out / "metrics.json"));
    EXPECT_LT(metrics["train_mse_std"].get<double>(), 1e-3);
}

TEST(Cli, EvaluateMatchesAllRowMetrics) {
    const auto out = workdir() / "eval.json";
    const auto r = cli("evaluate --model " + (trained_dir() / "model.json").string() + " --data " +
                       data_file().string() + " --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto doc = json::parse(slurp(out));
    EXPECT_EQ(doc["rows"], 300);
    EXPECT_GT(doc["metrics"]["mse"].get<double>(), 0.0);
}

TEST(Cli, SweepOutputsAreDeterministic) {
    const std::string base = "sweep --data " + data_file().string() +
                             " --rule-counts 2,3 --seeds 2 --max-epochs 5 --svg --out ";
    ASSERT_EQ(cli(base + (workdir() / "sweep_a").string()).status, 0);
    const auto r = cli(base + (workdir() / "sweep_b").string() + " --parallelism 3");
    ASSERT_EQ(r.status, 0) << r.output;
    auto a = read_csv_cells(workdir() / "sweep_a" / "sweep.csv");
    auto b = read_csv_cells(workdir() / "sweep_b" / "sweep.csv");
    ASSERT_EQ(a.size(), 5u);
    for (auto* t : {&a, &b}) {
        for (auto& row : *t) row.erase(row.begin() + 8);  // wall_ms
    }
    EXPECT_EQ(a, b);
    EXPECT_EQ(slurp(workdir() / "sweep_a" / "aggregate.csv"), slurp(workdir() / "sweep_b" / "aggregate.csv"));
    EXPECT_TRUE(fs::exists(workdir() / "sweep_a" / "chart.svg"));
    EXPECT_TRUE(fs::exists(workdir() / "sweep_a" / "summary.json"));
}

TEST(Cli, DefaultOutputPathsPerSubcommand) {
    const auto dir = workdir() / "defaults";
    fs::create_directories(dir);
    const std::string model = (trained_dir() / "model.json").string();
    const std::string cd = "cd " + dir.string() + " && ";
    ASSERT_EQ(std::system((cd + IT2ANFIS_CLI + " evaluate --model " + model + " --data " + data_file().string() +
                           " > /dev/null").c_str()),
              0);
    EXPECT_TRUE(fs::is_empty(dir));
    ASSERT_EQ(std::system((cd + IT2ANFIS_CLI + " predict --model " + model + " --input " + data_file().string() +
                           " > /dev/null").c_str()),
              0);
    EXPECT_TRUE(fs::exists(dir / "predictions.csv"));
    EXPECT_FALSE(fs::exists(dir / "sweep"));
}
