#include "it2anfis/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "it2anfis/pipeline.hpp"
#include "svg.hpp"

namespace it2anfis {

namespace {

std::string csv_real(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

auto row_key(const SweepRow& r) { return std::make_tuple(static_cast<int>(r.mode), r.n_rules, r.seed_index); }

const char* mode_colour(Mode mode) {
    switch (mode) {
        case Mode::IT2: return "#08519c";
        case Mode::Type1Order1: return "#de2d26";
        case Mode::Type1Order0: return "#31a354";
    }
    return "#000000";
}

}  // namespace

SweepConfig::SweepConfig() {
    for (std::size_t r = 5; r <= 50; ++r) rule_counts.push_back(r);
}

void SweepConfig::validate() const {
    if (rule_counts.empty()) throw std::invalid_argument("sweep: rule_counts is empty");
    if (std::any_of(rule_counts.begin(), rule_counts.end(), [](std::size_t r) { return r < 1; })) {
        throw std::invalid_argument("sweep: rule counts must be >= 1");
    }
    if (n_seeds < 1) throw std::invalid_argument("sweep: n_seeds must be >= 1");
    if (modes.empty()) throw std::invalid_argument("sweep: no model modes selected");
    if (parallelism < 1) throw std::invalid_argument("sweep: parallelism must be >= 1");
}

std::uint64_t derive_run_seed(std::uint64_t seed_base, std::size_t n_rules, std::size_t seed_index) {
    return seed_base * 10000 + static_cast<std::uint64_t>(n_rules) * 100 + static_cast<std::uint64_t>(seed_index);
}

const SweepAggregate* SweepResult::find(Mode mode, std::size_t n_rules) const {
    for (const auto& a : aggregates) {
        if (a.mode == mode && a.n_rules == n_rules) return &a;
    }
    return nullptr;
}

SweepResult run_sweep(const RawTable& raw, const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SweepRow> jobs;
    for (auto mode : cfg.modes) {
        for (auto r : cfg.rule_counts) {
            for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
                SweepRow row;
                row.mode = mode;
                row.n_rules = r;
                row.seed_index = s;
                row.seed = derive_run_seed(cfg.seed_base, r, s);
                jobs.push_back(row);
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            auto& row = jobs[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto out = run_experiment(raw, {row.mode, row.n_rules, row.seed}, cfg.init, cfg.train);
                row.test = out.test;
                row.val = out.val;
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            row.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const std::size_t n_threads = std::min(cfg.parallelism, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SweepResult result;
    result.rows = std::move(jobs);
    std::sort(result.rows.begin(), result.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return row_key(a) < row_key(b); });
    result.aggregates = aggregate_rows(result.rows);
    return result;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
    std::map<std::pair<int, std::size_t>, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) groups[{static_cast<int>(r.mode), r.n_rules}].push_back(&r);

    std::vector<SweepAggregate> out;
    for (const auto& [key, members] : groups) {
        SweepAggregate a;
        a.mode = static_cast<Mode>(key.first);
        a.n_rules = key.second;
        a.min_test_mse = std::numeric_limits<double>::infinity();
        a.max_test_mse = -std::numeric_limits<double>::infinity();
        std::size_t n_mape = 0;
        for (const auto* r : members) {
            if (!r->ok()) continue;
            ++a.n_ok;
            a.mean_test_mse += r->test.mse;
            a.mean_test_rmse += r->test.rmse;
            a.mean_test_mae += r->test.mae;
            if (r->test.mape) {
                a.mean_test_mape += *r->test.mape;
                ++n_mape;
            }
            a.min_test_mse = std::min(a.min_test_mse, r->test.mse);
            a.max_test_mse = std::max(a.max_test_mse, r->test.mse);
        }
        if (a.n_ok == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            a.mean_test_mse = a.min_test_mse = a.max_test_mse = nan;
            a.mean_test_rmse = a.mean_test_mae = a.mean_test_mape = nan;
        } else {
            const double n = static_cast<double>(a.n_ok);
            a.mean_test_mse /= n;
            a.mean_test_rmse /= n;
            a.mean_test_mae /= n;
            a.mean_test_mape = n_mape ? a.mean_test_mape / static_cast<double>(n_mape)
                                      : std::numeric_limits<double>::quiet_NaN();
            // Keep min <= mean <= max exact despite summation rounding.
            a.mean_test_mse = std::clamp(a.mean_test_mse, a.min_test_mse, a.max_test_mse);
        }
        out.push_back(a);
    }
    return out;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "mode,rules,seed,test_mse,test_rmse,test_mae,test_mape,val_mse,wall_ms,status\n";
    for (const auto& r : result.rows) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out << short_name(r.mode) << ',' << r.n_rules << ',' << r.seed << ',' << csv_real(r.ok() ? r.test.mse : nan)
            << ',' << csv_real(r.ok() ? r.test.rmse : nan) << ',' << csv_real(r.ok() ? r.test.mae : nan) << ','
            << csv_real(r.ok() && r.test.mape ? *r.test.mape : nan) << ',' << csv_real(r.ok() ? r.val.mse : nan)
            << ',' << static_cast<long long>(std::llround(r.wall_ms)) << ',' << csv_safe(r.status) << '\n';
    }
}

void write_aggregate_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "mode,rules,n_ok,mean_test_mse,min_test_mse,max_test_mse,mean_test_rmse,mean_test_mae,mean_test_mape\n";
    for (const auto& a : result.aggregates) {
        out << short_name(a.mode) << ',' << a.n_rules << ',' << a.n_ok << ',' << csv_real(a.mean_test_mse) << ','
            << csv_real(a.min_test_mse) << ',' << csv_real(a.max_test_mse) << ',' << csv_real(a.mean_test_rmse)
            << ',' << csv_real(a.mean_test_mae) << ',' << csv_real(a.mean_test_mape) << '\n';
    }
}

nlohmann::json sweep_summary(const SweepResult& result, const SweepConfig& cfg) {
    using nlohmann::json;
    auto real = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json doc;
    doc["rule_counts"] = cfg.rule_counts;
    doc["n_seeds"] = cfg.n_seeds;
    doc["seed_base"] = cfg.seed_base;
    doc["modes"] = json::array();
    for (auto m : cfg.modes) doc["modes"].push_back(std::string(short_name(m)));
    std::size_t failures = 0;
    for (const auto& r : result.rows) failures += r.ok() ? 0 : 1;
    doc["runs"] = result.rows.size();
    doc["failed_runs"] = failures;

    doc["aggregates"] = json::array();
    std::map<Mode, const SweepAggregate*> best;
    for (const auto& a : result.aggregates) {
        doc["aggregates"].push_back({{"mode", short_name(a.mode)},
                                     {"rules", a.n_rules},
                                     {"n_ok", a.n_ok},
                                     {"mean_test_mse", real(a.mean_test_mse)},
                                     {"min_test_mse", real(a.min_test_mse)},
                                     {"max_test_mse", real(a.max_test_mse)},
                                     {"mean_test_rmse", real(a.mean_test_rmse)},
                                     {"mean_test_mae", real(a.mean_test_mae)},
                                     {"mean_test_mape", real(a.mean_test_mape)}});
        if (a.n_ok > 0 && (!best.count(a.mode) || a.mean_test_mse < best[a.mode]->mean_test_mse)) best[a.mode] = &a;
    }
    doc["best_by_mode"] = json::object();
    for (const auto& [mode, a] : best) {
        doc["best_by_mode"][std::string(short_name(mode))] = {{"rules", a->n_rules},
                                                              {"mean_test_mse", a->mean_test_mse}};
    }
    return doc;
}

std::string sweep_chart_svg(const SweepResult& result) {
    constexpr double width = 760, height = 460, left = 80, right = 150, top = 40, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& a : result.aggregates) {
        if (a.n_ok == 0) continue;
        x_min = std::min(x_min, static_cast<double>(a.n_rules));
        x_max = std::max(x_max, static_cast<double>(a.n_rules));
        y_min = std::min(y_min, a.min_test_mse);
        y_max = std::max(y_max, a.max_test_mse);
    }
    std::string doc = svg::header(width, height);
    doc += svg::text(width / 2, 24, "Test MSE versus number of rules (mean, min-max band)", 15);
    if (!std::isfinite(x_min)) {
        doc += svg::text(width / 2, height / 2, "no successful runs");
        return doc + "</svg>\n";
    }
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

    doc += "<rect x=\"" + svg::num(left) + "\" y=\"" + svg::num(top) + "\" width=\"" + svg::num(plot_w) +
           "\" height=\"" + svg::num(plot_h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        const double xv = x_min + (x_max - x_min) * i / 5.0;
        doc += svg::text(left - 6, py(yv) + 4, svg::num(yv, 1), 10, "end");
        doc += svg::text(px(xv), top + plot_h + 16, svg::num(xv, 0), 10);
    }
    doc += svg::text(left + plot_w / 2, height - 18, "number of rules", 12);
    doc += svg::text(18, top + plot_h / 2, "test MSE", 12);

    std::map<Mode, std::vector<const SweepAggregate*>> by_mode;
    for (const auto& a : result.aggregates) {
        if (a.n_ok > 0) by_mode[a.mode].push_back(&a);
    }
    double legend_y = top + 10;
    for (auto& [mode, series] : by_mode) {
        std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->n_rules < b->n_rules; });
        std::string band, line;
        for (auto* a : series) band += svg::num(px(double(a->n_rules))) + "," + svg::num(py(a->max_test_mse)) + " ";
        for (auto it = series.rbegin(); it != series.rend(); ++it) {
            band += svg::num(px(double((*it)->n_rules))) + "," + svg::num(py((*it)->min_test_mse)) + " ";
        }
        for (auto* a : series) line += svg::num(px(double(a->n_rules))) + "," + svg::num(py(a->mean_test_mse)) + " ";
        const std::string colour = mode_colour(mode);
        doc += "<polygon points=\"" + band + "\" fill=\"" + colour + "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
        doc += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        doc += "<line x1=\"" + svg::num(width - right + 12) + "\" y1=\"" + svg::num(legend_y) + "\" x2=\"" +
               svg::num(width - right + 36) + "\" y2=\"" + svg::num(legend_y) + "\" stroke=\"" + colour +
               "\" stroke-width=\"2\"/>\n";
        doc += svg::text(width - right + 42, legend_y + 4, std::string(short_name(mode)), 12, "start");
        legend_y += 20;
    }
    return doc + "</svg>\n";
}

}  // namespace it2anfis
