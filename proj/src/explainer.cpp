#include "it2anfis/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "svg.hpp"

namespace it2anfis {

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string feature_label(const std::vector<std::string>& names, std::size_t f) {
    return f < names.size() ? names[f] : "x" + std::to_string(f + 1);
}

// Linear combination "a*x1 + b*x2 + c" with sign-aware joins.
std::string linear_form(const std::vector<double>& w, double b, const std::vector<std::string>& names) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t f = 0; f < w.size(); ++f) {
        if (w[f] == 0.0) continue;
        if (first) {
            os << fmt6(w[f]);
        } else {
            os << (w[f] < 0 ? " - " : " + ") << fmt6(std::abs(w[f]));
        }
        os << "*" << feature_label(names, f);
        first = false;
    }
    if (first) {
        os << fmt6(b);
    } else {
        os << (b < 0 ? " - " : " + ") << fmt6(std::abs(b));
    }
    return os.str();
}

}  // namespace

std::vector<std::size_t> UncertaintyReport::rules_by_uncertainty() const {
    std::vector<std::size_t> order(per_rule.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return per_rule[a].mean_fou_area > per_rule[b].mean_fou_area;
    });
    for (auto& idx : order) idx = per_rule[idx].rule_index;
    return order;
}

std::pair<double, double> default_fou_window(const Antecedent& ant) {
    return {ant.c1 - 3.0 * ant.sigma, ant.c2 + 3.0 * ant.sigma};
}

double fou_area(const Antecedent& ant, std::pair<double, double> window, std::size_t n_points) {
    const auto [lo, hi] = window;
    if (!(lo < hi)) throw std::invalid_argument("fou_area: window must satisfy lo < hi");
    if (n_points < 16) throw std::invalid_argument("fou_area: need at least 16 points");
    const double h = (hi - lo) / static_cast<double>(n_points - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = i + 1 == n_points ? hi : lo + static_cast<double>(i) * h;
        const auto m = membership_bounds(ant, x);
        const double gap = m.upper - m.lower;
        area += (i == 0 || i + 1 == n_points) ? 0.5 * gap : gap;
    }
    return area * h;
}

double fou_area(const Antecedent& ant) { return fou_area(ant, default_fou_window(ant), kDefaultFouPoints); }

UncertaintyReport explain_model(const RuleBase& rb) {
    UncertaintyReport report;
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        const auto& rule = rb.rules[j];
        RuleUncertainty ru{j, 0.0, 0.0, std::abs(rule.consequent.b)};
        for (double w : rule.consequent.w) ru.consequent_l1_norm += std::abs(w);
        for (std::size_t f = 0; f < rule.antecedents.size(); ++f) {
            const auto& a = rule.antecedents[f];
            const double area = fou_area(a);
            report.per_feature.push_back({j, f, area, a.width()});
            ru.mean_fou_area += area;
            ru.max_fou_area = f == 0 ? area : std::max(ru.max_fou_area, area);
        }
        ru.mean_fou_area /= static_cast<double>(rule.antecedents.size());
        report.per_rule.push_back(ru);
    }
    return report;
}

IntervalPrediction to_original_units(const IntervalPrediction& p, const StandardScaler& scaler) {
    IntervalPrediction out;
    out.y_lower = scaler.inverse(p.y_lower);
    out.y_upper = scaler.inverse(p.y_upper);
    out.y_pred = scaler.inverse(p.y_pred);
    out.lo = scaler.inverse(p.lo);
    out.hi = scaler.inverse(p.hi);
    out.width = out.hi - out.lo;
    return out;
}

InstanceExplanation explain_instance(const RuleBase& rb, std::span<const double> x, const StandardScaler& scaler) {
    InstanceExplanation out;
    out.prediction = to_original_units(predict_one(rb, x), scaler);
    const auto fs = fire(rb, x);
    for (std::size_t j = 0; j < rb.n_rules(); ++j) out.top_rules.push_back({j, fs.upper[j], fs.lower[j]});
    std::stable_sort(out.top_rules.begin(), out.top_rules.end(), [](const auto& a, const auto& b) {
        return a.lower + a.upper > b.lower + b.upper;
    });
    return out;
}

std::vector<InstanceUncertainty> explain_instances(const RuleBase& rb, const Matrix& X, const StandardScaler& scaler) {
    std::vector<InstanceUncertainty> out;
    out.reserve(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out.push_back({i, to_original_units(predict_one(rb, X.row(i)), scaler)});
    }
    return out;
}

std::string export_rules_text(const RuleBase& rb, const std::vector<std::string>& feature_names,
                              const std::optional<Scaling>& scaling) {
    if (!feature_names.empty() && feature_names.size() != rb.n_features()) {
        throw std::invalid_argument("export_rules_text: expected " + std::to_string(rb.n_features()) +
                                    " feature names");
    }
    std::ostringstream os;
    os << "# " << rb.n_rules() << " rules, " << rb.n_features() << " features, mode " << to_string(rb.mode)
       << ", q = " << fmt6(rb.q) << "\n";
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        const auto& rule = rb.rules[j];
        os << "\nRULE " << j + 1 << "\n";
        for (std::size_t f = 0; f < rule.antecedents.size(); ++f) {
            const auto& a = rule.antecedents[f];
            os << (f == 0 ? "  IF  " : "  AND ") << feature_label(feature_names, f) << " is Gaussian(mean in ["
               << fmt6(a.c1) << ", " << fmt6(a.c2) << "], sigma " << fmt6(a.sigma) << ")";
            if (scaling) {
                const auto& s = scaling->features[f];
                const double span = s.max - s.min;
                os << "  | original: mean in [" << fmt6(s.inverse(a.c1)) << ", " << fmt6(s.inverse(a.c2))
                   << "], sigma " << fmt6(a.sigma * span);
            }
            os << "\n";
        }
        os << "  THEN y = " << linear_form(rule.consequent.w, rule.consequent.b, feature_names) << "\n";
        if (scaling) {
            // y_orig = std * (sum w_f (x_f - min_f) / span_f + b) + mean
            const auto& t = scaling->target;
            std::vector<double> w(rule.consequent.w.size());
            double b = rule.consequent.b;
            for (std::size_t f = 0; f < w.size(); ++f) {
                const auto& s = scaling->features[f];
                const double span = s.max - s.min;
                w[f] = t.std * rule.consequent.w[f] / span;
                b -= rule.consequent.w[f] * s.min / span;
            }
            os << "       original: y = " << linear_form(w, t.std * b + t.mean, feature_names) << "\n";
        }
    }
    return os.str();
}

nlohmann::json to_json(const UncertaintyReport& report) {
    using nlohmann::json;
    json out;
    out["per_feature"] = json::array();
    for (const auto& fu : report.per_feature) {
        out["per_feature"].push_back({{"rule_index", fu.rule_index},
                                      {"feature_index", fu.feature_index},
                                      {"fou_area", fu.fou_area},
                                      {"interval_width", fu.interval_width}});
    }
    out["per_rule"] = json::array();
    for (const auto& ru : report.per_rule) {
        out["per_rule"].push_back({{"rule_index", ru.rule_index},
                                   {"mean_fou_area", ru.mean_fou_area},
                                   {"max_fou_area", ru.max_fou_area},
                                   {"consequent_l1_norm", ru.consequent_l1_norm}});
    }
    out["rules_by_uncertainty"] = report.rules_by_uncertainty();
    if (report.per_instance) {
        out["per_instance"] = json::array();
        for (const auto& inst : *report.per_instance) {
            const auto& p = inst.prediction;
            out["per_instance"].push_back({{"index", inst.index},
                                           {"y_pred", p.y_pred},
                                           {"y_lower", p.y_lower},
                                           {"y_upper", p.y_upper},
                                           {"interval_lo", p.lo},
                                           {"interval_hi", p.hi},
                                           {"width", p.width}});
        }
    }
    return out;
}

std::string rule_svg(const RuleBase& rb, std::size_t rule_index, const std::vector<std::string>& feature_names) {
    if (rule_index >= rb.n_rules()) throw std::out_of_range("rule_svg: rule index out of range");
    const auto& ants = rb.rules[rule_index].antecedents;
    const std::size_t F = ants.size();
    const std::size_t cols = std::min<std::size_t>(F, 4);
    const std::size_t rows = (F + cols - 1) / cols;
    constexpr double panel_w = 220.0, panel_h = 150.0, pad = 28.0, title_h = 36.0;
    constexpr std::size_t samples = 120;

    std::string doc = svg::header(static_cast<double>(cols) * panel_w, title_h + static_cast<double>(rows) * panel_h);
    doc += svg::text(static_cast<double>(cols) * panel_w / 2.0, 24.0,
                     "Rule " + std::to_string(rule_index + 1) + " membership functions (FOU shaded)", 15);

    for (std::size_t f = 0; f < F; ++f) {
        const auto& a = ants[f];
        const double ox = static_cast<double>(f % cols) * panel_w;
        const double oy = title_h + static_cast<double>(f / cols) * panel_h;
        const double plot_w = panel_w - 2 * pad, plot_h = panel_h - 2 * pad;
        const auto [lo, hi] = default_fou_window(a);
        auto px = [&](double x) { return ox + pad + (x - lo) / (hi - lo) * plot_w; };
        auto py = [&](double m) { return oy + pad + (1.0 - m) * plot_h; };

        std::string upper_pts, lower_pts, band;
        std::vector<std::pair<double, double>> lower_curve;
        for (std::size_t i = 0; i < samples; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
            const auto m = membership_bounds(a, x);
            upper_pts += svg::num(px(x)) + "," + svg::num(py(m.upper)) + " ";
            lower_pts += svg::num(px(x)) + "," + svg::num(py(m.lower)) + " ";
            lower_curve.emplace_back(px(x), py(m.lower));
        }
        band = upper_pts;
        for (auto it = lower_curve.rbegin(); it != lower_curve.rend(); ++it) {
            band += svg::num(it->first) + "," + svg::num(it->second) + " ";
        }

        doc += "<rect x=\"" + svg::num(ox + pad) + "\" y=\"" + svg::num(oy + pad) + "\" width=\"" + svg::num(plot_w) +
               "\" height=\"" + svg::num(plot_h) + "\" fill=\"none\" stroke=\"#999\"/>\n";
        doc += "<polygon points=\"" + band + "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
        doc += "<polyline points=\"" + upper_pts + "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
        doc += "<polyline points=\"" + lower_pts +
               "\" fill=\"none\" stroke=\"#de2d26\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"/>\n";
        doc += svg::text(ox + panel_w / 2.0, oy + pad - 8.0, feature_label(feature_names, f), 11);
        doc += svg::text(ox + pad, oy + panel_h - pad + 14.0, svg::num(lo, 2), 9, "start");
        doc += svg::text(ox + panel_w - pad, oy + panel_h - pad + 14.0, svg::num(hi, 2), 9, "end");
    }
    doc += "</svg>\n";
    return doc;
}

std::vector<std::filesystem::path> write_rule_svgs(const RuleBase& rb, const std::vector<std::string>& feature_names,
                                                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        auto path = dir / ("rule_" + std::to_string(j + 1) + ".svg");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << rule_svg(rb, j, feature_names);
        written.push_back(std::move(path));
    }
    return written;
}

}  // namespace it2anfis
