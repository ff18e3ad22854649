#include "it2anfis/rule_base.hpp"

#include <algorithm>
#include <cmath>

namespace it2anfis {

namespace {

inline double gaussian(double x, double centre, double sigma) {
    const double z = (x - centre) / sigma;
    return std::exp(-0.5 * z * z);
}

void normalize(std::span<const double> raw, std::vector<double>& out) {
    double total = 0.0;
    for (double v : raw) total += v;
    out.resize(raw.size());
    if (total < kStrengthFloor) {
        const double uniform = 1.0 / static_cast<double>(raw.size());
        std::fill(out.begin(), out.end(), uniform);
        return;
    }
    for (std::size_t j = 0; j < raw.size(); ++j) out[j] = raw[j] / total;
}

}  // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::IT2: return "IT2";
        case Mode::Type1Order0: return "TYPE1_ORDER0";
        case Mode::Type1Order1: return "TYPE1_ORDER1";
    }
    return "IT2";
}

std::string_view short_name(Mode mode) {
    switch (mode) {
        case Mode::IT2: return "it2";
        case Mode::Type1Order0: return "anfis0";
        case Mode::Type1Order1: return "anfis1";
    }
    return "it2";
}

Mode parse_mode(std::string_view text) {
    if (text == "it2" || text == "IT2") return Mode::IT2;
    if (text == "anfis0" || text == "TYPE1_ORDER0") return Mode::Type1Order0;
    if (text == "anfis1" || text == "TYPE1_ORDER1") return Mode::Type1Order1;
    throw ModelError("unknown mode '" + std::string(text) + "' (expected it2, anfis0 or anfis1)");
}

MembershipBounds membership_bounds(const Antecedent& ant, double x) {
    double upper = 1.0;
    if (x < ant.c1) {
        upper = gaussian(x, ant.c1, ant.sigma);
    } else if (x > ant.c2) {
        upper = gaussian(x, ant.c2, ant.sigma);
    }
    const double lower = x <= ant.mid() ? gaussian(x, ant.c2, ant.sigma) : gaussian(x, ant.c1, ant.sigma);
    return {lower, upper};
}

double Consequent::evaluate(std::span<const double> x) const {
    double y = b;
    for (std::size_t f = 0; f < w.size(); ++f) y += w[f] * x[f];
    return y;
}

void validate(const RuleBase& rb) {
    if (rb.rules.empty()) throw ModelError("rule base has no rules");
    const std::size_t F = rb.n_features();
    if (F == 0) throw ModelError("rules have no antecedents");
    if (!(rb.q >= 0.0 && rb.q <= 1.0)) throw ModelError("q must lie in [0, 1]");
    for (std::size_t j = 0; j < rb.rules.size(); ++j) {
        const auto& rule = rb.rules[j];
        const std::string where = "rule " + std::to_string(j);
        if (rule.antecedents.size() != F) throw ModelError(where + ": expected " + std::to_string(F) + " antecedents");
        if (rule.consequent.w.size() != F) throw ModelError(where + ": expected " + std::to_string(F) + " weights");
        for (const auto& a : rule.antecedents) {
            if (!std::isfinite(a.c1) || !std::isfinite(a.c2) || !std::isfinite(a.sigma)) {
                throw ModelError(where + ": non-finite antecedent");
            }
            if (!(a.sigma > 0.0)) throw ModelError(where + ": sigma must be positive");
            if (a.c1 > a.c2) throw ModelError(where + ": c1 > c2");
            if (is_type1(rb.mode) && a.c1 != a.c2) throw ModelError(where + ": type-1 mode requires c1 == c2");
        }
        for (double w : rule.consequent.w) {
            if (!std::isfinite(w)) throw ModelError(where + ": non-finite weight");
            if (rb.mode == Mode::Type1Order0 && w != 0.0) {
                throw ModelError(where + ": zero-order mode requires zero weights");
            }
        }
        if (!std::isfinite(rule.consequent.b)) throw ModelError(where + ": non-finite bias");
    }
}

FiringStrengths fire(const RuleBase& rb, std::span<const double> x) {
    const std::size_t R = rb.n_rules();
    FiringStrengths fs;
    fs.mu_lower.assign(R, 1.0);
    fs.mu_upper.assign(R, 1.0);
    for (std::size_t j = 0; j < R; ++j) {
        const auto& ants = rb.rules[j].antecedents;
        for (std::size_t f = 0; f < ants.size(); ++f) {
            const auto m = membership_bounds(ants[f], x[f]);
            fs.mu_lower[j] *= m.lower;
            fs.mu_upper[j] *= m.upper;
        }
    }
    normalize(fs.mu_lower, fs.lower);
    normalize(fs.mu_upper, fs.upper);
    return fs;
}

IntervalPrediction IntervalPrediction::from_bounds(double y_lower, double y_upper, double q) {
    IntervalPrediction p;
    p.y_lower = y_lower;
    p.y_upper = y_upper;
    p.y_pred = y_lower == y_upper ? y_lower : q * y_lower + (1.0 - q) * y_upper;
    p.lo = std::min(y_lower, y_upper);
    p.hi = std::max(y_lower, y_upper);
    p.width = p.hi - p.lo;
    return p;
}

IntervalPrediction predict_one(const RuleBase& rb, std::span<const double> x) {
    const auto fs = fire(rb, x);
    double y_lower = 0.0, y_upper = 0.0;
    for (std::size_t j = 0; j < rb.n_rules(); ++j) {
        const double yj = rb.rules[j].consequent.evaluate(x);
        y_lower += fs.lower[j] * yj;
        y_upper += fs.upper[j] * yj;
    }
    return IntervalPrediction::from_bounds(y_lower, y_upper, rb.q);
}

std::vector<IntervalPrediction> predict_batch(const RuleBase& rb, const Matrix& X) {
    std::vector<IntervalPrediction> out;
    out.reserve(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(predict_one(rb, X.row(i)));
    return out;
}

double mse(const RuleBase& rb, const Matrix& X, std::span<const double> y) {
    if (X.rows() == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double e = predict_one(rb, X.row(i)).y_pred - y[i];
        acc += e * e;
    }
    return acc / static_cast<double>(X.rows());
}

}  // namespace it2anfis
