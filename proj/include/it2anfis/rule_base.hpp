#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "it2anfis/matrix.hpp"

namespace it2anfis {

/// IT2: interval antecedents with linear consequents.
/// Type1Order0 / Type1Order1: collapsed antecedents (c1 == c2) with constant or
/// linear consequents, i.e. the classical zero- and first-order ANFIS.
enum class Mode { IT2, Type1Order0, Type1Order1 };

std::string_view to_string(Mode mode);
/// it2, anfis0 or anfis1.
std::string_view short_name(Mode mode);
/// Accepts the short CLI names (it2, anfis0, anfis1) and the model-file names.
Mode parse_mode(std::string_view text);
inline bool is_type1(Mode mode) { return mode != Mode::IT2; }

inline constexpr double kSigmaMin = 0.05;
inline constexpr double kMinSeparation = 0.05;
/// Total activation below this falls back to uniform normalized strengths.
inline constexpr double kStrengthFloor = 1e-12;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gaussian membership with an uncertain mean in [c1, c2] and fixed sigma.
struct Antecedent {
    double c1 = 0.0;
    double c2 = 0.0;
    double sigma = 1.0;

    double mid() const { return 0.5 * (c1 + c2); }
    double width() const { return c2 - c1; }
    bool operator==(const Antecedent&) const = default;
};

struct MembershipBounds {
    double lower;
    double upper;
};

/// Lower and upper membership grades of x. The upper function has a plateau of
/// 1 on [c1, c2]; the lower function uses the far centre on each side of the
/// midpoint (x == mid takes the c2 branch).
MembershipBounds membership_bounds(const Antecedent& ant, double x);

struct Consequent {
    std::vector<double> w;
    double b = 0.0;

    double evaluate(std::span<const double> x) const;
    bool operator==(const Consequent&) const = default;
};

struct Rule {
    std::vector<Antecedent> antecedents;
    Consequent consequent;
    bool operator==(const Rule&) const = default;
};

struct RuleBase {
    std::vector<Rule> rules;
    double q = 0.5;
    Mode mode = Mode::IT2;

    std::size_t n_rules() const { return rules.size(); }
    std::size_t n_features() const { return rules.empty() ? 0 : rules.front().antecedents.size(); }
    bool operator==(const RuleBase&) const = default;
};

/// Throws ModelError when the rule base breaks a structural invariant
/// (empty, ragged, q outside [0,1], non-finite values, sigma <= 0, c1 > c2,
/// uncollapsed antecedents or nonzero weights in a type-1 mode).
void validate(const RuleBase& rb);

struct FiringStrengths {
    std::vector<double> mu_lower;
    std::vector<double> mu_upper;
    std::vector<double> lower;  // normalized
    std::vector<double> upper;  // normalized
};

FiringStrengths fire(const RuleBase& rb, std::span<const double> x);

struct IntervalPrediction {
    double y_lower = 0.0;
    double y_upper = 0.0;
    double y_pred = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;

    static IntervalPrediction from_bounds(double y_lower, double y_upper, double q);
    bool operator==(const IntervalPrediction&) const = default;
};

IntervalPrediction predict_one(const RuleBase& rb, std::span<const double> x);
std::vector<IntervalPrediction> predict_batch(const RuleBase& rb, const Matrix& X);

/// Mean squared error of y_pred against y over all rows of X.
double mse(const RuleBase& rb, const Matrix& X, std::span<const double> y);

}  // namespace it2anfis
