#pragma once

#include <vector>

#include "it2anfis/initializer.hpp"
#include "it2anfis/rule_base.hpp"

namespace it2anfis {

/// Type-1 ANFIS built on the IT2 stack by collapsing every uncertain mean to a
/// point. Order 0 keeps only the rule biases; order 1 keeps full linear
/// consequents. The returned rule base trains with the regular trainer.
RuleBase make_type1(InitConfig cfg, int order, const std::vector<FeatureRange>& ranges);

/// Number of consequent parameters the trainer updates (R for order 0,
/// R * (F + 1) otherwise).
std::size_t trainable_consequent_count(const RuleBase& rb);

}  // namespace it2anfis
