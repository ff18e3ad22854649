#include "it2anfis/baselines.hpp"

namespace it2anfis {

RuleBase make_type1(InitConfig cfg, int order, const std::vector<FeatureRange>& ranges) {
    if (order != 0 && order != 1) throw ModelError("type-1 order must be 0 or 1");
    cfg.mode = order == 0 ? Mode::Type1Order0 : Mode::Type1Order1;
    return build_rulebase(cfg, ranges);
}

std::size_t trainable_consequent_count(const RuleBase& rb) {
    if (rb.mode == Mode::Type1Order0) return rb.n_rules();
    return rb.n_rules() * (rb.n_features() + 1);
}

}  // namespace it2anfis
