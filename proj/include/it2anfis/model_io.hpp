#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "it2anfis/dataset.hpp"
#include "it2anfis/rule_base.hpp"

namespace it2anfis {

inline constexpr int kModelFormatVersion = 1;

/// A trained rule base together with everything needed to apply it to data in
/// original units.
struct Model {
    RuleBase rules;
    Scaling scaling;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::optional<std::uint64_t> seed;

    bool operator==(const Model&) const = default;
};

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

/// Writes the versioned JSON model document. Reals round-trip bit-exactly.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace it2anfis
