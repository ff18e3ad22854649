#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "it2anfis/matrix.hpp"

namespace it2anfis {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tabular data as read from disk: every retained row is fully finite.
struct RawTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> rows;
    std::string target_column;
    std::optional<std::string> date_column;
    /// Names of columns carried in the file but never parsed (date, ignored ids).
    std::vector<std::string> skipped_columns;
    /// Date column values, aligned with rows (empty when no date column).
    std::vector<std::string> dates;
    std::size_t dropped_count = 0;

    std::size_t target_index() const;
    /// Indices of modelling features: every numeric column except the target.
    std::vector<std::size_t> feature_indices() const;
    std::vector<std::string> feature_names() const;
};

struct MinMaxScaler {
    double min = 0.0;
    double max = 1.0;

    double transform(double x) const { return (x - min) / (max - min); }
    double inverse(double u) const { return min + u * (max - min); }
    bool operator==(const MinMaxScaler&) const = default;
};

struct StandardScaler {
    double mean = 0.0;
    double std = 1.0;

    double transform(double y) const { return (y - mean) / std; }
    double inverse(double z) const { return z * std + mean; }
    bool operator==(const StandardScaler&) const = default;
};

/// Scalers needed to move between original and model units.
struct Scaling {
    std::vector<MinMaxScaler> features;
    StandardScaler target;
    bool operator==(const Scaling&) const = default;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
    bool operator==(const Split&) const = default;
};

/// Normalized data set. Features are min-max scaled and the target z-scored,
/// both fitted on the training split only.
struct Dataset {
    Matrix X;
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::vector<MinMaxScaler> feature_scalers;
    StandardScaler target_scaler;
    Split split;

    Scaling scaling() const { return {feature_scalers, target_scaler}; }
    std::size_t n_samples() const { return X.rows(); }
    std::size_t n_features() const { return X.cols(); }

    Matrix rows_X(const std::vector<std::size_t>& idx) const { return X.select_rows(idx); }
    std::vector<double> rows_y(const std::vector<std::size_t>& idx) const;

    bool operator==(const Dataset&) const = default;
};

struct SyntheticSpec {
    std::size_t n_samples = 1000;
    std::size_t n_features = 13;
    std::size_t n_latent_rules = 4;
    double noise_std = 5.0;  // MWh
    std::uint64_t seed = 0;

    void validate() const;
};

/// Reads a comma-separated file with a header row. Rows with an unparseable or
/// non-finite cell in any numeric column are dropped and counted.
RawTable load_csv(const std::filesystem::path& path, const std::string& target_column,
                  const std::optional<std::string>& date_column = std::nullopt,
                  const std::vector<std::string>& ignore_columns = {});

/// Writes a RawTable back to CSV with round-trip precision.
/// Reads the named feature columns of a CSV in original units, one matrix row
/// per data record. Other columns are ignored; a header-only file yields zero
/// rows. Throws when a column is absent or a cell is not a finite number.
Matrix load_feature_csv(const std::filesystem::path& path, const std::vector<std::string>& feature_names);

void write_csv(const RawTable& table, const std::filesystem::path& path);

/// Split sizes for n records: round(0.64 n) train, round(0.16 n) val, rest test.
Split split_sizes_for(std::size_t n);

Dataset normalize_and_split(const RawTable& raw, std::uint64_t seed);

inline double inverse_target(double y_norm, const StandardScaler& scaler) {
    return scaler.inverse(y_norm);
}

/// Applies stored feature scalers to raw feature rows (original units).
Matrix apply_feature_scalers(const Matrix& raw_features, const std::vector<MinMaxScaler>& scalers);

/// Selects the named columns of a table as a feature matrix in original units.
Matrix extract_columns(const RawTable& table, const std::vector<std::string>& names);

RawTable generate_synthetic(const SyntheticSpec& spec);

}  // namespace it2anfis
