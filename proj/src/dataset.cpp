#include "it2anfis/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace it2anfis {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double quotes group commas; "" inside quotes is a literal quote.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::optional<double> parse_real(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace

std::size_t RawTable::target_index() const {
    auto it = std::find(column_names.begin(), column_names.end(), target_column);
    if (it == column_names.end()) throw DataError("target column '" + target_column + "' not found");
    return static_cast<std::size_t>(it - column_names.begin());
}

std::vector<std::size_t> RawTable::feature_indices() const {
    const auto t = target_index();
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        if (c != t) out.push_back(c);
    }
    return out;
}

std::vector<std::string> RawTable::feature_names() const {
    std::vector<std::string> out;
    for (auto c : feature_indices()) out.push_back(column_names[c]);
    return out;
}

std::vector<double> Dataset::rows_y(const std::vector<std::size_t>& idx) const {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(y[i]);
    return out;
}

void SyntheticSpec::validate() const {
    if (n_samples < 10) throw DataError("synthetic spec: n_samples must be >= 10");
    if (n_features < 1) throw DataError("synthetic spec: n_features must be >= 1");
    if (n_latent_rules < 1) throw DataError("synthetic spec: n_latent_rules must be >= 1");
    if (!(noise_std >= 0.0)) throw DataError("synthetic spec: noise_std must be >= 0");
}

RawTable load_csv(const std::filesystem::path& path, const std::string& target_column,
                  const std::optional<std::string>& date_column,
                  const std::vector<std::string>& ignore_columns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path.string() + "': missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto header = split_record(line);

    RawTable table;
    table.target_column = target_column;
    table.date_column = date_column;

    std::vector<std::size_t> numeric_cols;
    std::optional<std::size_t> date_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (date_column && header[c] == *date_column) {
            date_col = c;
            table.skipped_columns.push_back(header[c]);
        } else if (contains(ignore_columns, header[c])) {
            table.skipped_columns.push_back(header[c]);
        } else {
            numeric_cols.push_back(c);
            table.column_names.push_back(header[c]);
        }
    }
    if (!contains(table.column_names, target_column)) {
        throw DataError("'" + path.string() + "': target column '" + target_column + "' not in header");
    }
    if (date_column && !date_col) {
        throw DataError("'" + path.string() + "': date column '" + *date_column + "' not in header");
    }

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_record(line);
        if (cells.size() != header.size()) {
            ++table.dropped_count;
            continue;
        }
        std::vector<double> row;
        row.reserve(numeric_cols.size());
        bool ok = true;
        for (auto c : numeric_cols) {
            auto v = parse_real(cells[c]);
            if (!v || !std::isfinite(*v)) {
                ok = false;
                break;
            }
            row.push_back(*v);
        }
        if (!ok) {
            ++table.dropped_count;
            continue;
        }
        table.rows.push_back(std::move(row));
        if (date_col) table.dates.push_back(cells[*date_col]);
    }
    if (table.rows.empty()) throw DataError("'" + path.string() + "': zero usable rows");
    return table;
}

Matrix load_feature_csv(const std::filesystem::path& path, const std::vector<std::string>& feature_names) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) return Matrix(0, feature_names.size());
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    const auto header = split_record(line);

    std::vector<std::size_t> cols;
    for (const auto& name : feature_names) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError("'" + path.string() + "': feature column '" + name + "' missing (model expects " +
                            std::to_string(feature_names.size()) + " features, input has " +
                            std::to_string(header.size()) + " columns)");
        }
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    Matrix X(0, feature_names.size());
    std::vector<double> row(feature_names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_record(line);
        if (cells.size() != header.size()) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t f = 0; f < cols.size(); ++f) {
            auto v = parse_real(cells[cols[f]]);
            if (!v || !std::isfinite(*v)) {
                throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": column '" +
                                feature_names[f] + "' is not a finite number");
            }
            row[f] = *v;
        }
        X.append_row(row);
    }
    return X;
}

void write_csv(const RawTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    const bool with_date = table.date_column && table.dates.size() == table.rows.size();
    if (with_date) out << *table.date_column << ',';
    for (std::size_t c = 0; c < table.column_names.size(); ++c) {
        out << (c ? "," : "") << table.column_names[c];
    }
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (with_date) out << table.dates[r] << ',';
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", table.rows[r][c]);
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
}

Split split_sizes_for(std::size_t n) {
    Split s;
    const auto n_train = static_cast<std::size_t>(std::llround(0.64 * static_cast<double>(n)));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(0.16 * static_cast<double>(n))));
    s.train.resize(n_train);
    s.val.resize(n_val);
    s.test.resize(n - n_train - n_val);
    return s;
}

Dataset normalize_and_split(const RawTable& raw, std::uint64_t seed) {
    const std::size_t n = raw.rows.size();
    if (n < 10) throw DataError("need at least 10 rows, got " + std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    Dataset ds;
    ds.split = split_sizes_for(n);
    auto cursor = order.begin();
    for (auto* part : {&ds.split.train, &ds.split.val, &ds.split.test}) {
        std::copy_n(cursor, part->size(), part->begin());
        cursor += static_cast<std::ptrdiff_t>(part->size());
        std::sort(part->begin(), part->end());
    }

    const auto t = raw.target_index();
    const auto features = raw.feature_indices();
    ds.feature_names = raw.feature_names();
    ds.target_name = raw.target_column;

    for (auto c : features) {
        MinMaxScaler s{raw.rows[ds.split.train.front()][c], raw.rows[ds.split.train.front()][c]};
        for (auto i : ds.split.train) {
            s.min = std::min(s.min, raw.rows[i][c]);
            s.max = std::max(s.max, raw.rows[i][c]);
        }
        if (!(s.max > s.min)) {
            throw DataError("feature column '" + raw.column_names[c] + "' is constant on the training split");
        }
        ds.feature_scalers.push_back(s);
    }

    double sum = 0.0;
    for (auto i : ds.split.train) sum += raw.rows[i][t];
    const double mean = sum / static_cast<double>(ds.split.train.size());
    double ss = 0.0;
    for (auto i : ds.split.train) ss += (raw.rows[i][t] - mean) * (raw.rows[i][t] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(ds.split.train.size()));
    if (!(sd > 0.0)) throw DataError("target column '" + raw.target_column + "' is constant on the training split");
    ds.target_scaler = {mean, sd};

    ds.X = Matrix(n, features.size());
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < features.size(); ++f) {
            ds.X(i, f) = ds.feature_scalers[f].transform(raw.rows[i][features[f]]);
        }
        ds.y[i] = ds.target_scaler.transform(raw.rows[i][t]);
    }
    return ds;
}

Matrix apply_feature_scalers(const Matrix& raw_features, const std::vector<MinMaxScaler>& scalers) {
    if (raw_features.cols() != scalers.size() && !raw_features.empty()) {
        throw DataError("feature arity " + std::to_string(raw_features.cols()) + " does not match " +
                        std::to_string(scalers.size()) + " scalers");
    }
    Matrix out(raw_features.rows(), scalers.size());
    for (std::size_t i = 0; i < raw_features.rows(); ++i) {
        for (std::size_t f = 0; f < scalers.size(); ++f) out(i, f) = scalers[f].transform(raw_features(i, f));
    }
    return out;
}

Matrix extract_columns(const RawTable& table, const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        auto it = std::find(table.column_names.begin(), table.column_names.end(), name);
        if (it == table.column_names.end()) throw DataError("input is missing feature column '" + name + "'");
        cols.push_back(static_cast<std::size_t>(it - table.column_names.begin()));
    }
    Matrix out(table.rows.size(), cols.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t f = 0; f < cols.size(); ++f) out(i, f) = table.rows[i][cols[f]];
    }
    return out;
}

RawTable generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t F = spec.n_features;
    const std::size_t K = spec.n_latent_rules;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Original-unit offsets and spans so that features look like raw sensor columns.
    std::vector<double> offset(F), span(F);
    for (std::size_t f = 0; f < F; ++f) {
        offset[f] = 100.0 * unit(rng);
        span[f] = 1.0 + 49.0 * unit(rng);
    }

    // Latent local linear models in unit-cube coordinates, gated by Gaussian bumps.
    Matrix centers(K, F), slopes(K, F);
    std::vector<double> intercepts(K);
    const double inv_sqrt_f = 1.0 / std::sqrt(static_cast<double>(F));
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t f = 0; f < F; ++f) centers(k, f) = unit(rng);
        for (std::size_t f = 0; f < F; ++f) slopes(k, f) = 2.0 * normal(rng) * inv_sqrt_f;
        intercepts[k] = normal(rng);
    }
    const double gate_width = 0.25 * std::sqrt(static_cast<double>(F));

    RawTable table;
    for (std::size_t f = 0; f < F; ++f) table.column_names.push_back("x" + std::to_string(f + 1));
    table.column_names.push_back("energy_mwh");
    table.target_column = "energy_mwh";

    std::vector<double> u(F), logits(K);
    for (std::size_t n = 0; n < spec.n_samples; ++n) {
        for (std::size_t f = 0; f < F; ++f) u[f] = unit(rng);
        for (std::size_t k = 0; k < K; ++k) {
            double d2 = 0.0;
            for (std::size_t f = 0; f < F; ++f) d2 += (u[f] - centers(k, f)) * (u[f] - centers(k, f));
            logits[k] = -0.5 * d2 / (gate_width * gate_width);
        }
        const double top = *std::max_element(logits.begin(), logits.end());
        double z = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double g = std::exp(logits[k] - top);
            double local = intercepts[k];
            for (std::size_t f = 0; f < F; ++f) local += slopes(k, f) * u[f];
            z += g;
            acc += g * local;
        }
        const double noise = spec.noise_std > 0.0 ? spec.noise_std * normal(rng) : 0.0;

        std::vector<double> row(F + 1);
        for (std::size_t f = 0; f < F; ++f) row[f] = offset[f] + span[f] * u[f];
        row[F] = 260.0 + 40.0 * (acc / z) + noise;
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace it2anfis
