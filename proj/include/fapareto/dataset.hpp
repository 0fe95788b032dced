#pragma once

// Tabular binary-classification data with a binary protected attribute,
// plus the pre-processing debiasing transforms (over/undersampling, CDA)
// and a synthetic biased-data generator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "fapareto/errors.hpp"
#include "fapareto/rng.hpp"
#include "fapareto/text.hpp"

namespace fapareto {

/// Row-major feature matrix with binary labels Y and binary groups G
/// (group 0 = male-analog, group 1 = female-analog).
struct dataset {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<double> features;  // n_rows * n_features, row-major
    std::vector<std::uint8_t> labels;
    std::vector<std::uint8_t> groups;

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }

    void append_row(std::span<const double> x, std::uint8_t label, std::uint8_t group) {
        features.insert(features.end(), x.begin(), x.end());
        labels.push_back(label);
        groups.push_back(group);
        ++n_rows;
    }
};

inline void validate(const dataset& d) {
    if (d.n_rows == 0) throw data_error("dataset is empty");
    if (d.features.size() != d.n_rows * d.n_features ||
        d.labels.size() != d.n_rows || d.groups.size() != d.n_rows)
        throw data_error("dataset arrays have inconsistent lengths");
    for (double v : d.features)
        if (!std::isfinite(v)) throw data_error("dataset contains a non-finite feature");
    for (std::size_t i = 0; i < d.n_rows; ++i)
        if (d.labels[i] > 1 || d.groups[i] > 1)
            throw data_error("dataset label/group outside {0,1} at row " + std::to_string(i));
}

/// Row indices of the four (group, label) cells; cell index = 2*group + label.
inline std::array<std::vector<std::size_t>, 4> group_label_cells(const dataset& d) {
    std::array<std::vector<std::size_t>, 4> cells;
    for (std::size_t i = 0; i < d.n_rows; ++i)
        cells[2 * d.groups[i] + d.labels[i]].push_back(i);
    return cells;
}

/// Fairness evaluation needs positives in both groups; silently reporting a
/// TPR gap over an empty cell would be misleading, so this is an error.
inline void require_fairness_cells(const dataset& d, const char* which = "dataset") {
    const auto cells = group_label_cells(d);
    for (int g = 0; g < 2; ++g)
        if (cells[2 * g + 1].empty())
            throw data_error(std::string(which) + ": no rows with group=" +
                             std::to_string(g) + ", label=1");
}

// ---------------------------------------------------------------------------
// Synthetic generator

/// Generator for a biased dataset: the group->label association is controlled
/// by label_group_correlation, and group_noise_gap flips a fraction of
/// (group=1, label=1) rows to label 0 after their features are drawn, which
/// induces a true-positive-rate gap in trained classifiers.
struct synth_config {
    std::size_t n = 4000;
    int input_dim = 8;
    double group_balance = 0.5;           // P(G=1)
    double label_group_correlation = 0.6; // beta in [0,1)
    double group_noise_gap = 0.2;         // eta in [0,0.5)
    std::uint64_t seed = 0;
};

inline void validate(const synth_config& cfg) {
    if (cfg.n < 10) throw config_error("synth: n must be >= 10");
    if (cfg.input_dim < 2) throw config_error("synth: input_dim must be >= 2");
    if (!(cfg.group_balance > 0.0 && cfg.group_balance < 1.0))
        throw config_error("synth: group_balance must be in (0,1)");
    if (!(cfg.label_group_correlation >= 0.0 && cfg.label_group_correlation < 1.0))
        throw config_error("synth: label_group_correlation must be in [0,1)");
    if (!(cfg.group_noise_gap >= 0.0 && cfg.group_noise_gap < 0.5))
        throw config_error("synth: group_noise_gap must be in [0,0.5)");
}

/// First half of the dims carries the label signal (+1 / -1 class means),
/// second half carries a group offset (+0.5 for group 1); unit Gaussian noise
/// on all dims. Label flips keep the already-drawn features.
inline dataset generate_synthetic(const synth_config& cfg) {
    validate(cfg);
    const auto d = static_cast<std::size_t>(cfg.input_dim);
    const std::size_t label_dims = d / 2;

    dataset out;
    out.n_features = d;
    out.features.reserve(cfg.n * d);
    out.labels.reserve(cfg.n);
    out.groups.reserve(cfg.n);

    rng_stream rng(derive_seed(cfg.seed, 0x5d47a));
    const double beta = cfg.label_group_correlation;
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const std::uint8_t g = rng.next_unit() < cfg.group_balance ? 1 : 0;
        const double p_pos = g == 0 ? 0.5 + beta / 2.0 : 0.5 - beta / 2.0;
        const std::uint8_t y_true = rng.next_unit() < p_pos ? 1 : 0;
        std::uint8_t y = y_true;
        if (g == 1 && y_true == 1 && rng.next_unit() < cfg.group_noise_gap) y = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const double mean = j < label_dims ? (y_true ? 1.0 : -1.0) : 0.5 * g;
            out.features.push_back(mean + rng.next_gaussian());
        }
        out.labels.push_back(y);
        out.groups.push_back(g);
        ++out.n_rows;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion
//
// Schema: UTF-8, header row; columns `label` and `group` hold 0/1, every
// remaining column is a feature (64-bit real), kept in header order.

inline dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open dataset file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw data_error(path.string() + ": missing header row");
    const auto header = split_fields(line);
    std::size_t label_col = header.size(), group_col = header.size();
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label")
            label_col = c;
        else if (header[c] == "group")
            group_col = c;
        else
            feature_cols.push_back(c);
    }
    if (label_col == header.size()) throw data_error(path.string() + ": no `label` column");
    if (group_col == header.size()) throw data_error(path.string() + ": no `group` column");
    if (feature_cols.empty()) throw data_error(path.string() + ": no feature columns");

    dataset d;
    d.n_features = feature_cols.size();
    std::size_t row = 0;
    auto cell_error = [&](std::size_t col, const std::string& what) {
        return data_error(path.string() + ": row " + std::to_string(row + 1) + ", column `" +
                          header[col] + "`: " + what);
    };
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw data_error(path.string() + ": row " + std::to_string(row + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        auto binary_cell = [&](std::size_t col) -> std::uint8_t {
            const auto v = try_parse_int(fields[col]);
            if (!v || (*v != 0 && *v != 1))
                throw cell_error(col, "expected 0 or 1, got `" + fields[col] + "`");
            return static_cast<std::uint8_t>(*v);
        };
        d.labels.push_back(binary_cell(label_col));
        d.groups.push_back(binary_cell(group_col));
        for (std::size_t c : feature_cols) {
            const auto v = try_parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw cell_error(c, "expected a finite number, got `" + fields[c] + "`");
            d.features.push_back(*v);
        }
        ++d.n_rows;
        ++row;
    }
    if (d.n_rows == 0) throw data_error(path.string() + ": no data rows");
    return d;
}

/// Canonical column order `label,group,f0,f1,...`; values round-trip exactly.
inline void save_csv(const dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write dataset file: " + path.string());
    out << "label,group";
    for (std::size_t j = 0; j < d.n_features; ++j) out << ",f" << j;
    out << '\n';
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        out << int(d.labels[i]) << ',' << int(d.groups[i]);
        for (double v : d.row(i)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw data_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Stratified split

struct split_fractions {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
};

struct data_split {
    dataset train, val, test;
};

namespace detail {

inline dataset take_rows(const dataset& d, std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());  // keep original row order within a split
    dataset out;
    out.n_features = d.n_features;
    for (std::size_t i : idx) out.append_row(d.row(i), d.labels[i], d.groups[i]);
    return out;
}

}  // namespace detail

/// Stratified (group,label)-cell split. Within each cell the rows are
/// apportioned by largest remainder, then adjusted so train and val each get
/// at least one row. Cells with fewer than two rows cannot satisfy that and
/// are a validation error.
inline data_split split(const dataset& d, const split_fractions& f, std::uint64_t seed) {
    if (!(f.train > 0 && f.val > 0 && f.test > 0))
        throw config_error("split: fractions must be positive");
    if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
        throw config_error("split: fractions must sum to 1");

    std::vector<std::size_t> tr, va, te;
    const auto cells = group_label_cells(d);
    for (std::size_t c = 0; c < 4; ++c) {
        auto rows = cells[c];
        if (rows.size() < 2)
            throw data_error("split: (group=" + std::to_string(c / 2) + ", label=" +
                             std::to_string(c % 2) + ") cell has " +
                             std::to_string(rows.size()) +
                             " rows; need at least one for train and one for val");
        rng_stream rng(derive_seed(seed, 0x5b117, c));
        shuffle(rows, rng);

        const double n = static_cast<double>(rows.size());
        const std::array<double, 3> ideal{n * f.train, n * f.val, n * f.test};
        std::array<std::size_t, 3> cnt{};
        for (int k = 0; k < 3; ++k) cnt[k] = static_cast<std::size_t>(ideal[k]);
        std::size_t assigned = cnt[0] + cnt[1] + cnt[2];
        // largest fractional remainder; ties resolved train > val > test
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
        });
        for (int k = 0; assigned < rows.size(); ++k, ++assigned) ++cnt[order[k % 3]];
        auto steal = [&](int into) {
            int from = cnt[2] > 0 ? 2 : (into == 0 ? 1 : 0);
            --cnt[from];
            ++cnt[into];
        };
        if (cnt[0] == 0) steal(0);
        if (cnt[1] == 0) steal(1);

        std::size_t pos = 0;
        for (std::size_t k = 0; k < cnt[0]; ++k) tr.push_back(rows[pos++]);
        for (std::size_t k = 0; k < cnt[1]; ++k) va.push_back(rows[pos++]);
        for (std::size_t k = 0; k < cnt[2]; ++k) te.push_back(rows[pos++]);
    }
    return {detail::take_rows(d, std::move(tr)), detail::take_rows(d, std::move(va)),
            detail::take_rows(d, std::move(te))};
}

// ---------------------------------------------------------------------------
// Pre-processing debiasing transforms

/// Duplicates rows (with replacement) until all four (group,label) cells
/// reach the largest cell's count. Original rows keep their order; duplicates
/// are appended in cell order.
inline dataset oversample(const dataset& d, std::uint64_t seed) {
    const auto cells = group_label_cells(d);
    std::size_t target = 0;
    for (const auto& c : cells) {
        if (c.empty()) throw data_error("oversample: empty (group,label) cell");
        target = std::max(target, c.size());
    }
    dataset out = d;
    for (std::size_t c = 0; c < 4; ++c) {
        rng_stream rng(derive_seed(seed, 0x05e2, c));
        for (std::size_t k = cells[c].size(); k < target; ++k) {
            const std::size_t i = cells[c][rng.next_below(cells[c].size())];
            out.append_row(d.row(i), d.labels[i], d.groups[i]);
        }
    }
    return out;
}

/// Keeps a without-replacement sample of the smallest cell's count from every
/// cell; surviving rows stay in original order.
inline dataset undersample(const dataset& d, std::uint64_t seed) {
    const auto cells = group_label_cells(d);
    std::size_t target = d.n_rows;
    for (const auto& c : cells) {
        if (c.empty()) throw data_error("undersample: empty (group,label) cell");
        target = std::min(target, c.size());
    }
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < 4; ++c) {
        auto rows = cells[c];
        rng_stream rng(derive_seed(seed, 0x07de2, c));
        for (std::size_t k = 0; k < target; ++k) {
            const std::size_t j = k + rng.next_below(rows.size() - k);
            std::swap(rows[k], rows[j]);
            keep.push_back(rows[k]);
        }
    }
    return detail::take_rows(d, std::move(keep));
}

/// Counterfactual augmentation: appends for every row a copy with the group
/// flipped and the group-conditional feature offset mirrored,
/// x' = x - mu(g) + mu(1-g), where mu(g) is the per-group feature mean of d.
/// Tabular analog of swapping protected-attribute markers in text.
inline dataset cda_augment(const dataset& d) {
    validate(d);
    std::array<std::vector<double>, 2> mu{std::vector<double>(d.n_features, 0.0),
                                          std::vector<double>(d.n_features, 0.0)};
    std::array<std::size_t, 2> cnt{0, 0};
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        const auto g = d.groups[i];
        ++cnt[g];
        const auto x = d.row(i);
        for (std::size_t j = 0; j < d.n_features; ++j) mu[g][j] += x[j];
    }
    for (int g = 0; g < 2; ++g) {
        if (cnt[g] == 0)
            throw data_error("cda_augment: group " + std::to_string(g) + " has no rows");
        for (double& v : mu[g]) v /= static_cast<double>(cnt[g]);
    }
    dataset out = d;
    std::vector<double> x(d.n_features);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        const auto g = d.groups[i];
        const auto src = d.row(i);
        for (std::size_t j = 0; j < d.n_features; ++j)
            x[j] = src[j] - mu[g][j] + mu[1 - g][j];
        out.append_row(x, d.labels[i], static_cast<std::uint8_t>(1 - g));
    }
    return out;
}

}  // namespace fapareto
