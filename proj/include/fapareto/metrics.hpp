#pragma once

// The two objectives: classification error (1 - accuracy) and the
// true-positive-rate gap between the protected groups, plus the Pearson
// correlation used in the trade-off analysis.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fapareto/dataset.hpp"
#include "fapareto/errors.hpp"
#include "fapareto/model.hpp"

namespace fapareto {

/// A point in objective space: both coordinates in [0,1], minimized.
struct objective_point {
    double error = 0.0;
    double delta_tpr = 0.0;

    friend bool operator==(const objective_point&, const objective_point&) = default;
};

using labels_view = std::span<const std::uint8_t>;

inline double accuracy(labels_view preds, labels_view truth) {
    if (preds.size() != truth.size())
        throw config_error("accuracy: prediction/truth length mismatch");
    if (preds.empty()) throw config_error("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

/// Empirical P[pred = y | group = g, truth = y].
inline double group_tpr(labels_view preds, labels_view truth, labels_view groups, int g, int y) {
    if (preds.size() != truth.size() || preds.size() != groups.size())
        throw config_error("group_tpr: array length mismatch");
    std::size_t cell = 0, correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (groups[i] != g || truth[i] != y) continue;
        ++cell;
        correct += preds[i] == y;
    }
    if (cell == 0)
        throw data_error("group_tpr: no rows with group=" + std::to_string(g) +
                         ", label=" + std::to_string(y) + "; TPR undefined");
    return static_cast<double>(correct) / static_cast<double>(cell);
}

/// |TPR(group 1) - TPR(group 0)| for the positive class. For a binary task
/// the label-0 gap would be the false-positive-rate gap, a different
/// quantity, so the gap is computed for y = 1 only.
inline double delta_tpr(labels_view preds, labels_view truth, labels_view groups) {
    return std::abs(group_tpr(preds, truth, groups, 1, 1) -
                    group_tpr(preds, truth, groups, 0, 1));
}

/// Predicts every row of d and returns (1 - accuracy, delta_tpr).
inline objective_point evaluate_objectives(const param_vector& p, const dataset& d) {
    require_fairness_cells(d, "evaluate_objectives");
    const auto preds = predict_all(p, d);
    return {1.0 - accuracy(preds, d.labels), delta_tpr(preds, d.labels, d.groups)};
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw config_error("pearson: length mismatch");
    if (xs.size() < 2) throw config_error("pearson: need at least 2 points");
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw config_error("pearson: correlation undefined (zero variance)");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace fapareto
