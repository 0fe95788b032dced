#pragma once

// Exact 2-D hypervolume (minimization) by dimension sweep.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fapareto/errors.hpp"
#include "fapareto/metrics.hpp"

namespace fapareto {

/// Area dominated by `points` inside the box bounded by `ref`. Dominated and
/// out-of-box points contribute nothing; points on the box boundary count as
/// outside (their rectangle would be degenerate). Empty effective set -> 0.
inline double hypervolume_2d(std::span<const objective_point> points,
                             const objective_point& ref = {1.0, 1.0}) {
    if (!std::isfinite(ref.error) || !std::isfinite(ref.delta_tpr))
        throw config_error("hypervolume_2d: non-finite reference point");
    std::vector<objective_point> inside;
    for (const auto& p : points) {
        if (!std::isfinite(p.error) || !std::isfinite(p.delta_tpr))
            throw config_error("hypervolume_2d: non-finite point");
        if (p.error < ref.error && p.delta_tpr < ref.delta_tpr) inside.push_back(p);
    }
    if (inside.empty()) return 0.0;
    std::sort(inside.begin(), inside.end(), [](const auto& a, const auto& b) {
        return a.error < b.error || (a.error == b.error && a.delta_tpr < b.delta_tpr);
    });
    // after the sort, the non-dominated subset is the strictly-descending
    // staircase in delta_tpr
    std::vector<objective_point> front;
    for (const auto& p : inside)
        if (front.empty() || p.delta_tpr < front.back().delta_tpr) front.push_back(p);
    double hv = 0.0;
    for (std::size_t i = 0; i < front.size(); ++i) {
        const double next_error = i + 1 < front.size() ? front[i + 1].error : ref.error;
        hv += (next_error - front[i].error) * (ref.delta_tpr - front[i].delta_tpr);
    }
    return hv;
}

/// Hypervolume of each snapshot in order (one per generation).
inline std::vector<double> hv_curve(std::span<const std::vector<objective_point>> snapshots,
                                    const objective_point& ref = {1.0, 1.0}) {
    if (snapshots.empty()) throw config_error("hv_curve: no snapshots");
    std::vector<double> curve;
    curve.reserve(snapshots.size());
    for (const auto& snap : snapshots) curve.push_back(hypervolume_2d(snap, ref));
    return curve;
}

}  // namespace fapareto
