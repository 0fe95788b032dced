#pragma once

// Pareto machinery: dominance, fast non-dominated sorting, crowding distance,
// NSGA-II style fitness and environmental selection, binary-tournament mating
// pool, and the run archive of non-dominated solutions. All tie-breaking is
// deterministic (input order or ascending id), so runs are bit-reproducible.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fapareto/errors.hpp"
#include "fapareto/metrics.hpp"
#include "fapareto/model.hpp"
#include "fapareto/rng.hpp"

namespace fapareto {

/// True iff a is no worse in both objectives and strictly better in one
/// (minimization).
inline bool dominates(const objective_point& a, const objective_point& b) {
    return a.error <= b.error && a.delta_tpr <= b.delta_tpr &&
           (a.error < b.error || a.delta_tpr < b.delta_tpr);
}

/// Non-domination rank plus crowding distance within the rank's front.
struct fitness {
    int rank = 0;
    double crowding = 0.0;
};

struct individual {
    std::uint64_t id = 0;
    param_vector params;
    std::optional<objective_point> objectives;
    std::optional<fitness> fit;
};

/// Fast non-dominated sort (Deb et al., NSGA-II). Front k holds the indices
/// that become non-dominated once fronts < k are removed; each front lists
/// its indices in input order.
inline std::vector<std::vector<std::size_t>> nondominated_sort(
    std::span<const objective_point> points) {
    const std::size_t n = points.size();
    if (n == 0) throw config_error("nondominated_sort: empty input");
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            if (dominates(points[i], points[j])) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dominates(points[j], points[i])) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    std::vector<int> rank(n, 0);
    std::vector<std::size_t> current;
    int max_rank = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current)
            for (std::size_t q : dominated[p])
                if (--count[q] == 0) {
                    rank[q] = rank[p] + 1;
                    max_rank = std::max(max_rank, rank[q]);
                    next.push_back(q);
                }
        current = std::move(next);
    }
    std::vector<std::vector<std::size_t>> fronts(static_cast<std::size_t>(max_rank) + 1);
    for (std::size_t i = 0; i < n; ++i) fronts[rank[i]].push_back(i);
    return fronts;
}

/// Indices of the non-dominated subset, in input order.
inline std::vector<std::size_t> nondominated_subset(std::span<const objective_point> points) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated_by_any = false;
        for (std::size_t j = 0; j < points.size(); ++j)
            if (j != i && dominates(points[j], points[i])) {
                dominated_by_any = true;
                break;
            }
        if (!dominated_by_any) front.push_back(i);
    }
    return front;
}

/// NSGA-II crowding distance over one front. Boundary points per objective
/// get +inf; interior points sum normalized neighbor gaps. Fronts of size
/// <= 2 are all +inf; an objective with zero range contributes nothing.
inline std::vector<double> crowding_distance(std::span<const objective_point> front) {
    const std::size_t m = front.size();
    if (m == 0) throw config_error("crowding_distance: empty front");
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (m <= 2) return std::vector<double>(m, inf);
    std::vector<double> dist(m, 0.0);
    std::vector<std::size_t> order(m);
    for (int obj = 0; obj < 2; ++obj) {
        auto coord = [&](std::size_t i) {
            return obj == 0 ? front[i].error : front[i].delta_tpr;
        };
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return coord(a) < coord(b); });
        const double range = coord(order.back()) - coord(order.front());
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (range == 0.0) continue;
        for (std::size_t k = 1; k + 1 < m; ++k)
            dist[order[k]] += (coord(order[k + 1]) - coord(order[k - 1])) / range;
    }
    return dist;
}

/// Sets (rank, crowding) on every individual. Objectives must be set.
inline void assign_fitness(std::vector<individual>& pop) {
    std::vector<objective_point> points;
    points.reserve(pop.size());
    for (const auto& ind : pop) {
        if (!ind.objectives)
            throw config_error("assign_fitness: individual " + std::to_string(ind.id) +
                               " has no objectives");
        points.push_back(*ind.objectives);
    }
    const auto fronts = nondominated_sort(points);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        std::vector<objective_point> front_points;
        front_points.reserve(fronts[r].size());
        for (std::size_t i : fronts[r]) front_points.push_back(points[i]);
        const auto crowd = crowding_distance(front_points);
        for (std::size_t k = 0; k < fronts[r].size(); ++k)
            pop[fronts[r][k]].fit = fitness{static_cast<int>(r), crowd[k]};
    }
}

/// Strict "a is fitter than b": lower rank, then larger crowding, then lower
/// id. Total order over any population, which keeps tournaments and
/// truncation deterministic.
inline bool fitter(const individual& a, const individual& b) {
    if (!a.fit || !b.fit) throw config_error("fitter: fitness not assigned");
    if (a.fit->rank != b.fit->rank) return a.fit->rank < b.fit->rank;
    if (a.fit->crowding != b.fit->crowding) return a.fit->crowding > b.fit->crowding;
    return a.id < b.id;
}

/// k winners of independent binary tournaments (uniform draws with
/// replacement). Returns indices into pop.
inline std::vector<std::size_t> mating_pool(std::span<const individual> pop, std::size_t k,
                                            std::uint64_t seed) {
    if (pop.empty()) throw config_error("mating_pool: empty population");
    if (k < 2) throw config_error("mating_pool: pool size must be >= 2");
    rng_stream rng(seed);
    std::vector<std::size_t> pool;
    pool.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
        const auto i = static_cast<std::size_t>(rng.next_below(pop.size()));
        const auto j = static_cast<std::size_t>(rng.next_below(pop.size()));
        pool.push_back(fitter(pop[i], pop[j]) ? i : j);
    }
    return pool;
}

/// NSGA-II environmental selection: whole fronts while they fit, then the
/// last admitted front truncated by descending crowding (ties by ascending
/// id). Individuals keep the fitness they carried in.
inline std::vector<individual> pareto_selection(std::vector<individual> unified,
                                                std::size_t target) {
    if (unified.size() < target)
        throw config_error("pareto_selection: union smaller than target");
    if (target == 0) return {};
    std::vector<objective_point> points;
    points.reserve(unified.size());
    for (const auto& ind : unified) {
        if (!ind.objectives)
            throw config_error("pareto_selection: individual has no objectives");
        points.push_back(*ind.objectives);
    }
    const auto fronts = nondominated_sort(points);
    std::vector<individual> selected;
    selected.reserve(target);
    for (const auto& front : fronts) {
        if (selected.size() == target) break;
        if (selected.size() + front.size() <= target) {
            for (std::size_t i : front) selected.push_back(std::move(unified[i]));
            continue;
        }
        std::vector<objective_point> front_points;
        front_points.reserve(front.size());
        for (std::size_t i : front) front_points.push_back(points[i]);
        const auto crowd = crowding_distance(front_points);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (crowd[a] != crowd[b]) return crowd[a] > crowd[b];
            return unified[front[a]].id < unified[front[b]].id;
        });
        for (std::size_t k = 0; selected.size() < target; ++k)
            selected.push_back(std::move(unified[front[order[k]]]));
        break;
    }
    return selected;
}

/// One non-dominated solution kept by the run.
struct archive_entry {
    std::uint64_t id = 0;
    objective_point point;
    param_vector params;
};

/// Running store of all non-dominated solutions. Entries are pairwise
/// non-dominated and have pairwise distinct objective points (the first
/// inserted of an exact duplicate is kept).
struct archive {
    std::vector<archive_entry> entries;
};

inline void update_archive(archive& ar, std::span<const individual> newcomers) {
    for (const auto& ind : newcomers) {
        if (!ind.objectives)
            throw config_error("update_archive: newcomer " + std::to_string(ind.id) +
                               " has no objectives");
        const objective_point pt = *ind.objectives;
        bool rejected = false;
        for (const auto& e : ar.entries)
            if (e.point == pt || dominates(e.point, pt)) {
                rejected = true;
                break;
            }
        if (rejected) continue;
        std::erase_if(ar.entries,
                      [&](const archive_entry& e) { return dominates(pt, e.point); });
        ar.entries.push_back({ind.id, pt, ind.params});
    }
}

}  // namespace fapareto
