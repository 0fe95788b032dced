#pragma once

// Offspring generation: two-parent weight merging as crossover and
// std-scaled Gaussian parameter noise as mutation.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fapareto/errors.hpp"
#include "fapareto/model.hpp"
#include "fapareto/pareto.hpp"
#include "fapareto/rng.hpp"

namespace fapareto {

/// Elementwise affine merge of two parents with identical architectures:
/// child = alpha * p1 + (1 - alpha) * p2. Computed with std::lerp so that
/// merging a parent with itself, alpha = 0, and alpha = 1 are all exact.
inline param_vector merge_crossover(const param_vector& p1, const param_vector& p2,
                                    double alpha = 0.5) {
    if (!(p1.arch == p2.arch)) throw config_error("merge_crossover: architecture mismatch");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw config_error("merge_crossover: alpha must be in [0,1]");
    param_vector child = p2;
    for (std::size_t i = 0; i < child.values.size(); ++i)
        child.values[i] = std::lerp(p2.values[i], p1.values[i], alpha);
    return child;
}

/// Adds i.i.d. Normal(0, (lambda * std(t))^2) noise per tensor t, where
/// std(t) is taken over that tensor's current entries. Constant tensors
/// (zero std, e.g. freshly zeroed biases) and single-element tensors are
/// left untouched, so the noise scale always reflects real parameter spread.
inline param_vector gaussian_mutate(const param_vector& p, double lambda, std::uint64_t seed) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw config_error("gaussian_mutate: lambda must be finite and >= 0");
    param_vector out = p;
    if (lambda == 0.0) return out;
    rng_stream rng(derive_seed(seed, 0x309a));
    for (const auto& t : out.layout) {
        const std::size_t n = t.size();
        if (n <= 1) continue;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += out.values[t.offset + i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dv = out.values[t.offset + i] - mean;
            var += dv * dv;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        if (sd == 0.0) continue;
        const double scale = lambda * sd;
        for (std::size_t i = 0; i < n; ++i)
            out.values[t.offset + i] += scale * rng.next_gaussian();
    }
    return out;
}

/// Fairness-guided diversity generation: `count` offspring, each from two
/// distinct parents drawn uniformly from the mating pool, merged and then
/// mutated. Every offspring uses a sub-seed derived from (seed, offspring
/// index), so the result is independent of generation order.
inline std::vector<param_vector> fgdg_generate(std::span<const individual> pop,
                                               std::span<const std::size_t> pool,
                                               std::size_t count, double lambda,
                                               double alpha, std::uint64_t seed) {
    if (pool.size() < 2) throw config_error("fgdg_generate: pool needs at least 2 entries");
    if (count < 1) throw config_error("fgdg_generate: count must be >= 1");
    std::vector<param_vector> offspring;
    offspring.reserve(count);
    for (std::size_t o = 0; o < count; ++o) {
        const std::uint64_t sub = derive_seed(seed, 0xf9d9, o);
        rng_stream rng(sub);
        const auto i = static_cast<std::size_t>(rng.next_below(pool.size()));
        auto j = static_cast<std::size_t>(rng.next_below(pool.size() - 1));
        if (j >= i) ++j;  // two distinct pool slots
        const auto& p1 = pop[pool[i]].params;
        const auto& p2 = pop[pool[j]].params;
        offspring.push_back(
            gaussian_mutate(merge_crossover(p1, p2, alpha), lambda, derive_seed(sub, 0x30b)));
    }
    return offspring;
}

}  // namespace fapareto
