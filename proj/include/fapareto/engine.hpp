#pragma once

// End-to-end evolutionary run: initialize and tune a population, then per
// generation mate / merge+mutate / tune / evaluate / archive / select.
// Also the six single-model debiasing baselines used for comparison.
//
// Seed discipline: every stochastic act draws from a stream derived by a
// stable hash of (master_seed, purpose, generation, index). Work items are
// therefore independent of scheduling, and results are byte-identical for
// any worker count.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "fapareto/dataset.hpp"
#include "fapareto/errors.hpp"
#include "fapareto/hypervolume.hpp"
#include "fapareto/metrics.hpp"
#include "fapareto/model.hpp"
#include "fapareto/pareto.hpp"
#include "fapareto/rng.hpp"
#include "fapareto/variation.hpp"

namespace fapareto {

namespace detail {

// purpose tags for seed derivation
namespace tag {
inline constexpr std::uint64_t split = 0x9051;
inline constexpr std::uint64_t trial = 0x7214;
inline constexpr std::uint64_t init = 0x1237;
inline constexpr std::uint64_t tune_init = 0x70e1;
inline constexpr std::uint64_t pool = 0x9001;
inline constexpr std::uint64_t offspring = 0x0f53;
inline constexpr std::uint64_t tune_child = 0x70e2;
inline constexpr std::uint64_t baseline = 0xba5e;
inline constexpr std::uint64_t sampler = 0x5a3b;
inline constexpr std::uint64_t model = 0x30de;
}  // namespace tag

/// Runs body(0..n-1) on up to `workers` threads. Each index owns its output
/// slot, so the result does not depend on the schedule.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned count = static_cast<unsigned>(
        std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        std::size_t i;
        while (!failed.load(std::memory_order_relaxed) &&
               (i = next.fetch_add(1)) < n) {
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Full configuration of an experiment. `trials` is consumed by the CLI
/// driver; run_moel executes the single trial selected by trial_index.
/// The dataset and split depend only on the source config and master seed,
/// so all trials of one experiment share them and their fronts live in the
/// same objective space.
struct run_config {
    std::size_t population_size = 50;
    int generations = 20;
    int trials = 10;
    int trial_index = 0;
    double mutation_lambda = 0.02;
    double merge_alpha = 0.5;
    train_config train;
    architecture arch{.input_dim = 0};  // input_dim 0: infer from the data
    std::variant<synth_config, std::filesystem::path> source = synth_config{};
    split_fractions fractions;
    std::uint64_t master_seed = 1;
    objective_point hv_ref{1.0, 1.0};
    int baseline_epochs = 0;  // 0: generations * epochs_per_tune
    unsigned worker_count = 1;
};

inline void validate(const run_config& cfg) {
    if (cfg.population_size < 2) throw config_error("run: population_size must be >= 2");
    if (cfg.generations < 1) throw config_error("run: generations must be >= 1");
    if (cfg.trials < 1) throw config_error("run: trials must be >= 1");
    if (cfg.trial_index < 0 || cfg.trial_index >= cfg.trials)
        throw config_error("run: trial_index out of range");
    if (!(cfg.mutation_lambda >= 0.0)) throw config_error("run: mutation_lambda must be >= 0");
    if (!(cfg.merge_alpha >= 0.0 && cfg.merge_alpha <= 1.0))
        throw config_error("run: merge_alpha must be in [0,1]");
    if (!(std::isfinite(cfg.hv_ref.error) && std::isfinite(cfg.hv_ref.delta_tpr)))
        throw config_error("run: hv_ref must be finite");
    if (cfg.baseline_epochs < 0) throw config_error("run: baseline_epochs must be >= 0");
    validate(cfg.train);
    for (int h : cfg.arch.hidden_dims)
        if (h < 1) throw config_error("run: hidden dims must be >= 1");
    if (const auto* synth = std::get_if<synth_config>(&cfg.source)) validate(*synth);
}

inline dataset load_run_dataset(const run_config& cfg) {
    if (const auto* synth = std::get_if<synth_config>(&cfg.source))
        return generate_synthetic(*synth);
    return load_csv(std::get<std::filesystem::path>(cfg.source));
}

inline std::uint64_t split_seed(const run_config& cfg) {
    return derive_seed(cfg.master_seed, detail::tag::split);
}

inline data_split make_run_split(const run_config& cfg, const dataset& d) {
    return split(d, cfg.fractions, split_seed(cfg));
}

inline architecture resolve_architecture(const run_config& cfg, const dataset& d) {
    architecture arch = cfg.arch;
    if (arch.input_dim == 0) arch.input_dim = static_cast<int>(d.n_features);
    validate(arch);
    if (static_cast<std::size_t>(arch.input_dim) != d.n_features)
        throw config_error("run: architecture input_dim " + std::to_string(arch.input_dim) +
                           " does not match dataset width " + std::to_string(d.n_features));
    return arch;
}

inline int resolved_baseline_epochs(const run_config& cfg) {
    return cfg.baseline_epochs > 0 ? cfg.baseline_epochs
                                   : cfg.generations * cfg.train.epochs_per_tune;
}

struct evaluated_point {
    std::uint64_t id = 0;
    int generation = 0;
    objective_point point;
};

struct run_result {
    int trial_index = 0;
    std::vector<std::vector<objective_point>> archive_points;  // snapshot per generation, [0..G]
    std::vector<double> hv;                                    // same length
    archive final_archive;
    std::vector<objective_point> final_test_points;  // test-set objectives per archive entry
    std::vector<evaluated_point> evaluated;          // every individual ever evaluated
    double elapsed_seconds = 0.0;                    // in-memory only, never an artifact
};

inline run_result run_moel(const run_config& cfg) {
    using namespace detail;
    const auto t_start = std::chrono::steady_clock::now();
    validate(cfg);

    const dataset data = load_run_dataset(cfg);
    validate(data);
    const data_split sp = make_run_split(cfg, data);
    require_fairness_cells(sp.val, "validation split");
    require_fairness_cells(sp.test, "test split");
    const architecture arch = resolve_architecture(cfg, data);

    const std::uint64_t trial_seed =
        derive_seed(cfg.master_seed, tag::trial, static_cast<std::uint64_t>(cfg.trial_index));
    const std::size_t lambda = cfg.population_size;

    run_result result;
    result.trial_index = cfg.trial_index;

    // initial population: fresh weights, one tuning pass each
    std::vector<individual> pop(lambda);
    parallel_for(lambda, cfg.worker_count, [&](std::size_t i) {
        auto p = init_params(arch, derive_seed(trial_seed, tag::init, i));
        train_config tc = cfg.train;
        tc.seed = derive_seed(trial_seed, tag::tune_init, i);
        pop[i].id = i;
        pop[i].params = tune(p, sp.train, tc);
        pop[i].objectives = evaluate_objectives(pop[i].params, sp.val);
    });
    for (const auto& ind : pop) result.evaluated.push_back({ind.id, 0, *ind.objectives});

    archive ar;
    update_archive(ar, pop);
    auto snapshot = [&] {
        std::vector<objective_point> points;
        points.reserve(ar.entries.size());
        for (const auto& e : ar.entries) points.push_back(e.point);
        result.hv.push_back(hypervolume_2d(points, cfg.hv_ref));
        result.archive_points.push_back(std::move(points));
    };
    snapshot();
    assign_fitness(pop);

    std::uint64_t next_id = lambda;
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        const auto pool =
            mating_pool(pop, lambda, derive_seed(trial_seed, tag::pool, gen));
        auto child_params =
            fgdg_generate(pop, pool, lambda, cfg.mutation_lambda, cfg.merge_alpha,
                          derive_seed(trial_seed, tag::offspring, gen));

        std::vector<individual> offspring(lambda);
        parallel_for(lambda, cfg.worker_count, [&](std::size_t i) {
            train_config tc = cfg.train;
            tc.seed = derive_seed(trial_seed, tag::tune_child, gen, i);
            offspring[i].id = next_id + i;
            offspring[i].params = tune(child_params[i], sp.train, tc);
            offspring[i].objectives = evaluate_objectives(offspring[i].params, sp.val);
        });
        next_id += lambda;
        for (const auto& ind : offspring)
            result.evaluated.push_back({ind.id, gen, *ind.objectives});

        update_archive(ar, offspring);
        std::vector<individual> unified = std::move(pop);
        unified.insert(unified.end(), std::make_move_iterator(offspring.begin()),
                       std::make_move_iterator(offspring.end()));
        assign_fitness(unified);
        pop = pareto_selection(std::move(unified), lambda);
        snapshot();
    }

    result.final_test_points.resize(ar.entries.size());
    parallel_for(ar.entries.size(), cfg.worker_count, [&](std::size_t i) {
        result.final_test_points[i] = evaluate_objectives(ar.entries[i].params, sp.test);
    });
    result.final_archive = std::move(ar);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

// ---------------------------------------------------------------------------
// Comparison baselines: one model each, trained on pre-processed data with a
// budget comparable to one evolved individual's cumulative tuning.

enum class baseline_method {
    vanilla,
    cda,
    oversample,
    undersample,
    oversample_cda,
    undersample_cda,
};

inline constexpr std::array<baseline_method, 6> all_baseline_methods{
    baseline_method::vanilla,        baseline_method::cda,
    baseline_method::oversample,     baseline_method::undersample,
    baseline_method::oversample_cda, baseline_method::undersample_cda,
};

inline std::string_view to_string(baseline_method m) {
    switch (m) {
        case baseline_method::vanilla: return "vanilla";
        case baseline_method::cda: return "cda";
        case baseline_method::oversample: return "oversample";
        case baseline_method::undersample: return "undersample";
        case baseline_method::oversample_cda: return "oversample_cda";
        case baseline_method::undersample_cda: return "undersample_cda";
    }
    return "?";
}

/// Applies the method's transform to the training data only, trains a single
/// model for `epochs`, and evaluates it on the untouched validation set.
inline std::pair<param_vector, objective_point> run_baseline(
    baseline_method method, const dataset& train_data, const dataset& val_data,
    const architecture& arch, const train_config& base, int epochs, std::uint64_t seed) {
    using namespace detail;
    if (epochs < 1) throw config_error("run_baseline: epochs must be >= 1");
    const std::uint64_t sampler_seed = derive_seed(seed, tag::sampler);
    dataset transformed;
    switch (method) {
        case baseline_method::vanilla: transformed = train_data; break;
        case baseline_method::cda: transformed = cda_augment(train_data); break;
        case baseline_method::oversample: transformed = oversample(train_data, sampler_seed); break;
        case baseline_method::undersample:
            transformed = undersample(train_data, sampler_seed);
            break;
        case baseline_method::oversample_cda:
            transformed = cda_augment(oversample(train_data, sampler_seed));
            break;
        case baseline_method::undersample_cda:
            transformed = cda_augment(undersample(train_data, sampler_seed));
            break;
    }
    train_config tc = base;
    tc.epochs_per_tune = epochs;
    tc.seed = derive_seed(seed, tag::tune_init);
    auto model = tune(init_params(arch, derive_seed(seed, tag::model)), transformed, tc);
    auto point = evaluate_objectives(model, val_data);
    return {std::move(model), point};
}

struct baseline_result {
    baseline_method method;
    objective_point point;
};

/// All six baselines on the experiment's shared dataset and split.
inline std::vector<baseline_result> run_all_baselines(const run_config& cfg) {
    validate(cfg);
    const dataset data = load_run_dataset(cfg);
    validate(data);
    const data_split sp = make_run_split(cfg, data);
    require_fairness_cells(sp.val, "validation split");
    const architecture arch = resolve_architecture(cfg, data);
    const int epochs = resolved_baseline_epochs(cfg);

    std::vector<baseline_result> results(all_baseline_methods.size());
    detail::parallel_for(all_baseline_methods.size(), cfg.worker_count, [&](std::size_t i) {
        const auto method = all_baseline_methods[i];
        const auto seed = derive_seed(cfg.master_seed, detail::tag::baseline, i);
        results[i] = {method,
                      run_baseline(method, sp.train, sp.val, arch, cfg.train, epochs, seed).second};
    });
    return results;
}

}  // namespace fapareto
