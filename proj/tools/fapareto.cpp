// fapareto command-line front end.
//
//   fapareto run        evolve a population per trial, write run artifacts
//   fapareto baselines  train the six single-model debiasing baselines
//   fapareto report     aggregate an output directory into analysis CSVs
//
// Exit codes: 0 success, 1 configuration error, 2 dataset validation error,
// 3 missing/corrupt run artifacts.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fapareto/engine.hpp"
#include "fapareto/errors.hpp"
#include "fapareto/io.hpp"
#include "fapareto/report.hpp"

namespace {

struct cli_options {
    std::string out = "out";
    std::string data = "synthetic";
    std::uint64_t seed = 1;
    std::size_t population = 50;
    int generations = 20;
    int trials = 10;
    unsigned workers = 1;
    double mutation_lambda = 0.02;
    double merge_alpha = 0.5;
    double learning_rate = 0.05;
    int batch_size = 32;
    int epochs_per_tune = 1;
    int baseline_epochs = 0;
    int input_dim = 0;
    std::string hidden_dims = "16";
    std::string act = "relu";
    std::size_t synth_n = 4000;
    int synth_input_dim = 8;
    double synth_group_balance = 0.5;
    double synth_label_group_correlation = 0.6;
    double synth_group_noise_gap = 0.2;
    std::uint64_t synth_seed = 0;
    double train_fraction = 0.6;
    double val_fraction = 0.2;
    double test_fraction = 0.2;
    double hv_ref_error = 1.0;
    double hv_ref_delta = 1.0;
};

void add_experiment_options(CLI::App& cmd, cli_options& opt) {
    cmd.set_config("--config", "", "configuration file (key = value lines)");
    cmd.add_option("--out", opt.out, "output directory")
        ->envname("FAPARETO_OUT")
        ->capture_default_str();
    cmd.add_option("--data", opt.data, "`synthetic` or a CSV dataset path")
        ->capture_default_str();
    cmd.add_option("--seed", opt.seed, "master seed")->capture_default_str();
    cmd.add_option("--population", opt.population, "population size")->capture_default_str();
    cmd.add_option("--generations", opt.generations, "generations per trial")
        ->capture_default_str();
    cmd.add_option("--trials", opt.trials, "independent trials")->capture_default_str();
    cmd.add_option("--workers", opt.workers, "worker threads (does not affect results)")
        ->capture_default_str();
    cmd.add_option("--mutation_lambda", opt.mutation_lambda, "mutation noise scale")
        ->capture_default_str();
    cmd.add_option("--merge_alpha", opt.merge_alpha, "crossover merge weight")
        ->capture_default_str();
    cmd.add_option("--learning_rate", opt.learning_rate)->capture_default_str();
    cmd.add_option("--batch_size", opt.batch_size)->capture_default_str();
    cmd.add_option("--epochs_per_tune", opt.epochs_per_tune)->capture_default_str();
    cmd.add_option("--baseline_epochs", opt.baseline_epochs,
                   "baseline training epochs (0: generations * epochs_per_tune)")
        ->capture_default_str();
    cmd.add_option("--input_dim", opt.input_dim, "model input width (0: infer from data)")
        ->capture_default_str();
    cmd.add_option("--hidden_dims", opt.hidden_dims, "comma-separated hidden widths, `-` for none")
        ->capture_default_str();
    cmd.add_option("--activation", opt.act, "relu or tanh")->capture_default_str();
    cmd.add_option("--synth_n", opt.synth_n)->capture_default_str();
    cmd.add_option("--synth_input_dim", opt.synth_input_dim)->capture_default_str();
    cmd.add_option("--synth_group_balance", opt.synth_group_balance)->capture_default_str();
    cmd.add_option("--synth_label_group_correlation", opt.synth_label_group_correlation)
        ->capture_default_str();
    cmd.add_option("--synth_group_noise_gap", opt.synth_group_noise_gap)->capture_default_str();
    cmd.add_option("--synth_seed", opt.synth_seed)->capture_default_str();
    cmd.add_option("--train_fraction", opt.train_fraction)->capture_default_str();
    cmd.add_option("--val_fraction", opt.val_fraction)->capture_default_str();
    cmd.add_option("--test_fraction", opt.test_fraction)->capture_default_str();
    cmd.add_option("--hv_ref_error", opt.hv_ref_error)->capture_default_str();
    cmd.add_option("--hv_ref_delta", opt.hv_ref_delta)->capture_default_str();
}

fapareto::run_config build_run_config(const cli_options& opt) {
    fapareto::run_config cfg;
    cfg.population_size = opt.population;
    cfg.generations = opt.generations;
    cfg.trials = opt.trials;
    cfg.mutation_lambda = opt.mutation_lambda;
    cfg.merge_alpha = opt.merge_alpha;
    cfg.train.learning_rate = opt.learning_rate;
    cfg.train.batch_size = opt.batch_size;
    cfg.train.epochs_per_tune = opt.epochs_per_tune;
    cfg.baseline_epochs = opt.baseline_epochs;
    cfg.master_seed = opt.seed;
    cfg.worker_count = opt.workers;
    cfg.fractions = {opt.train_fraction, opt.val_fraction, opt.test_fraction};
    cfg.hv_ref = {opt.hv_ref_error, opt.hv_ref_delta};

    cfg.arch.input_dim = opt.input_dim;
    cfg.arch.hidden_dims.clear();
    if (opt.hidden_dims != "-" && !opt.hidden_dims.empty())
        for (const auto& field : fapareto::split_fields(opt.hidden_dims)) {
            const auto v = fapareto::try_parse_int(field);
            if (!v) throw fapareto::config_error("bad hidden_dims: " + opt.hidden_dims);
            cfg.arch.hidden_dims.push_back(static_cast<int>(*v));
        }
    if (opt.act == "relu")
        cfg.arch.act = fapareto::activation::relu;
    else if (opt.act == "tanh")
        cfg.arch.act = fapareto::activation::tanh;
    else
        throw fapareto::config_error("unknown activation: " + opt.act);

    if (opt.data == "synthetic") {
        fapareto::synth_config synth;
        synth.n = opt.synth_n;
        synth.input_dim = opt.synth_input_dim;
        synth.group_balance = opt.synth_group_balance;
        synth.label_group_correlation = opt.synth_label_group_correlation;
        synth.group_noise_gap = opt.synth_group_noise_gap;
        synth.seed = opt.synth_seed;
        cfg.source = synth;
    } else {
        cfg.source = std::filesystem::path(opt.data);
    }
    fapareto::validate(cfg);
    return cfg;
}

int cmd_run(const cli_options& opt) {
    auto cfg = build_run_config(opt);
    const std::filesystem::path out_dir(opt.out);
    std::filesystem::create_directories(out_dir);
    fapareto::write_manifest(out_dir / "manifest.txt", cfg, /*per_trial=*/false);
    for (int t = 0; t < cfg.trials; ++t) {
        cfg.trial_index = t;
        const auto result = fapareto::run_moel(cfg);
        fapareto::write_run_artifacts(out_dir / fapareto::trial_dir_name(t), cfg, result);
        std::cout << "trial " << t << ": archive " << result.final_archive.entries.size()
                  << " entries, hv " << fapareto::format_double(result.hv.back()) << " ("
                  << fapareto::format_double(result.elapsed_seconds) << "s)\n";
    }
    std::cout << "wrote " << cfg.trials << " trial(s) under " << out_dir.string() << '\n';
    return 0;
}

int cmd_baselines(const cli_options& opt) {
    const auto cfg = build_run_config(opt);
    const auto results = fapareto::run_all_baselines(cfg);
    const std::filesystem::path out_dir(opt.out);
    std::filesystem::create_directories(out_dir);
    fapareto::write_baselines_csv(out_dir / "baselines.csv", results);
    for (const auto& r : results)
        std::cout << fapareto::to_string(r.method) << ": error "
                  << fapareto::format_double(r.point.error) << ", delta_tpr "
                  << fapareto::format_double(r.point.delta_tpr) << '\n';
    std::cout << "wrote " << (out_dir / "baselines.csv").string() << '\n';
    return 0;
}

int cmd_report(const cli_options& opt) {
    fapareto::generate_report(opt.out);
    std::ifstream stats(std::filesystem::path(opt.out) / "stats.txt");
    std::cout << stats.rdbuf();
    std::cout << "wrote report files under " << opt.out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective evolutionary learning of fair binary classifiers"};
    app.require_subcommand(1);

    cli_options run_opt, base_opt, report_opt;
    auto* run_cmd = app.add_subcommand("run", "evolve a population and write run artifacts");
    add_experiment_options(*run_cmd, run_opt);
    auto* base_cmd = app.add_subcommand("baselines", "train the six debiasing baselines");
    add_experiment_options(*base_cmd, base_opt);
    auto* report_cmd = app.add_subcommand("report", "aggregate run artifacts into reports");
    report_cmd->add_option("--out", report_opt.out, "output directory of prior runs")
        ->envname("FAPARETO_OUT")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run_cmd)) return cmd_run(run_opt);
        if (app.got_subcommand(base_cmd)) return cmd_baselines(base_opt);
        return cmd_report(report_opt);
    } catch (const fapareto::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const fapareto::data_error& e) {
        std::cerr << "dataset error: " << e.what() << '\n';
        return 2;
    } catch (const fapareto::artifact_error& e) {
        std::cerr << "artifact error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
