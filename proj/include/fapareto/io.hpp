#pragma once

// On-disk run artifacts.
//
// Per trial directory:
//   manifest.txt            key = value echo of the configuration and seeds
//   hv.csv                  generation,hv
//   points.csv              id,generation,error,delta_tpr   (all evaluated)
//   archive.csv             id,error,delta_tpr,test_error,test_delta_tpr
//   checkpoints/entry_*.ckpt  one checkpoint per archive entry
//
// Checkpoints carry a text header (architecture, id, objectives in decimal)
// followed by the raw parameter values as little-endian 64-bit reals.
//
// Nothing written here depends on wall-clock time, worker count, or output
// location, so identical configurations reproduce identical bytes.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fapareto/engine.hpp"
#include "fapareto/errors.hpp"
#include "fapareto/model.hpp"
#include "fapareto/pareto.hpp"
#include "fapareto/text.hpp"

namespace fapareto {

namespace detail {

inline void put_le_double(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
    out.write(bytes, 8);
}

inline double get_le_double(std::istream& in) {
    char bytes[8];
    in.read(bytes, 8);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[k])) << (8 * k);
    return std::bit_cast<double>(bits);
}

inline std::string hidden_dims_text(const std::vector<int>& dims) {
    if (dims.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(dims[i]);
    }
    return s;
}

inline std::vector<int> parse_hidden_dims(std::string_view text) {
    std::vector<int> dims;
    if (text == "-") return dims;
    for (const auto& field : split_fields(text)) {
        const auto v = try_parse_int(field);
        if (!v || *v < 1) throw artifact_error("bad hidden dims: " + std::string(text));
        dims.push_back(static_cast<int>(*v));
    }
    return dims;
}

}  // namespace detail

inline void write_checkpoint(const std::filesystem::path& path, const archive_entry& entry) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw artifact_error("cannot write checkpoint: " + path.string());
    const auto& arch = entry.params.arch;
    out << "fapareto-checkpoint v1\n"
        << "id " << entry.id << '\n'
        << "input_dim " << arch.input_dim << '\n'
        << "hidden " << detail::hidden_dims_text(arch.hidden_dims) << '\n'
        << "activation " << (arch.act == activation::relu ? "relu" : "tanh") << '\n'
        << "objectives " << format_double(entry.point.error) << ' '
        << format_double(entry.point.delta_tpr) << '\n'
        << "params " << entry.params.values.size() << '\n';
    for (double v : entry.params.values) detail::put_le_double(out, v);
    if (!out) throw artifact_error("write failed: " + path.string());
}

inline archive_entry read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw artifact_error("cannot open checkpoint: " + path.string());
    auto bad = [&](const std::string& what) {
        return artifact_error(path.string() + ": " + what);
    };
    std::string line;
    if (!std::getline(in, line) || trim(line) != "fapareto-checkpoint v1")
        throw bad("not a checkpoint file");
    archive_entry entry;
    architecture arch;
    std::size_t count = 0;
    for (int k = 0; k < 6; ++k) {
        if (!std::getline(in, line)) throw bad("truncated header");
        std::istringstream fields{line};
        std::string key;
        fields >> key;
        if (key == "id") {
            fields >> entry.id;
        } else if (key == "input_dim") {
            fields >> arch.input_dim;
        } else if (key == "hidden") {
            std::string text;
            fields >> text;
            arch.hidden_dims = detail::parse_hidden_dims(text);
        } else if (key == "activation") {
            std::string text;
            fields >> text;
            if (text == "relu")
                arch.act = activation::relu;
            else if (text == "tanh")
                arch.act = activation::tanh;
            else
                throw bad("unknown activation: " + text);
        } else if (key == "objectives") {
            fields >> entry.point.error >> entry.point.delta_tpr;
        } else if (key == "params") {
            fields >> count;
        } else {
            throw bad("unknown header key: " + key);
        }
        if (!fields) throw bad("malformed header line: " + line);
    }
    if (count != param_count(arch)) throw bad("parameter count does not match architecture");
    entry.params.arch = arch;
    entry.params.layout = tensor_layout(arch);
    entry.params.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) entry.params.values[i] = detail::get_le_double(in);
    if (!in) throw bad("truncated parameter payload");
    return entry;
}

/// Configuration echo plus the derived seeds that fixed this trial's
/// randomness. Execution hints (worker count, output location) are omitted:
/// they must not affect artifacts.
inline void write_manifest(const std::filesystem::path& path, const run_config& cfg,
                           bool per_trial) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw artifact_error("cannot write manifest: " + path.string());
    out << "format = fapareto-run-manifest v1\n";
    out << "population = " << cfg.population_size << '\n';
    out << "generations = " << cfg.generations << '\n';
    out << "trials = " << cfg.trials << '\n';
    if (per_trial) out << "trial_index = " << cfg.trial_index << '\n';
    out << "mutation_lambda = " << format_double(cfg.mutation_lambda) << '\n';
    out << "merge_alpha = " << format_double(cfg.merge_alpha) << '\n';
    out << "learning_rate = " << format_double(cfg.train.learning_rate) << '\n';
    out << "batch_size = " << cfg.train.batch_size << '\n';
    out << "epochs_per_tune = " << cfg.train.epochs_per_tune << '\n';
    out << "baseline_epochs = " << resolved_baseline_epochs(cfg) << '\n';
    out << "input_dim = " << cfg.arch.input_dim << '\n';
    out << "hidden_dims = " << detail::hidden_dims_text(cfg.arch.hidden_dims) << '\n';
    out << "activation = " << (cfg.arch.act == activation::relu ? "relu" : "tanh") << '\n';
    if (const auto* synth = std::get_if<synth_config>(&cfg.source)) {
        out << "data = synthetic\n";
        out << "synth_n = " << synth->n << '\n';
        out << "synth_input_dim = " << synth->input_dim << '\n';
        out << "synth_group_balance = " << format_double(synth->group_balance) << '\n';
        out << "synth_label_group_correlation = "
            << format_double(synth->label_group_correlation) << '\n';
        out << "synth_group_noise_gap = " << format_double(synth->group_noise_gap) << '\n';
        out << "synth_seed = " << synth->seed << '\n';
    } else {
        out << "data = csv\n";
        out << "csv_path = " << std::get<std::filesystem::path>(cfg.source).string() << '\n';
    }
    out << "train_fraction = " << format_double(cfg.fractions.train) << '\n';
    out << "val_fraction = " << format_double(cfg.fractions.val) << '\n';
    out << "test_fraction = " << format_double(cfg.fractions.test) << '\n';
    out << "hv_ref_error = " << format_double(cfg.hv_ref.error) << '\n';
    out << "hv_ref_delta = " << format_double(cfg.hv_ref.delta_tpr) << '\n';
    out << "master_seed = " << cfg.master_seed << '\n';
    out << "split_seed = " << split_seed(cfg) << '\n';
    if (per_trial)
        out << "trial_seed = "
            << derive_seed(cfg.master_seed, detail::tag::trial,
                           static_cast<std::uint64_t>(cfg.trial_index))
            << '\n';
    if (!out) throw artifact_error("write failed: " + path.string());
}

inline std::string trial_dir_name(int trial_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "trial_%03d", trial_index);
    return buf;
}

/// Writes one trial's artifacts under dir (creating it).
inline void write_run_artifacts(const std::filesystem::path& dir, const run_config& cfg,
                                const run_result& result) {
    std::filesystem::create_directories(dir / "checkpoints");

    write_manifest(dir / "manifest.txt", cfg, /*per_trial=*/true);

    {
        std::ofstream out(dir / "hv.csv", std::ios::binary);
        out << "generation,hv\n";
        for (std::size_t g = 0; g < result.hv.size(); ++g)
            out << g << ',' << format_double(result.hv[g]) << '\n';
        if (!out) throw artifact_error("write failed: " + (dir / "hv.csv").string());
    }
    {
        std::ofstream out(dir / "points.csv", std::ios::binary);
        out << "id,generation,error,delta_tpr\n";
        for (const auto& e : result.evaluated)
            out << e.id << ',' << e.generation << ',' << format_double(e.point.error) << ','
                << format_double(e.point.delta_tpr) << '\n';
        if (!out) throw artifact_error("write failed: " + (dir / "points.csv").string());
    }
    {
        // archive rows sorted along the front (by error, then gap, then id)
        std::vector<std::size_t> order(result.final_archive.entries.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ea = result.final_archive.entries[a];
            const auto& eb = result.final_archive.entries[b];
            if (ea.point.error != eb.point.error) return ea.point.error < eb.point.error;
            if (ea.point.delta_tpr != eb.point.delta_tpr)
                return ea.point.delta_tpr < eb.point.delta_tpr;
            return ea.id < eb.id;
        });
        std::ofstream out(dir / "archive.csv", std::ios::binary);
        out << "id,error,delta_tpr,test_error,test_delta_tpr\n";
        for (std::size_t i : order) {
            const auto& e = result.final_archive.entries[i];
            const auto& t = result.final_test_points[i];
            out << e.id << ',' << format_double(e.point.error) << ','
                << format_double(e.point.delta_tpr) << ',' << format_double(t.error) << ','
                << format_double(t.delta_tpr) << '\n';
        }
        if (!out) throw artifact_error("write failed: " + (dir / "archive.csv").string());
        for (std::size_t i : order) {
            char name[32];
            std::snprintf(name, sizeof(name), "entry_%06llu.ckpt",
                          static_cast<unsigned long long>(result.final_archive.entries[i].id));
            write_checkpoint(dir / "checkpoints" / name, result.final_archive.entries[i]);
        }
    }
}

/// One row per method: `method,error,delta_tpr`.
inline void write_baselines_csv(const std::filesystem::path& path,
                                std::span<const baseline_result> results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw artifact_error("cannot write " + path.string());
    out << "method,error,delta_tpr\n";
    for (const auto& r : results)
        out << to_string(r.method) << ',' << format_double(r.point.error) << ','
            << format_double(r.point.delta_tpr) << '\n';
    if (!out) throw artifact_error("write failed: " + path.string());
}

}  // namespace fapareto
