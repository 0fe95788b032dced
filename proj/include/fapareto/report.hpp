#pragma once

// Aggregates the per-trial artifacts of one output directory into the
// analysis files:
//   hv_curve.csv         generation, mean HV, std over trials
//   all_points.csv       error,delta_tpr,trial,id     every evaluated model
//   front.csv            the non-dominated subset of all_points.csv
//   fronts_by_trial.csv  each trial's own final front
//   comparison.csv       front points next to the six baseline points
//   stats.txt            Pearson r over the front, dominance counts
//
// Pure function of the artifacts: re-running it reproduces identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fapareto/errors.hpp"
#include "fapareto/metrics.hpp"
#include "fapareto/pareto.hpp"
#include "fapareto/text.hpp"

namespace fapareto {

namespace detail {

struct csv_table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::filesystem::path& path) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw artifact_error(path.string() + ": missing column `" + name + "`");
    }
};

inline csv_table read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw artifact_error("missing run artifact: " + path.string());
    csv_table table;
    std::string line;
    if (!std::getline(in, line)) throw artifact_error(path.string() + ": empty file");
    table.header = split_fields(line);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != table.header.size())
            throw artifact_error(path.string() + ": ragged row `" + line + "`");
        table.rows.push_back(std::move(fields));
    }
    return table;
}

inline double csv_double(const csv_table& t, std::size_t row, std::size_t col,
                         const std::filesystem::path& path) {
    const auto v = try_parse_double(t.rows[row][col]);
    if (!v) throw artifact_error(path.string() + ": bad number `" + t.rows[row][col] + "`");
    return *v;
}

}  // namespace detail

struct report_point {
    double error = 0.0;
    double delta_tpr = 0.0;
    int trial = 0;
    std::uint64_t id = 0;
};

/// Generates all report files inside out_dir from its trial_* subdirectories
/// and baselines.csv. Throws artifact_error when inputs are missing/corrupt.
inline void generate_report(const std::filesystem::path& out_dir) {
    using detail::csv_double;
    using detail::read_csv_table;

    std::vector<std::filesystem::path> trial_dirs;
    if (std::filesystem::is_directory(out_dir))
        for (const auto& entry : std::filesystem::directory_iterator(out_dir))
            if (entry.is_directory() && entry.path().filename().string().starts_with("trial_"))
                trial_dirs.push_back(entry.path());
    if (trial_dirs.empty())
        throw artifact_error("no trial_* directories under " + out_dir.string());
    std::sort(trial_dirs.begin(), trial_dirs.end());

    // hv curves
    std::vector<std::vector<double>> curves;
    for (const auto& dir : trial_dirs) {
        const auto path = dir / "hv.csv";
        const auto table = read_csv_table(path);
        const auto col = table.column("hv", path);
        std::vector<double> curve;
        curve.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            curve.push_back(csv_double(table, r, col, path));
        if (!curves.empty() && curve.size() != curves.front().size())
            throw artifact_error(path.string() + ": generation count differs between trials");
        curves.push_back(std::move(curve));
    }

    // every evaluated point, tagged with its trial
    std::vector<report_point> all_points;
    for (std::size_t t = 0; t < trial_dirs.size(); ++t) {
        const auto path = trial_dirs[t] / "points.csv";
        const auto table = read_csv_table(path);
        const auto c_id = table.column("id", path);
        const auto c_err = table.column("error", path);
        const auto c_dt = table.column("delta_tpr", path);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto id = try_parse_int(table.rows[r][c_id]);
            if (!id) throw artifact_error(path.string() + ": bad id");
            all_points.push_back({csv_double(table, r, c_err, path),
                                  csv_double(table, r, c_dt, path), static_cast<int>(t),
                                  static_cast<std::uint64_t>(*id)});
        }
    }

    std::vector<objective_point> objs;
    objs.reserve(all_points.size());
    for (const auto& p : all_points) objs.push_back({p.error, p.delta_tpr});
    auto front_idx = nondominated_subset(objs);
    std::sort(front_idx.begin(), front_idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = all_points[a];
        const auto& pb = all_points[b];
        if (pa.error != pb.error) return pa.error < pb.error;
        if (pa.delta_tpr != pb.delta_tpr) return pa.delta_tpr < pb.delta_tpr;
        if (pa.trial != pb.trial) return pa.trial < pb.trial;
        return pa.id < pb.id;
    });

    // baselines (written by the `baselines` command)
    const auto baselines_path = out_dir / "baselines.csv";
    const auto baselines = read_csv_table(baselines_path);
    const auto b_method = baselines.column("method", baselines_path);
    const auto b_err = baselines.column("error", baselines_path);
    const auto b_dt = baselines.column("delta_tpr", baselines_path);

    auto open = [&](const char* name) {
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out) throw artifact_error("cannot write " + (out_dir / name).string());
        return out;
    };

    {
        auto out = open("hv_curve.csv");
        out << "generation,mean_hv,std_hv\n";
        const auto trials = static_cast<double>(curves.size());
        for (std::size_t g = 0; g < curves.front().size(); ++g) {
            double mean = 0.0;
            for (const auto& c : curves) mean += c[g];
            mean /= trials;
            double var = 0.0;
            for (const auto& c : curves) var += (c[g] - mean) * (c[g] - mean);
            out << g << ',' << format_double(mean) << ','
                << format_double(std::sqrt(var / trials)) << '\n';
        }
    }
    {
        auto out = open("all_points.csv");
        out << "error,delta_tpr,trial,id\n";
        for (const auto& p : all_points)
            out << format_double(p.error) << ',' << format_double(p.delta_tpr) << ',' << p.trial
                << ',' << p.id << '\n';
    }
    {
        auto out = open("front.csv");
        out << "error,delta_tpr,trial,id\n";
        for (std::size_t i : front_idx) {
            const auto& p = all_points[i];
            out << format_double(p.error) << ',' << format_double(p.delta_tpr) << ',' << p.trial
                << ',' << p.id << '\n';
        }
    }
    {
        auto out = open("fronts_by_trial.csv");
        out << "trial,error,delta_tpr,id\n";
        for (std::size_t t = 0; t < trial_dirs.size(); ++t) {
            const auto path = trial_dirs[t] / "archive.csv";
            const auto table = read_csv_table(path);
            const auto c_id = table.column("id", path);
            const auto c_err = table.column("error", path);
            const auto c_dt = table.column("delta_tpr", path);
            for (std::size_t r = 0; r < table.rows.size(); ++r)
                out << t << ',' << table.rows[r][c_err] << ',' << table.rows[r][c_dt] << ','
                    << table.rows[r][c_id] << '\n';
        }
    }
    {
        auto out = open("comparison.csv");
        out << "source,error,delta_tpr\n";
        for (std::size_t i : front_idx)
            out << "front," << format_double(all_points[i].error) << ','
                << format_double(all_points[i].delta_tpr) << '\n';
        for (std::size_t r = 0; r < baselines.rows.size(); ++r)
            out << baselines.rows[r][b_method] << ',' << baselines.rows[r][b_err] << ','
                << baselines.rows[r][b_dt] << '\n';
    }
    {
        std::vector<double> xs, ys;
        for (std::size_t i : front_idx) {
            xs.push_back(all_points[i].error);
            ys.push_back(all_points[i].delta_tpr);
        }
        std::string pearson_text;
        try {
            pearson_text = format_double(pearson(xs, ys));
        } catch (const config_error& e) {
            pearson_text = std::string("undefined (") + e.what() + ")";
        }
        std::size_t dominated_baselines = 0;
        std::size_t front_dominated = 0;
        for (std::size_t r = 0; r < baselines.rows.size(); ++r) {
            const objective_point b{csv_double(baselines, r, b_err, baselines_path),
                                    csv_double(baselines, r, b_dt, baselines_path)};
            bool b_dominated = false;
            for (std::size_t i : front_idx) {
                if (dominates(objs[i], b)) b_dominated = true;
                if (dominates(b, objs[i])) ++front_dominated;
            }
            dominated_baselines += b_dominated;
        }
        auto out = open("stats.txt");
        out << "front_points = " << front_idx.size() << '\n';
        out << "pearson_front = " << pearson_text << '\n';
        out << "baselines_total = " << baselines.rows.size() << '\n';
        out << "baselines_dominated_by_front = " << dominated_baselines << '\n';
        out << "front_points_dominated_by_baselines = " << front_dominated << '\n';
    }
}

}  // namespace fapareto
