#pragma once

// Classifier parameter space and training. Models are small MLPs with a
// single logistic output, stored as one flat parameter vector so that
// population-level operators (merging, noise) can treat them uniformly.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fapareto/dataset.hpp"
#include "fapareto/errors.hpp"
#include "fapareto/rng.hpp"

namespace fapareto {

enum class activation { relu, tanh };

struct architecture {
    int input_dim = 8;
    std::vector<int> hidden_dims{16};
    activation act = activation::relu;

    friend bool operator==(const architecture&, const architecture&) = default;
};

inline void validate(const architecture& a) {
    if (a.input_dim < 1) throw config_error("architecture: input_dim must be >= 1");
    for (int h : a.hidden_dims)
        if (h < 1) throw config_error("architecture: hidden dims must be >= 1");
}

/// Layer widths including input and the single output unit.
inline std::vector<int> layer_dims(const architecture& a) {
    std::vector<int> dims;
    dims.reserve(a.hidden_dims.size() + 2);
    dims.push_back(a.input_dim);
    dims.insert(dims.end(), a.hidden_dims.begin(), a.hidden_dims.end());
    dims.push_back(1);
    return dims;
}

/// One named tensor (weight matrix or bias vector) within the flat vector.
struct tensor_spec {
    std::string name;
    int rows = 0;
    int cols = 1;
    std::size_t offset = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
};

inline std::vector<tensor_spec> tensor_layout(const architecture& a) {
    validate(a);
    const auto dims = layer_dims(a);
    std::vector<tensor_spec> layout;
    std::size_t offset = 0;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        const std::string idx = std::to_string(k);
        layout.push_back({"w" + idx, dims[k + 1], dims[k], offset});
        offset += layout.back().size();
        layout.push_back({"b" + idx, dims[k + 1], 1, offset});
        offset += layout.back().size();
    }
    return layout;
}

inline std::size_t param_count(const architecture& a) {
    std::size_t n = 0;
    for (const auto& t : tensor_layout(a)) n += t.size();
    return n;
}

/// Flat 64-bit parameter vector of one classifier plus its layout.
struct param_vector {
    architecture arch;
    std::vector<double> values;
    std::vector<tensor_spec> layout;
};

/// Training settings for one tune step. The seed fully determines the
/// mini-batch shuffle, so tuning is a pure function of (params, data, cfg).
struct train_config {
    double learning_rate = 0.05;
    int batch_size = 32;
    int epochs_per_tune = 1;
    std::uint64_t seed = 0;
};

inline void validate(const train_config& cfg) {
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
        throw config_error("train: learning_rate must be finite and >= 0");
    if (cfg.batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (cfg.epochs_per_tune < 1) throw config_error("train: epochs_per_tune must be >= 1");
}

/// Weights ~ N(0, 1/fan_in), biases zero; bit-reproducible in (arch, seed).
inline param_vector init_params(const architecture& a, std::uint64_t seed) {
    param_vector p{a, {}, tensor_layout(a)};
    p.values.assign(param_count(a), 0.0);
    rng_stream rng(derive_seed(seed, 0x1417));
    for (const auto& t : p.layout) {
        if (t.name[0] != 'w') continue;  // biases stay zero
        const double scale = 1.0 / std::sqrt(static_cast<double>(t.cols));
        for (std::size_t i = 0; i < t.size(); ++i)
            p.values[t.offset + i] = scale * rng.next_gaussian();
    }
    return p;
}

namespace detail {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline constexpr double prob_clamp = 1e-12;

/// Per-layer activations for one example; reused across rows while training.
struct workspace {
    std::vector<std::vector<double>> act;    // act[k]: output of layer k (act[0] = input)
    std::vector<std::vector<double>> delta;  // backprop error per layer output

    void resize(const std::vector<int>& dims) {
        act.resize(dims.size());
        delta.resize(dims.size());
        for (std::size_t k = 0; k < dims.size(); ++k) {
            act[k].resize(dims[k]);
            delta[k].resize(dims[k]);
        }
    }
};

/// Forward pass; returns P(Y=1 | x). act[] is filled for use by backprop.
inline double forward_ws(const param_vector& p, std::span<const double> x, workspace& ws,
                         const std::vector<int>& dims) {
    std::copy(x.begin(), x.end(), ws.act[0].begin());
    const std::size_t n_layers = dims.size() - 1;
    for (std::size_t k = 0; k < n_layers; ++k) {
        const auto& w = p.layout[2 * k];
        const auto& b = p.layout[2 * k + 1];
        const bool last = k + 1 == n_layers;
        for (int r = 0; r < w.rows; ++r) {
            const double* wr = p.values.data() + w.offset + static_cast<std::size_t>(r) * w.cols;
            double z = p.values[b.offset + r];
            for (int c = 0; c < w.cols; ++c) z += wr[c] * ws.act[k][c];
            if (last)
                ws.act[k + 1][r] = sigmoid(z);
            else if (p.arch.act == activation::relu)
                ws.act[k + 1][r] = z > 0.0 ? z : 0.0;
            else
                ws.act[k + 1][r] = std::tanh(z);
        }
    }
    return ws.act[n_layers][0];
}

/// Accumulates d(per-example BCE)/d(params) into grad (same layout as p).
inline void backward_ws(const param_vector& p, double prob, std::uint8_t label, workspace& ws,
                        const std::vector<int>& dims, std::vector<double>& grad) {
    // Loss uses probabilities clamped to [eps, 1-eps]; inside the clamp the
    // logit gradient is (p - y), outside it is exactly zero.
    const double out_delta =
        (prob < prob_clamp || prob > 1.0 - prob_clamp) ? 0.0 : prob - static_cast<double>(label);
    const std::size_t n_layers = dims.size() - 1;
    ws.delta[n_layers][0] = out_delta;
    for (std::size_t k = n_layers; k-- > 0;) {
        const auto& w = p.layout[2 * k];
        const auto& b = p.layout[2 * k + 1];
        if (k > 0) std::fill(ws.delta[k].begin(), ws.delta[k].end(), 0.0);
        for (int r = 0; r < w.rows; ++r) {
            const double dz = ws.delta[k + 1][r];
            if (dz == 0.0) continue;
            double* gw = grad.data() + w.offset + static_cast<std::size_t>(r) * w.cols;
            const double* wr = p.values.data() + w.offset + static_cast<std::size_t>(r) * w.cols;
            for (int c = 0; c < w.cols; ++c) {
                gw[c] += dz * ws.act[k][c];
                if (k > 0) ws.delta[k][c] += dz * wr[c];
            }
            grad[b.offset + r] += dz;
        }
        if (k > 0) {
            // chain through the hidden activation
            for (int c = 0; c < dims[k]; ++c) {
                const double a = ws.act[k][c];
                if (p.arch.act == activation::relu)
                    ws.delta[k][c] = a > 0.0 ? ws.delta[k][c] : 0.0;
                else
                    ws.delta[k][c] *= 1.0 - a * a;
            }
        }
    }
}

}  // namespace detail

inline double forward(const param_vector& p, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(p.arch.input_dim))
        throw config_error("forward: feature vector length " + std::to_string(x.size()) +
                           " does not match input_dim " + std::to_string(p.arch.input_dim));
    detail::workspace ws;
    const auto dims = layer_dims(p.arch);
    ws.resize(dims);
    return detail::forward_ws(p, x, ws, dims);
}

/// 1 iff P(Y=1|x) >= 0.5; the tie at exactly 0.5 predicts 1.
inline std::uint8_t predict(const param_vector& p, std::span<const double> x) {
    return forward(p, x) >= 0.5 ? 1 : 0;
}

inline std::vector<std::uint8_t> predict_all(const param_vector& p, const dataset& d) {
    if (d.n_features != static_cast<std::size_t>(p.arch.input_dim))
        throw config_error("predict_all: dataset width does not match input_dim");
    detail::workspace ws;
    const auto dims = layer_dims(p.arch);
    ws.resize(dims);
    std::vector<std::uint8_t> preds(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i)
        preds[i] = detail::forward_ws(p, d.row(i), ws, dims) >= 0.5 ? 1 : 0;
    return preds;
}

/// Mean binary cross-entropy over the given rows (all rows if omitted),
/// with probabilities clamped to [1e-12, 1 - 1e-12].
inline double loss(const param_vector& p, const dataset& d, std::span<const std::size_t> rows) {
    if (rows.empty()) throw config_error("loss: empty batch");
    detail::workspace ws;
    const auto dims = layer_dims(p.arch);
    ws.resize(dims);
    double total = 0.0;
    for (std::size_t i : rows) {
        double prob = detail::forward_ws(p, d.row(i), ws, dims);
        prob = std::min(std::max(prob, detail::prob_clamp), 1.0 - detail::prob_clamp);
        total += d.labels[i] ? -std::log(prob) : -std::log(1.0 - prob);
    }
    return total / static_cast<double>(rows.size());
}

inline double loss(const param_vector& p, const dataset& d) {
    std::vector<std::size_t> rows(d.n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return loss(p, d, rows);
}

/// Exact gradient of loss() w.r.t. every parameter, same layout as p.
/// Rows are accumulated in the order given.
inline param_vector gradient(const param_vector& p, const dataset& d,
                             std::span<const std::size_t> rows) {
    if (rows.empty()) throw config_error("gradient: empty batch");
    param_vector g{p.arch, std::vector<double>(p.values.size(), 0.0), p.layout};
    detail::workspace ws;
    const auto dims = layer_dims(p.arch);
    ws.resize(dims);
    for (std::size_t i : rows) {
        const double prob = detail::forward_ws(p, d.row(i), ws, dims);
        detail::backward_ws(p, prob, d.labels[i], ws, dims, g.values);
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (double& v : g.values) v *= inv;
    return g;
}

inline param_vector gradient(const param_vector& p, const dataset& d) {
    std::vector<std::size_t> rows(d.n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return gradient(p, d, rows);
}

/// Mini-batch SGD. The per-epoch shuffle decides batch membership only;
/// each batch is then processed in ascending row order, so a single batch
/// covering the whole set reproduces gradient(p, d) exactly.
inline param_vector tune(const param_vector& p, const dataset& train, const train_config& cfg) {
    validate(cfg);
    if (train.n_rows == 0) throw data_error("tune: empty training set");
    if (train.n_features != static_cast<std::size_t>(p.arch.input_dim))
        throw config_error("tune: dataset width does not match input_dim");

    param_vector out = p;
    std::vector<std::size_t> perm(train.n_rows);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> batch;
    std::vector<double> grad(p.values.size());
    detail::workspace ws;
    const auto dims = layer_dims(p.arch);
    ws.resize(dims);

    const auto bs = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs_per_tune; ++epoch) {
        rng_stream rng(derive_seed(cfg.seed, 0x7a0e, epoch));
        shuffle(perm, rng);
        for (std::size_t start = 0; start < perm.size(); start += bs) {
            const std::size_t stop = std::min(start + bs, perm.size());
            batch.assign(perm.begin() + start, perm.begin() + stop);
            std::sort(batch.begin(), batch.end());
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i : batch) {
                const double prob = detail::forward_ws(out, train.row(i), ws, dims);
                detail::backward_ws(out, prob, train.labels[i], ws, dims, grad);
            }
            // same expression tree as lr * gradient(...)[k], so a full-set
            // batch reproduces the one-step closed form bit-exactly
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (std::size_t k = 0; k < grad.size(); ++k)
                out.values[k] -= cfg.learning_rate * (grad[k] * inv);
        }
    }
    return out;
}

}  // namespace fapareto
