// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file train.hpp
 * @brief Losses, Adam with decoupled weight decay, and the two protocols:
 *        one-step system identification with iterative rollout, and
 *        transductive node classification.
 *
 * Training is full batch and seed-deterministic. One-step pairs are stacked
 * into a block-diagonal union graph so each iteration records a single tape.
 */

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sympgnn/dataset.hpp"
#include "sympgnn/model.hpp"

namespace sympgnn {

// ---- optimizer -------------------------------------------------------------

struct TrainConfig {
    std::size_t iterations = 1000;
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    double dropout_p = 0.0;
    std::uint64_t seed = 0;
    enum class Loss { mse, cross_entropy } loss = Loss::mse;
    // Full-batch gradients accumulated over this many fixed contiguous chunks
    // (identical results, bounds the tape's working set).
    std::size_t batch_chunks = 1;
    // Train on every k-th one-step pair (the map is unchanged; desk-scale
    // budget knob). 1 = all pairs.
    std::size_t pair_stride = 1;

    void validate() const {
        require(learning_rate > 0.0, "TrainConfig: learning_rate must be positive");
        require(dropout_p >= 0.0 && dropout_p < 1.0, "TrainConfig: dropout_p must be in [0,1)");
        require(batch_chunks >= 1, "TrainConfig: batch_chunks must be >= 1");
        require(pair_stride >= 1, "TrainConfig: pair_stride must be >= 1");
    }
};

struct AdamState {
    std::vector<double> m, v;
    std::size_t step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

/// Bias-corrected Adam with decoupled weight decay: parameters shrink by
/// (1 - lr*wd) before the Adam delta is added.
inline void adam_step(AdamState& st, std::vector<double>& params,
                      const std::vector<double>& grads, double lr, double weight_decay) {
    require(params.size() == grads.size(), "adam_step: param/grad size mismatch");
    require(st.m.size() == params.size() && st.v.size() == params.size(),
            "adam_step: moment shape mismatch");
    st.step += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (weight_decay != 0.0) params[i] *= (1.0 - lr * weight_decay);
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grads[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grads[i] * grads[i];
        const double mhat = st.m[i] / bc1;
        const double vhat = st.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + st.eps);
    }
}

// ---- losses ----------------------------------------------------------------

/// Mean over all elements of the squared difference.
inline Var mse_loss_tape(Tape& t, Var pred, Var target) {
    const Matrix& p = t.value(pred);
    require(p.same_shape(t.value(target)), "mse_loss: shape mismatch");
    Var diff = t.sub(pred, target);
    return t.scale(t.sum_all(t.mul(diff, diff)), 1.0 / static_cast<double>(p.size()));
}

inline double mse_loss(const Matrix& pred, const Matrix& target) {
    Tape t;
    return t.value(mse_loss_tape(t, t.leaf(pred), t.leaf(target)))[0];
}

/// Softmax cross entropy averaged over masked rows. The row-max shift is a
/// recorded constant, so gradients are the exact softmax residuals.
inline Var cross_entropy_tape(Tape& t, Var logits, const std::vector<int>& labels,
                              const std::vector<bool>& mask) {
    const Matrix& z = t.value(logits);
    const std::size_t n = z.rows(), c = z.cols();
    require(labels.size() == n, "cross_entropy: label count mismatch");
    require(mask.size() == n, "cross_entropy: mask length mismatch");
    std::size_t m_count = 0;
    for (bool b : mask) m_count += b ? 1 : 0;
    require(m_count > 0, "cross_entropy: empty mask");

    Matrix row_max(n, 1), onehot(n, c), mask_col(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < c,
                "cross_entropy: label out of range at node " + std::to_string(i));
        double mx = z(i, 0);
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, z(i, j));
        row_max(i, 0) = mx;
        onehot(i, static_cast<std::size_t>(labels[i])) = 1.0;
        mask_col(i, 0) = mask[i] ? 1.0 / static_cast<double>(m_count) : 0.0;
    }
    Var shift = t.leaf(std::move(row_max));
    Var zs = t.sub(logits, t.col_bcast(shift, c));
    Var lse = t.add(t.unary(t.row_sum(t.unary(zs, FnId::exp_fn)), FnId::log_fn), shift);
    Var picked = t.row_sum(t.mul_const(logits, std::move(onehot)));
    Var per_node = t.sub(lse, picked);
    return t.sum_all(t.mul(per_node, t.leaf(std::move(mask_col))));
}

inline double cross_entropy_loss(const Matrix& logits, const std::vector<int>& labels,
                                 const std::vector<bool>& mask) {
    Tape t;
    return t.value(cross_entropy_tape(t, t.leaf(logits), labels, mask))[0];
}

// ---- shared helpers ----------------------------------------------------------

/// Flatten the per-block gradients into parameter_vector order.
inline std::vector<double> extract_gradients(Tape& t, Var loss, const BoundModel& bound,
                                             std::size_t param_count) {
    std::vector<Var> gs = t.grad(loss, bound.flat);
    std::vector<double> flat;
    flat.reserve(param_count);
    for (Var g : gs) {
        const Matrix& m = t.value(g);
        flat.insert(flat.end(), m.data().begin(), m.data().end());
    }
    require(flat.size() == param_count, "extract_gradients: size mismatch");
    return flat;
}

/// Disjoint union of per-sample graphs: block b occupies rows [b*n, (b+1)*n).
inline Graph union_graph(const std::vector<const Graph*>& parts) {
    require(!parts.empty(), "union_graph: no parts");
    Graph u;
    const std::size_t n = parts.front()->n;
    u.n = n * parts.size();
    bool weighted = parts.front()->weighted();
    for (std::size_t b = 0; b < parts.size(); ++b) {
        const Graph& g = *parts[b];
        require(g.n == n, "union_graph: block size mismatch");
        require(g.weighted() == weighted, "union_graph: mixed weighted/unweighted blocks");
        const int off = static_cast<int>(b * n);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            u.edges.emplace_back(g.edges[e].first + off, g.edges[e].second + off);
            if (weighted) u.weights.push_back(g.weights[e]);
        }
    }
    return u;
}

// ---- system identification -----------------------------------------------------

struct SystemIdResult {
    SympModel model;  // best-seen training-loss checkpoint
    std::vector<double> loss_curve;
    double best_loss = 0.0;
};

namespace detail {
/// x = (p q) rows of the listed frames stacked block-wise.
inline Matrix stack_frames(const Trajectory& traj, const std::vector<std::size_t>& frames) {
    const std::size_t n = traj.states.front().n(), d = traj.states.front().d();
    Matrix x(frames.size() * n, 2 * d);
    for (std::size_t b = 0; b < frames.size(); ++b) {
        const auto& s = traj.states[frames[b]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                x(b * n + i, c) = s.p(i, c);
                x(b * n + i, d + c) = s.q(i, c);
            }
    }
    return x;
}

/// Minimum-image correction for position residuals on periodic systems:
/// a constant shift of box * round((pred - target)/box) on the q columns.
inline Matrix wrap_shift(const Matrix& pred, const Matrix& target, std::size_t d, double box) {
    Matrix s(pred.rows(), pred.cols());
    for (std::size_t i = 0; i < pred.rows(); ++i)
        for (std::size_t c = d; c < pred.cols(); ++c)
            s(i, c) = box * std::round((pred(i, c) - target(i, c)) / box);
    return s;
}
}  // namespace detail

/// Identify the one-step-forward map by full-batch MSE over consecutive
/// frame pairs. Returns the final-iteration model and the loss curve.
inline SystemIdResult train_system_id(const Trajectory& traj, SympModel model,
                                      const Graph& g, const TrainConfig& cfg,
                                      std::optional<double> box = {},
                                      const std::function<void(std::size_t, double)>&
                                          progress = {}) {
    cfg.validate();
    traj.validate();
    require(traj.frames() >= 2, "train_system_id: need at least two frames");
    require(model.encoder.kind == HeadKind::identity &&
                model.decoder.kind == HeadKind::identity,
            "train_system_id: system identification uses identity encoder/decoder");
    const std::size_t n = traj.states.front().n(), d = traj.states.front().d();
    require(model.d == d, "train_system_id: model d != trajectory feature width");

    std::vector<std::size_t> selected;
    for (std::size_t b = 0; b + 1 < traj.frames(); b += cfg.pair_stride) selected.push_back(b);
    const std::size_t pairs = selected.size();

    // Fixed contiguous chunks of one-step pairs, each a block-diagonal batch.
    const std::size_t chunks = std::min(cfg.batch_chunks, pairs);
    struct Chunk {
        Graph graph;
        StackContext ctx;
        Matrix x, target;
    };
    std::vector<Chunk> batch(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t first = c * pairs / chunks;
        const std::size_t last = (c + 1) * pairs / chunks;
        std::vector<const Graph*> parts;
        std::vector<std::size_t> in_frames, out_frames;
        for (std::size_t b = first; b < last; ++b) {
            parts.push_back(traj.has_graphs() ? &traj.graphs[selected[b]] : &g);
            in_frames.push_back(selected[b]);
            out_frames.push_back(selected[b] + 1);
        }
        batch[c].graph = union_graph(parts);
        batch[c].ctx = model_context(model, batch[c].graph);
        batch[c].x = detail::stack_frames(traj, in_frames);
        batch[c].target = detail::stack_frames(traj, out_frames);
    }
    const double total_elems = static_cast<double>(pairs * n * 2 * d);

    AdamState adam(parameter_count(model));
    std::vector<double> params = parameter_vector(model);
    SystemIdResult res;
    res.loss_curve.reserve(cfg.iterations);
    std::vector<double> best_params = params;
    res.best_loss = std::numeric_limits<double>::infinity();

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        double loss_val = 0.0;
        std::vector<double> grads(params.size(), 0.0);
        for (const Chunk& ch : batch) {
            Tape t;
            BoundModel bound = bind_model(t, model, true);
            Var xv = t.leaf(ch.x, model.has_g_modules());
            Var pred = model_forward_tape(t, model, bound, xv, ch.ctx);
            Var tv = box ? t.leaf(sympgnn::add(
                               ch.target,
                               detail::wrap_shift(t.value(pred), ch.target, d, *box)))
                         : t.leaf(ch.target);
            Var diff = t.sub(pred, tv);
            Var loss = t.scale(t.sum_all(t.mul(diff, diff)), 1.0 / total_elems);
            loss_val += t.value(loss)[0];
            std::vector<double> part = extract_gradients(t, loss, bound, params.size());
            for (std::size_t k = 0; k < grads.size(); ++k) grads[k] += part[k];
        }
        require(std::isfinite(loss_val),
                "train_system_id: non-finite loss at iteration " + std::to_string(it));
        res.loss_curve.push_back(loss_val);
        if (loss_val < res.best_loss) {
            res.best_loss = loss_val;
            best_params = params;
        }
        if (progress) progress(it, loss_val);

        adam_step(adam, params, grads, cfg.learning_rate, cfg.weight_decay);
        set_parameters(model, params);
    }
    set_parameters(model, best_params);
    res.model = std::move(model);
    return res;
}

// ---- rollout ------------------------------------------------------------------

enum class GraphPolicy { frozen, rebuild };

struct RolloutPolicy {
    GraphPolicy kind = GraphPolicy::frozen;
    double r_c = 0.0;                // rebuild only
    std::optional<double> box;       // rebuild only (periodic wrap)
};

/// Iterate a one-step map from a start state. On non-finite output the
/// trajectory is truncated and flagged in its metadata.
inline Trajectory rollout_map(const GraphPhaseMap& step, const PhaseState& start,
                              std::size_t steps, const Graph& g0, const RolloutPolicy& pol,
                              double h = 0.0) {
    Trajectory traj;
    traj.h = h;
    traj.metadata = {{"rollout_steps", steps}, {"truncated", false}};
    traj.states.push_back(start);
    Graph g = g0;
    PhaseState s = start;
    for (std::size_t k = 0; k < steps; ++k) {
        PhaseState next;
        bool ok = true;
        try {
            next = step(s, g);
            for (double v : next.p.data())
                if (!std::isfinite(v)) ok = false;
            for (double v : next.q.data())
                if (!std::isfinite(v)) ok = false;
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) {
            traj.metadata["truncated"] = true;
            break;
        }
        if (pol.kind == GraphPolicy::rebuild) {
            if (pol.box) next.q = wrap_positions(std::move(next.q), *pol.box);
            g = cutoff_graph(next.q, pol.r_c, pol.box);
        }
        traj.states.push_back(next);
        s = std::move(next);
    }
    return traj;
}

inline Trajectory rollout(const SympModel& model, const PhaseState& start, std::size_t steps,
                          const Graph& g0, const RolloutPolicy& pol, double h = 0.0) {
    GraphPhaseMap step = [&model](const PhaseState& s, const Graph& g) {
        return model_phase_map(model, s, g);
    };
    return rollout_map(step, start, steps, g0, pol, h);
}

// ---- node classification --------------------------------------------------------

struct NodeClassifierResult {
    SympModel model;  // best-validation checkpoint
    std::vector<double> loss_curve;
    std::vector<double> val_acc_curve;
    double best_val_acc = 0.0;
    double test_acc = 0.0;  // at the best-validation checkpoint
};

namespace detail {
/// Forward pass for classification. Uses a sparse product for the encoder
/// when the feature matrix is sparse enough to bother.
inline Var classifier_forward(Tape& t, const SympModel& model, const BoundModel& bound,
                              const Matrix& x, const SparsePtr& x_sparse,
                              const SparsePtr& x_sparse_t, const StackContext& ctx,
                              const Matrix* dropout_mask) {
    if (model.encoder.kind != HeadKind::identity && x_sparse) {
        require(model.encoder.kind == HeadKind::affine,
                "classifier_forward: sparse features need an affine encoder");
        const auto& [w, b] = bound.enc.wb.front();
        Var h = t.add(t.spmm(x_sparse, x_sparse_t, w), t.row_bcast(b, x.rows()));
        PhaseVars s{t.slice_cols(h, 0, model.d), t.slice_cols(h, model.d, 2 * model.d)};
        s = stack_forward(t, model, bound, s, ctx);
        Var dec_in = model.decoder.q_only
                         ? s.q
                         : t.add(t.scatter_cols(s.p, 0, 2 * model.d),
                                 t.scatter_cols(s.q, model.d, 2 * model.d));
        Var out = model.decoder.kind == HeadKind::identity
                      ? dec_in
                      : mlp_forward(t, model.decoder.net, bound.dec, dec_in);
        if (dropout_mask) out = t.mul_const(out, *dropout_mask);
        return out;
    }
    Var xv = t.leaf(x, model.has_g_modules());
    return model_forward_tape(t, model, bound, xv, ctx, dropout_mask);
}

inline double masked_accuracy(const Matrix& logits, const std::vector<int>& labels,
                              const std::vector<bool>& mask) {
    std::size_t total = 0, hit = 0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        if (!mask[i]) continue;
        std::size_t arg = 0;
        for (std::size_t j = 1; j < logits.cols(); ++j)
            if (logits(i, j) > logits(i, arg)) arg = j;
        ++total;
        hit += (static_cast<int>(arg) == labels[i]) ? 1 : 0;
    }
    require(total > 0, "masked_accuracy: empty mask");
    return static_cast<double>(hit) / static_cast<double>(total);
}
}  // namespace detail

/// Evaluation-mode logits (no dropout; bit-identical across repeated calls).
inline Matrix classifier_logits(const SympModel& model, const NodeDataset& ds) {
    StackContext ctx = model_context(model, ds.g);
    Tape t;
    BoundModel bound = bind_model(t, model, false);
    return t.value(detail::classifier_forward(t, model, bound, ds.x, nullptr, nullptr, ctx,
                                              nullptr));
}

/// Full-batch transductive training: cross entropy on the training mask,
/// dropout after the decoder (train mode only), best-validation checkpoint.
inline NodeClassifierResult train_node_classifier(const NodeDataset& ds, SympModel model,
                                                  const TrainConfig& cfg,
                                                  const std::function<void(std::size_t, double)>&
                                                      progress = {}) {
    cfg.validate();
    ds.validate();
    const std::size_t c = ds.num_classes();
    require(model.decoder.kind == HeadKind::identity
                ? (model.decoder.q_only ? model.d : 2 * model.d) == c
                : model.decoder.net.out_dim() == c,
            "train_node_classifier: decoder output width != class count");
    model.dropout_p = cfg.dropout_p;

    const StackContext ctx = model_context(model, ds.g);

    // Sparse encoder path when the feature matrix is mostly zeros.
    SparsePtr xs, xs_t;
    std::size_t nnz = 0;
    for (double v : ds.x.data()) nnz += (v != 0.0) ? 1 : 0;
    if (model.encoder.kind == HeadKind::affine && nnz * 4 < ds.x.size()) {
        auto s = SparseMat::from_dense(ds.x);
        xs_t = std::make_shared<const SparseMat>(s.transposed());
        xs = std::make_shared<const SparseMat>(std::move(s));
    }

    Rng dropout_rng(cfg.seed);
    AdamState adam(parameter_count(model));
    std::vector<double> params = parameter_vector(model);
    NodeClassifierResult res;
    std::vector<double> best_params = params;

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        Tape t;
        BoundModel bound = bind_model(t, model, true);
        Matrix mask(ds.n(), c);
        const Matrix* mask_ptr = nullptr;
        if (cfg.dropout_p > 0.0) {
            const double keep = 1.0 - cfg.dropout_p;
            for (std::size_t k = 0; k < mask.size(); ++k)
                mask[k] = dropout_rng.canonical() < keep ? 1.0 / keep : 0.0;
            mask_ptr = &mask;
        }
        Var logits = detail::classifier_forward(t, model, bound, ds.x, xs, xs_t, ctx, mask_ptr);
        Var loss = cross_entropy_tape(t, logits, ds.y, ds.train_mask);
        const double loss_val = t.value(loss)[0];
        require(std::isfinite(loss_val),
                "train_node_classifier: non-finite loss at iteration " + std::to_string(it));
        res.loss_curve.push_back(loss_val);

        std::vector<double> grads = extract_gradients(t, loss, bound, params.size());
        adam_step(adam, params, grads, cfg.learning_rate, cfg.weight_decay);
        set_parameters(model, params);

        // evaluation pass (no dropout)
        {
            Tape te;
            BoundModel be = bind_model(te, model, false);
            Matrix ev = te.value(
                detail::classifier_forward(te, model, be, ds.x, xs, xs_t, ctx, nullptr));
            const double va = detail::masked_accuracy(ev, ds.y, ds.val_mask);
            res.val_acc_curve.push_back(va);
            if (va > res.best_val_acc) {
                res.best_val_acc = va;
                best_params = params;
            }
            if (progress) progress(it, va);
        }
    }
    set_parameters(model, best_params);
    {
        Tape te;
        BoundModel be = bind_model(te, model, false);
        Matrix ev =
            te.value(detail::classifier_forward(te, model, be, ds.x, xs, xs_t, ctx, nullptr));
        res.test_acc = detail::masked_accuracy(ev, ds.y, ds.test_mask);
    }
    res.model = std::move(model);
    return res;
}

}  // namespace sympgnn
