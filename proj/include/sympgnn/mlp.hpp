// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "sympgnn/tape.hpp"

namespace sympgnn {

/// One affine layer, y = x W + b, with an optional element-wise nonlinearity.
/// act == FnId::identity means affine only (the final layer of every net).
struct DenseLayer {
    Matrix W;  // in x out
    Matrix b;  // 1 x out
    FnId act = FnId::identity;
};

struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().W.rows(); }
    std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().W.cols(); }

    void validate() const {
        require(!layers.empty(), "Mlp: no layers");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& L = layers[l];
            require(L.b.rows() == 1 && L.b.cols() == L.W.cols(),
                    "Mlp: bias shape mismatch at layer " + std::to_string(l));
            if (l > 0)
                require(layers[l - 1].W.cols() == L.W.rows(),
                        "Mlp: layer " + std::to_string(l) + " input width " +
                            std::to_string(L.W.rows()) + " != previous output " +
                            std::to_string(layers[l - 1].W.cols()));
        }
        require(layers.back().act == FnId::identity, "Mlp: final layer must be affine");
    }
};

/// Centered-uniform init with scale 1/sqrt(fan_in); zero biases. When
/// zero_final is set the last layer starts at exactly zero so the net is the
/// zero function (fresh symplectic modules are then the identity map).
inline Mlp make_mlp(const std::vector<std::size_t>& dims, FnId hidden_act, Rng& rng,
                    bool zero_final = false) {
    require(dims.size() >= 2, "make_mlp: need at least input and output dims");
    Mlp m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        DenseLayer layer;
        const double s = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        layer.W = rng.uniform_matrix(dims[l], dims[l + 1], -s, s);
        layer.b = Matrix::zeros(1, dims[l + 1]);
        layer.act = (l + 2 == dims.size()) ? FnId::identity : hidden_act;
        m.layers.push_back(std::move(layer));
    }
    if (zero_final) {
        auto& last = m.layers.back();
        last.W = Matrix::zeros(last.W.rows(), last.W.cols());
        last.b = Matrix::zeros(1, last.W.cols());
    }
    m.validate();
    return m;
}

/// Apply to a batch of row vectors without a tape.
inline Matrix mlp_apply_rows(const Mlp& m, const Matrix& x) {
    m.validate();
    require(x.cols() == m.in_dim(), "mlp_apply: input width " + std::to_string(x.cols()) +
                                        " != expected " + std::to_string(m.in_dim()));
    Matrix h = x;
    for (const auto& L : m.layers) {
        Matrix z = matmul(h, L.W);
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += L.b(0, j);
        if (L.act != FnId::identity)
            for (std::size_t k = 0; k < z.size(); ++k) z[k] = fn_eval(L.act, z[k]);
        h = std::move(z);
    }
    return h;
}

/// Single row vector variant (the spec-level mlp_apply).
inline std::vector<double> mlp_apply(const Mlp& m, const std::vector<double>& x) {
    Matrix r = mlp_apply_rows(m, Matrix::row(x));
    return r.data();
}

/// Tape-bound parameters of an Mlp, one (W, b) pair per layer.
struct MlpVars {
    std::vector<std::pair<Var, Var>> wb;
};

inline MlpVars bind_mlp(Tape& t, const Mlp& m, bool requires_grad) {
    MlpVars v;
    for (const auto& L : m.layers)
        v.wb.emplace_back(t.leaf(L.W, requires_grad), t.leaf(L.b, requires_grad));
    return v;
}

inline Var mlp_forward(Tape& t, const Mlp& m, const MlpVars& v, Var x) {
    require(v.wb.size() == m.layers.size(), "mlp_forward: parameter/layer count mismatch");
    Var h = x;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        Var z = t.dense_pre(h, v.wb[l].first, v.wb[l].second);
        h = m.layers[l].act == FnId::identity ? z : t.unary(z, m.layers[l].act);
    }
    return h;
}

}  // namespace sympgnn
