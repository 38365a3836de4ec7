// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file tape.hpp
 * @brief Reverse-mode differentiation tape over dense matrices.
 *
 * The tape records primitive operations define-by-run style and evaluates
 * them eagerly. grad() walks the recorded graph backwards and EMITS the
 * adjoint computation as new tape nodes, so gradients are first-class values
 * that can be differentiated again. That is what lets a model update of the
 * form q + grad(T)(p) be trained with the same first-order rule set: the
 * parameter gradient of the update just differentiates the emitted nodes.
 */

#pragma once

#include <memory>
#include <vector>

#include "sympgnn/activation.hpp"
#include "sympgnn/core.hpp"
#include "sympgnn/sparse.hpp"

namespace sympgnn {

/// Handle to a tape node.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

class Tape {
    enum class Op : std::uint8_t {
        leaf,
        add,
        sub,
        neg,
        mul,          // hadamard
        scale,        // by compile-time constant scalar
        mul_const,    // hadamard with constant matrix
        matmul,
        transpose,
        spmm,         // constant sparse * dense
        unary,        // element-wise FnId
        sum_all,      // -> 1x1
        bcast_scalar, // 1x1 -> r x c
        row_bcast,    // 1xd -> n x d
        col_sum,      // n x d -> 1 x d
        col_bcast,    // n x 1 -> n x c
        row_sum,      // n x d -> n x 1
        gather_rows,
        scatter_add_rows,
        slice_cols,
        scatter_cols,
        dense_pre,    // x W + bias rows, fused
        gather_pair,  // rows [x[src[e]] x[dst[e]] 0...] per ordered edge
    };

    struct Node {
        Op op = Op::leaf;
        int a = -1, b = -1, c2 = -1;
        double c = 0.0;         // scale factor / spare
        int i0 = 0, i1 = 0;     // column range / broadcast shape
        FnId fn = FnId::identity;
        std::shared_ptr<const Matrix> cmat;  // mul_const payload
        SparsePtr sp, sp_t;
        std::shared_ptr<const std::vector<int>> idx, idx2;
        Matrix val;
        bool requires_grad = false;
    };

public:
    Var leaf(Matrix m, bool requires_grad = false) {
        Node n;
        n.op = Op::leaf;
        n.val = std::move(m);
        n.requires_grad = requires_grad;
        return push(std::move(n));
    }

    Var add(Var a, Var b) { return binary(Op::add, a, b); }
    Var sub(Var a, Var b) { return binary(Op::sub, a, b); }
    Var mul(Var a, Var b) { return binary(Op::mul, a, b); }
    Var matmul(Var a, Var b) { return binary(Op::matmul, a, b); }

    Var neg(Var a) { return unary_node(Op::neg, a); }
    Var transpose(Var a) { return unary_node(Op::transpose, a); }
    Var sum_all(Var a) { return unary_node(Op::sum_all, a); }
    Var col_sum(Var a) { return unary_node(Op::col_sum, a); }
    Var row_sum(Var a) { return unary_node(Op::row_sum, a); }

    Var scale(Var a, double c) {
        Node n = base(Op::scale, a);
        n.c = c;
        return push(std::move(n));
    }
    Var mul_const(Var a, Matrix c) {
        Node n = base(Op::mul_const, a);
        n.cmat = std::make_shared<const Matrix>(std::move(c));
        return push(std::move(n));
    }
    Var unary(Var a, FnId f) {
        Node n = base(Op::unary, a);
        n.fn = f;
        return push(std::move(n));
    }
    /// s sparse, s_t its transpose (pass the same pointer when symmetric).
    Var spmm(SparsePtr s, SparsePtr s_t, Var x) {
        Node n = base(Op::spmm, x);
        n.sp = std::move(s);
        n.sp_t = std::move(s_t);
        return push(std::move(n));
    }
    Var bcast_scalar(Var a, std::size_t r, std::size_t c) {
        Node n = base(Op::bcast_scalar, a);
        n.i0 = static_cast<int>(r);
        n.i1 = static_cast<int>(c);
        return push(std::move(n));
    }
    Var row_bcast(Var a, std::size_t n_rows) {
        Node n = base(Op::row_bcast, a);
        n.i0 = static_cast<int>(n_rows);
        return push(std::move(n));
    }
    Var col_bcast(Var a, std::size_t n_cols) {
        Node n = base(Op::col_bcast, a);
        n.i0 = static_cast<int>(n_cols);
        return push(std::move(n));
    }
    Var gather_rows(Var a, std::shared_ptr<const std::vector<int>> idx) {
        Node n = base(Op::gather_rows, a);
        n.idx = std::move(idx);
        return push(std::move(n));
    }
    Var scatter_add_rows(Var a, std::shared_ptr<const std::vector<int>> idx,
                         std::size_t out_rows) {
        Node n = base(Op::scatter_add_rows, a);
        n.idx = std::move(idx);
        n.i0 = static_cast<int>(out_rows);
        return push(std::move(n));
    }
    Var slice_cols(Var a, std::size_t c0, std::size_t c1) {
        Node n = base(Op::slice_cols, a);
        n.i0 = static_cast<int>(c0);
        n.i1 = static_cast<int>(c1);
        return push(std::move(n));
    }
    Var scatter_cols(Var a, std::size_t c0, std::size_t out_cols) {
        Node n = base(Op::scatter_cols, a);
        n.i0 = static_cast<int>(c0);
        n.i1 = static_cast<int>(out_cols);
        return push(std::move(n));
    }
    /// x W + row-broadcast bias in one node.
    Var dense_pre(Var x, Var w, Var bias) {
        Node n = base(Op::dense_pre, x);
        require(w.valid() && bias.valid(), "Tape: invalid operand");
        n.b = w.id;
        n.c2 = bias.id;
        n.requires_grad = n.requires_grad ||
                          nodes_[static_cast<std::size_t>(w.id)].requires_grad ||
                          nodes_[static_cast<std::size_t>(bias.id)].requires_grad;
        return push(std::move(n));
    }
    /// One row per ordered edge: columns [0,d) from x[src], [d,2d) from
    /// x[dst], anything beyond 2d zero (out_cols >= 2d).
    Var gather_pair(Var x, std::shared_ptr<const std::vector<int>> src,
                    std::shared_ptr<const std::vector<int>> dst, std::size_t out_cols) {
        Node n = base(Op::gather_pair, x);
        n.idx = std::move(src);
        n.idx2 = std::move(dst);
        n.i0 = static_cast<int>(out_cols);
        return push(std::move(n));
    }

    const Matrix& value(Var v) const {
        require(v.valid() && static_cast<std::size_t>(v.id) < nodes_.size(),
                "Tape::value: invalid var");
        return nodes_[static_cast<std::size_t>(v.id)].val;
    }
    bool requires_grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).requires_grad; }
    std::size_t size() const { return nodes_.size(); }

    /// Reverse sweep from scalar f; emits adjoint nodes and returns d f / d w
    /// for each w in wrt (zero matrices for vars f does not depend on).
    std::vector<Var> grad(Var f, const std::vector<Var>& wrt) {
        const Matrix& fv = value(f);
        require(fv.rows() == 1 && fv.cols() == 1, "grad: recorded function is not scalar");
        const int top = f.id;
        std::vector<Var> adj(static_cast<std::size_t>(top) + 1, Var{});
        adj[static_cast<std::size_t>(top)] = leaf(Matrix::filled(1, 1, 1.0));
        for (int i = top; i >= 0; --i) {
            Var g = adj[static_cast<std::size_t>(i)];
            if (!g.valid()) continue;
            emit_backward(i, g, adj);
        }
        std::vector<Var> out;
        out.reserve(wrt.size());
        for (Var w : wrt) {
            require(w.valid(), "grad: invalid wrt var");
            if (w.id <= top && adj[static_cast<std::size_t>(w.id)].valid()) {
                out.push_back(adj[static_cast<std::size_t>(w.id)]);
            } else {
                const Matrix& wv = value(w);
                out.push_back(leaf(Matrix::zeros(wv.rows(), wv.cols())));
            }
        }
        return out;
    }

    Var grad1(Var f, Var w) { return grad(f, {w})[0]; }

    /// Recompute every node from its inputs and require bit-identical values.
    void check_replay() const {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].op == Op::leaf) continue;
            Matrix re = compute(nodes_[i]);
            const Matrix& got = nodes_[i].val;
            require(re.same_shape(got), "tape replay: shape drift");
            for (std::size_t k = 0; k < re.size(); ++k)
                if (re[k] != got[k])
                    fail("tape replay mismatch at node " + std::to_string(i) +
                         ": forward value not reproducible");
        }
    }

private:
    Node base(Op op, Var a) {
        require(a.valid() && static_cast<std::size_t>(a.id) < nodes_.size(),
                "Tape: invalid operand");
        Node n;
        n.op = op;
        n.a = a.id;
        n.requires_grad = nodes_[static_cast<std::size_t>(a.id)].requires_grad;
        return n;
    }
    Var binary(Op op, Var a, Var b) {
        Node n = base(op, a);
        require(b.valid() && static_cast<std::size_t>(b.id) < nodes_.size(),
                "Tape: invalid operand");
        n.b = b.id;
        n.requires_grad =
            n.requires_grad || nodes_[static_cast<std::size_t>(b.id)].requires_grad;
        return push(std::move(n));
    }
    Var unary_node(Op op, Var a) { return push(base(op, a)); }

    Var push(Node n) {
        if (n.op != Op::leaf) n.val = compute(n);
        nodes_.push_back(std::move(n));
        return Var{static_cast<int>(nodes_.size() - 1)};
    }

    const Matrix& in_a(const Node& n) const { return nodes_[static_cast<std::size_t>(n.a)].val; }
    const Matrix& in_b(const Node& n) const { return nodes_[static_cast<std::size_t>(n.b)].val; }

    Matrix compute(const Node& n) const {
        switch (n.op) {
            case Op::leaf: return n.val;
            case Op::add: return sympgnn::add(in_a(n), in_b(n));
            case Op::sub: return sympgnn::sub(in_a(n), in_b(n));
            case Op::neg: return sympgnn::scale(in_a(n), -1.0);
            case Op::mul: return hadamard(in_a(n), in_b(n));
            case Op::scale: return sympgnn::scale(in_a(n), n.c);
            case Op::mul_const: return hadamard(in_a(n), *n.cmat);
            case Op::matmul: return sympgnn::matmul(in_a(n), in_b(n));
            case Op::transpose: return sympgnn::transpose(in_a(n));
            case Op::spmm: return n.sp->apply(in_a(n));
            case Op::unary: {
                const Matrix& x = in_a(n);
                Matrix r(x.rows(), x.cols());
                for (std::size_t k = 0; k < x.size(); ++k) r[k] = fn_eval(n.fn, x[k]);
                r.check_finite("tape unary");
                return r;
            }
            case Op::sum_all: return Matrix::filled(1, 1, sympgnn::sum(in_a(n)));
            case Op::bcast_scalar: {
                const Matrix& x = in_a(n);
                require(x.rows() == 1 && x.cols() == 1, "bcast_scalar: input not scalar");
                return Matrix::filled(static_cast<std::size_t>(n.i0),
                                      static_cast<std::size_t>(n.i1), x[0]);
            }
            case Op::row_bcast: {
                const Matrix& v = in_a(n);
                require(v.rows() == 1, "row_bcast: input not a row vector");
                Matrix r(static_cast<std::size_t>(n.i0), v.cols());
                for (std::size_t i = 0; i < r.rows(); ++i)
                    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = v(0, j);
                return r;
            }
            case Op::col_sum: {
                const Matrix& x = in_a(n);
                Matrix r(1, x.cols());
                for (std::size_t i = 0; i < x.rows(); ++i)
                    for (std::size_t j = 0; j < x.cols(); ++j) r(0, j) += x(i, j);
                return r;
            }
            case Op::col_bcast: {
                const Matrix& v = in_a(n);
                require(v.cols() == 1, "col_bcast: input not a column vector");
                Matrix r(v.rows(), static_cast<std::size_t>(n.i0));
                for (std::size_t i = 0; i < r.rows(); ++i)
                    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = v(i, 0);
                return r;
            }
            case Op::row_sum: {
                const Matrix& x = in_a(n);
                Matrix r(x.rows(), 1);
                for (std::size_t i = 0; i < x.rows(); ++i)
                    for (std::size_t j = 0; j < x.cols(); ++j) r(i, 0) += x(i, j);
                return r;
            }
            case Op::gather_rows: {
                const Matrix& x = in_a(n);
                const auto& idx = *n.idx;
                Matrix r(idx.size(), x.cols());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    require(idx[i] >= 0 && static_cast<std::size_t>(idx[i]) < x.rows(),
                            "gather_rows: index out of range");
                    for (std::size_t j = 0; j < x.cols(); ++j)
                        r(i, j) = x(static_cast<std::size_t>(idx[i]), j);
                }
                return r;
            }
            case Op::scatter_add_rows: {
                const Matrix& x = in_a(n);
                const auto& idx = *n.idx;
                require(idx.size() == x.rows(), "scatter_add_rows: index length mismatch");
                Matrix r(static_cast<std::size_t>(n.i0), x.cols());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    require(idx[i] >= 0 && idx[i] < n.i0, "scatter_add_rows: index out of range");
                    for (std::size_t j = 0; j < x.cols(); ++j)
                        r(static_cast<std::size_t>(idx[i]), j) += x(i, j);
                }
                return r;
            }
            case Op::slice_cols: {
                const Matrix& x = in_a(n);
                const auto c0 = static_cast<std::size_t>(n.i0), c1 = static_cast<std::size_t>(n.i1);
                require(c0 <= c1 && c1 <= x.cols(), "slice_cols: bad range");
                Matrix r(x.rows(), c1 - c0);
                for (std::size_t i = 0; i < x.rows(); ++i)
                    for (std::size_t j = c0; j < c1; ++j) r(i, j - c0) = x(i, j);
                return r;
            }
            case Op::scatter_cols: {
                const Matrix& x = in_a(n);
                const auto c0 = static_cast<std::size_t>(n.i0), ct = static_cast<std::size_t>(n.i1);
                require(c0 + x.cols() <= ct, "scatter_cols: bad range");
                Matrix r(x.rows(), ct);
                for (std::size_t i = 0; i < x.rows(); ++i)
                    for (std::size_t j = 0; j < x.cols(); ++j) r(i, c0 + j) = x(i, j);
                return r;
            }
            case Op::dense_pre: {
                const Matrix& x = in_a(n);
                const Matrix& w = in_b(n);
                const Matrix& bias = nodes_[static_cast<std::size_t>(n.c2)].val;
                require(x.cols() == w.rows(), "dense_pre: dimension mismatch " + x.shape_str() +
                                                  " times " + w.shape_str());
                require(bias.rows() == 1 && bias.cols() == w.cols(),
                        "dense_pre: bias shape mismatch");
                Matrix r(x.rows(), w.cols());
                const std::size_t m = x.cols(), p = w.cols();
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    double* ri = &r.data()[i * p];
                    for (std::size_t j = 0; j < p; ++j) ri[j] = bias(0, j);
                    for (std::size_t k = 0; k < m; ++k) {
                        const double xik = x(i, k);
                        if (xik == 0.0) continue;
                        const double* wk = &w.data()[k * p];
                        for (std::size_t j = 0; j < p; ++j) ri[j] += xik * wk[j];
                    }
                }
                r.check_finite("dense_pre");
                return r;
            }
            case Op::gather_pair: {
                const Matrix& x = in_a(n);
                const auto& src = *n.idx;
                const auto& dst = *n.idx2;
                require(src.size() == dst.size(), "gather_pair: index length mismatch");
                const std::size_t d = x.cols();
                const auto out_cols = static_cast<std::size_t>(n.i0);
                require(out_cols >= 2 * d, "gather_pair: output too narrow");
                Matrix r(src.size(), out_cols);
                for (std::size_t e = 0; e < src.size(); ++e) {
                    require(src[e] >= 0 && static_cast<std::size_t>(src[e]) < x.rows() &&
                                dst[e] >= 0 && static_cast<std::size_t>(dst[e]) < x.rows(),
                            "gather_pair: index out of range");
                    for (std::size_t j = 0; j < d; ++j) {
                        r(e, j) = x(static_cast<std::size_t>(src[e]), j);
                        r(e, d + j) = x(static_cast<std::size_t>(dst[e]), j);
                    }
                }
                return r;
            }
        }
        fail("Tape::compute: unknown op");
    }

    void accumulate(std::vector<Var>& adj, int target, Var contrib) {
        if (target < 0) return;
        if (!nodes_[static_cast<std::size_t>(target)].requires_grad &&
            nodes_[static_cast<std::size_t>(target)].op == Op::leaf)
            return;  // constant leaf: gradient never read
        Var& slot = adj[static_cast<std::size_t>(target)];
        slot = slot.valid() ? add(slot, contrib) : contrib;
    }

    void emit_backward(int i, Var g, std::vector<Var>& adj) {
        // Copy what we need: nodes_ may reallocate while emitting.
        const Op op = nodes_[static_cast<std::size_t>(i)].op;
        const int a = nodes_[static_cast<std::size_t>(i)].a;
        const int b = nodes_[static_cast<std::size_t>(i)].b;
        const int c2 = nodes_[static_cast<std::size_t>(i)].c2;
        const double c = nodes_[static_cast<std::size_t>(i)].c;
        const int i0 = nodes_[static_cast<std::size_t>(i)].i0;
        const FnId fn = nodes_[static_cast<std::size_t>(i)].fn;
        const SparsePtr sp = nodes_[static_cast<std::size_t>(i)].sp;
        const SparsePtr sp_t = nodes_[static_cast<std::size_t>(i)].sp_t;
        const auto idx = nodes_[static_cast<std::size_t>(i)].idx;
        const auto idx2 = nodes_[static_cast<std::size_t>(i)].idx2;
        const auto cmat = nodes_[static_cast<std::size_t>(i)].cmat;
        const bool need_a = a >= 0 && nodes_[static_cast<std::size_t>(a)].requires_grad;
        const bool need_b = b >= 0 && nodes_[static_cast<std::size_t>(b)].requires_grad;
        const bool need_c2 = c2 >= 0 && nodes_[static_cast<std::size_t>(c2)].requires_grad;

        switch (op) {
            case Op::leaf: return;
            case Op::add:
                if (need_a) accumulate(adj, a, g);
                if (need_b) accumulate(adj, b, g);
                return;
            case Op::sub:
                if (need_a) accumulate(adj, a, g);
                if (need_b) accumulate(adj, b, neg(g));
                return;
            case Op::neg:
                if (need_a) accumulate(adj, a, neg(g));
                return;
            case Op::mul:
                if (need_a) accumulate(adj, a, mul(g, Var{b}));
                if (need_b) accumulate(adj, b, mul(g, Var{a}));
                return;
            case Op::scale:
                if (need_a) accumulate(adj, a, scale(g, c));
                return;
            case Op::mul_const:
                if (need_a) {
                    Node n = base(Op::mul_const, g);
                    n.cmat = cmat;
                    accumulate(adj, a, push(std::move(n)));
                }
                return;
            case Op::matmul:
                if (need_a) accumulate(adj, a, matmul(g, transpose(Var{b})));
                if (need_b) accumulate(adj, b, matmul(transpose(Var{a}), g));
                return;
            case Op::transpose:
                if (need_a) accumulate(adj, a, transpose(g));
                return;
            case Op::spmm:
                if (need_a) accumulate(adj, a, spmm(sp_t, sp, g));
                return;
            case Op::unary:
                if (need_a) accumulate(adj, a, mul(g, unary(Var{a}, fn_deriv(fn))));
                return;
            case Op::sum_all:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a, bcast_scalar(g, x.rows(), x.cols()));
                }
                return;
            case Op::bcast_scalar:
                if (need_a) accumulate(adj, a, sum_all(g));
                return;
            case Op::row_bcast:
                if (need_a) accumulate(adj, a, col_sum(g));
                return;
            case Op::col_sum:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a, row_bcast(g, x.rows()));
                }
                return;
            case Op::col_bcast:
                if (need_a) accumulate(adj, a, row_sum(g));
                return;
            case Op::row_sum:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a, col_bcast(g, x.cols()));
                }
                return;
            case Op::gather_rows:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a, scatter_add_rows(g, idx, x.rows()));
                }
                return;
            case Op::scatter_add_rows:
                if (need_a) accumulate(adj, a, gather_rows(g, idx));
                return;
            case Op::slice_cols:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a, scatter_cols(g, static_cast<std::size_t>(i0), x.cols()));
                }
                return;
            case Op::scatter_cols:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    accumulate(adj, a,
                               slice_cols(g, static_cast<std::size_t>(i0),
                                          static_cast<std::size_t>(i0) + x.cols()));
                }
                return;
            case Op::dense_pre:
                if (need_a) accumulate(adj, a, matmul(g, transpose(Var{b})));
                if (need_b) accumulate(adj, b, matmul(transpose(Var{a}), g));
                if (need_c2) accumulate(adj, c2, col_sum(g));
                return;
            case Op::gather_pair:
                if (need_a) {
                    const Matrix& x = nodes_[static_cast<std::size_t>(a)].val;
                    const std::size_t d = x.cols();
                    accumulate(adj, a, scatter_add_rows(slice_cols(g, 0, d), idx, x.rows()));
                    accumulate(adj, a,
                               scatter_add_rows(slice_cols(g, d, 2 * d), idx2, x.rows()));
                }
                return;
        }
        fail("Tape::emit_backward: unknown op");
    }

    std::vector<Node> nodes_;
};

}  // namespace sympgnn
