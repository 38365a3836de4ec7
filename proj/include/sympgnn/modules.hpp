// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file modules.hpp
 * @brief Symplectic building blocks: LA linear, LA activation and G modules.
 *
 * Every module is a shear in phase space: a low module updates positions from
 * an energy of the momenta, q <- q + grad T(p); an up module updates momenta
 * from an energy of the positions, p <- p + grad (-V)(q). Shears with
 * gradient structure are exactly symplectic and, because the energies are
 * built from node sums and symmetric message passing, permutation
 * equivariant.
 */

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "sympgnn/graph.hpp"
#include "sympgnn/mlp.hpp"
#include "sympgnn/tape.hpp"

namespace sympgnn {

/// Paired momentum/position features, one row per node.
struct PhaseState {
    Matrix p, q;

    void validate() const {
        require(p.same_shape(q), "PhaseState: p " + p.shape_str() + " and q " + q.shape_str() +
                                     " must share shape");
        p.check_finite("PhaseState.p");
        q.check_finite("PhaseState.q");
    }
    std::size_t n() const { return p.rows(); }
    std::size_t d() const { return p.cols(); }
};

using PhaseMap = std::function<PhaseState(const PhaseState&)>;
using GraphPhaseMap = std::function<PhaseState(const PhaseState&, const Graph&)>;

enum class Flavor { up, low };

inline std::string flavor_name(Flavor f) { return f == Flavor::up ? "up" : "low"; }
inline Flavor flavor_by_name(const std::string& s) {
    if (s == "up") return Flavor::up;
    if (s == "low") return Flavor::low;
    fail("unknown module flavor '" + s + "'");
}

/// q <- q + B p (K + K^T)   (low)     p <- p + B q (S + S^T)   (up)
/// where B is the message passing operator. Equivalent to the gradient of
/// the quadratic energy fl(p)^T (K kron B) fl(p).
struct LaLinearModule {
    Flavor flavor = Flavor::low;
    Matrix param;  // d x d, stored unsymmetrized
};

/// q <- q + broadcast(a^T) .* sigma(p)   (low), and the mirrored up rule.
/// Gradient of 1_{1 x n} (antideriv sigma)(p) a.
struct LaActivationModule {
    Flavor flavor = Flavor::low;
    Matrix coeff;  // 1 x d
    ActivationKind act = activation_tanh();
};

/// Low: kinetic energy T = sum_j phi_v(p^j), phi_v: R^d -> R.
/// Up: -V = sum over ordered edge incidences of phi_e(q^j, q^k [, A_jk]).
/// Updates are tape gradients of these sums. out_scale is a fixed prefactor
/// on the energy, chosen per task so trained weights stay O(1).
struct GModule {
    Flavor flavor = Flavor::low;
    Mlp net;  // phi_v (low) or phi_e (up)
    bool uses_edge_weight = false;
    double out_scale = 1.0;
};

using SympModule = std::variant<LaLinearModule, LaActivationModule, GModule>;

inline Flavor module_flavor(const SympModule& m) {
    return std::visit([](const auto& x) { return x.flavor; }, m);
}

/// Everything a module stack needs to know about the graph it runs on.
/// Ordered edge incidences list each undirected edge twice, once per
/// orientation, matching the double sum in the potential.
struct StackContext {
    const Graph* graph = nullptr;
    std::optional<MessagePassingOperator> op;
    std::shared_ptr<const std::vector<int>> edge_src, edge_dst;
    std::shared_ptr<const Matrix> edge_weight_col;  // 2|E| x 1 when weighted

    const MessagePassingOperator& oper() const {
        require(op.has_value(), "StackContext: no message passing operator bound");
        return *op;
    }
};

inline StackContext make_stack_context(const Graph& g,
                                       std::optional<OperatorKind> op_kind) {
    g.validate();
    StackContext ctx;
    ctx.graph = &g;
    if (op_kind) ctx.op = make_operator(*op_kind, g);
    auto src = std::make_shared<std::vector<int>>();
    auto dst = std::make_shared<std::vector<int>>();
    src->reserve(2 * g.edges.size());
    dst->reserve(2 * g.edges.size());
    for (const auto& [j, k] : g.edges) {
        src->push_back(j);
        dst->push_back(k);
        src->push_back(k);
        dst->push_back(j);
    }
    ctx.edge_src = std::move(src);
    ctx.edge_dst = std::move(dst);
    if (g.weighted()) {
        Matrix w(2 * g.edges.size(), 1);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            w(2 * e, 0) = g.weights[e];
            w(2 * e + 1, 0) = g.weights[e];
        }
        ctx.edge_weight_col = std::make_shared<const Matrix>(std::move(w));
    }
    return ctx;
}

/// Tape-bound parameters of one module.
struct ModuleVars {
    Var mat;      // la_linear param or la_activation coeff
    MlpVars mlp;  // g module
};

inline ModuleVars bind_module(Tape& t, const SympModule& m, bool requires_grad) {
    ModuleVars v;
    if (const auto* lin = std::get_if<LaLinearModule>(&m)) {
        v.mat = t.leaf(lin->param, requires_grad);
    } else if (const auto* act = std::get_if<LaActivationModule>(&m)) {
        v.mat = t.leaf(act->coeff, requires_grad);
    } else {
        v.mlp = bind_mlp(t, std::get<GModule>(m).net, requires_grad);
    }
    return v;
}

struct PhaseVars {
    Var p, q;
};

namespace detail {

/// sum_j phi_v(p^j) as a tape scalar.
inline Var g_node_energy(Tape& t, const GModule& m, const MlpVars& mv, Var rows) {
    Var e = t.sum_all(mlp_forward(t, m.net, mv, rows));
    return m.out_scale == 1.0 ? e : t.scale(e, m.out_scale);
}

/// sum over ordered incidences of phi_e(q^j, q^k [, A_jk]) as a tape scalar.
inline Var g_edge_energy(Tape& t, const GModule& m, const MlpVars& mv, Var q,
                         const StackContext& ctx) {
    const std::size_t d = t.value(q).cols();
    const bool weighted = ctx.graph->weighted();
    require(weighted == m.uses_edge_weight,
            weighted ? "GModule: weighted graph but module does not take edge weights"
                     : "GModule: module expects edge weights but graph is unweighted");
    const std::size_t in_w = 2 * d + (weighted ? 1 : 0);
    require(m.net.in_dim() == in_w, "GModule: phi_e input width " +
                                        std::to_string(m.net.in_dim()) + " != " +
                                        std::to_string(in_w));
    Var u = t.gather_pair(q, ctx.edge_src, ctx.edge_dst, in_w);
    if (weighted)
        u = t.add(u, t.scatter_cols(t.leaf(*ctx.edge_weight_col), 2 * d, in_w));
    Var e = t.sum_all(mlp_forward(t, m.net, mv, u));
    return m.out_scale == 1.0 ? e : t.scale(e, m.out_scale);
}

}  // namespace detail

/// Apply one module on the tape. The update of the touched half is the
/// gradient of the module energy; the other half passes through untouched.
inline PhaseVars module_forward(Tape& t, const SympModule& mod, const ModuleVars& mv,
                                PhaseVars s, const StackContext& ctx) {
    const std::size_t n = t.value(s.p).rows();
    require(t.value(s.p).same_shape(t.value(s.q)), "module_forward: p/q shape mismatch");

    if (const auto* lin = std::get_if<LaLinearModule>(&mod)) {
        const auto& op = ctx.oper();
        require(op.n == n, "la_linear: operator size " + std::to_string(op.n) +
                               " != node count " + std::to_string(n));
        require(lin->param.rows() == t.value(s.p).cols() &&
                    lin->param.cols() == t.value(s.p).cols(),
                "la_linear: param must be d x d");
        Var sym = t.add(mv.mat, t.transpose(mv.mat));
        if (lin->flavor == Flavor::low) {
            Var delta = t.matmul(t.spmm(op.sparse, op.sparse, s.p), sym);
            return {s.p, t.add(s.q, delta)};
        }
        Var delta = t.matmul(t.spmm(op.sparse, op.sparse, s.q), sym);
        return {t.add(s.p, delta), s.q};
    }

    if (const auto* act = std::get_if<LaActivationModule>(&mod)) {
        require(act->coeff.rows() == 1 && act->coeff.cols() == t.value(s.p).cols(),
                "la_activation: coeff must be 1 x d");
        Var coeff_rows = t.row_bcast(mv.mat, n);
        if (act->flavor == Flavor::low) {
            Var delta = t.mul(coeff_rows, t.unary(s.p, act->act.sigma));
            return {s.p, t.add(s.q, delta)};
        }
        Var delta = t.mul(coeff_rows, t.unary(s.q, act->act.sigma));
        return {t.add(s.p, delta), s.q};
    }

    const auto& g = std::get<GModule>(mod);
    require(ctx.graph != nullptr && ctx.graph->n == n,
            "g_module: graph node count mismatch");
    if (g.flavor == Flavor::low) {
        require(g.net.in_dim() == t.value(s.p).cols(), "g_module: phi_v input width mismatch");
        Var energy = detail::g_node_energy(t, g, mv.mlp, s.p);
        Var delta = t.grad1(energy, s.p);
        return {s.p, t.add(s.q, delta)};
    }
    Var energy = detail::g_edge_energy(t, g, mv.mlp, s.q, ctx);
    Var delta = t.grad1(energy, s.q);
    return {t.add(s.p, delta), s.q};
}

namespace detail {
/// One-shot plain application through a private tape. State leaves require
/// grad so the energy gradients inside G modules are available.
inline PhaseState apply_on_fresh_tape(const SympModule& mod, const PhaseState& s,
                                      const StackContext& ctx) {
    s.validate();
    Tape t;
    ModuleVars mv = bind_module(t, mod, false);
    PhaseVars sv{t.leaf(s.p, true), t.leaf(s.q, true)};
    PhaseVars out = module_forward(t, mod, mv, sv, ctx);
    return {t.value(out.p), t.value(out.q)};
}
}  // namespace detail

inline PhaseState la_linear_apply(const LaLinearModule& m, const PhaseState& s,
                                  const MessagePassingOperator& op) {
    StackContext ctx;
    Graph dummy;
    dummy.n = op.n;
    ctx.graph = &dummy;
    ctx.op = op;
    return detail::apply_on_fresh_tape(SympModule{m}, s, ctx);
}

inline PhaseState la_activation_apply(const LaActivationModule& m, const PhaseState& s) {
    StackContext ctx;
    Graph dummy;
    dummy.n = s.n();
    ctx.graph = &dummy;
    return detail::apply_on_fresh_tape(SympModule{m}, s, ctx);
}

inline PhaseState g_module_apply(const GModule& m, const PhaseState& s, const Graph& g) {
    StackContext ctx = make_stack_context(g, std::nullopt);
    return detail::apply_on_fresh_tape(SympModule{m}, s, ctx);
}

/// The module energy as a plain number (the quantity whose gradient is the
/// update). Exposed for the oracle tests.
inline double module_energy(const SympModule& mod, const PhaseState& s,
                            const StackContext& ctx) {
    Tape t;
    ModuleVars mv = bind_module(t, mod, false);
    Var half = t.leaf(module_flavor(mod) == Flavor::low ? s.p : s.q, true);
    if (const auto* lin = std::get_if<LaLinearModule>(&mod)) {
        // fl(x)^T (K kron B) fl(x) == sum( (B x) .* (x K^T) )
        Var k = t.leaf(lin->param);
        Var bx = t.spmm(ctx.oper().sparse, ctx.oper().sparse, half);
        Var xk = t.matmul(half, t.transpose(k));
        return t.value(t.sum_all(t.mul(bx, xk)))[0];
    }
    if (const auto* act = std::get_if<LaActivationModule>(&mod)) {
        Var anti = t.unary(half, act->act.sigma_antideriv);
        Var w = t.row_bcast(t.leaf(act->coeff), t.value(half).rows());
        return t.value(t.sum_all(t.mul(anti, w)))[0];
    }
    const auto& g = std::get<GModule>(mod);
    if (g.flavor == Flavor::low)
        return t.value(detail::g_node_energy(t, g, bind_mlp(t, g.net, false), half))[0];
    return t.value(detail::g_edge_energy(t, g, bind_mlp(t, g.net, false), half, ctx))[0];
}

}  // namespace sympgnn
