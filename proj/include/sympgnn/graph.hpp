// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sympgnn/core.hpp"
#include "sympgnn/sparse.hpp"

namespace sympgnn {

/// Undirected graph without self-loops; optionally one positive weight per
/// edge (A_jk == A_kj by construction).
struct Graph {
    std::size_t n = 0;
    std::vector<std::pair<int, int>> edges;   // unordered pairs, stored j < k
    std::vector<double> weights;              // empty or one per edge

    bool weighted() const { return !weights.empty(); }

    void validate() const {
        if (weighted())
            require(weights.size() == edges.size(), "Graph: weight count != edge count");
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto [j, k] = edges[e];
            require(j >= 0 && k >= 0 && static_cast<std::size_t>(j) < n &&
                        static_cast<std::size_t>(k) < n,
                    "Graph: edge endpoint out of range");
            require(j != k, "Graph: self-loop not allowed");
            if (weighted()) require(weights[e] > 0.0, "Graph: nonpositive edge weight");
        }
    }

    double weight(std::size_t e) const { return weighted() ? weights[e] : 1.0; }

    /// Weighted degree of every node.
    std::vector<double> degrees() const {
        std::vector<double> d(n, 0.0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            d[static_cast<std::size_t>(edges[e].first)] += weight(e);
            d[static_cast<std::size_t>(edges[e].second)] += weight(e);
        }
        return d;
    }

    Matrix adjacency_dense() const {
        Matrix a(n, n);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [j, k] = edges[e];
            a(static_cast<std::size_t>(j), static_cast<std::size_t>(k)) = weight(e);
            a(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) = weight(e);
        }
        return a;
    }
};

/// Relabel nodes: node i of the input becomes node perm[i] of the output.
inline Graph permute_graph(const Graph& g, const std::vector<std::size_t>& perm) {
    require(perm.size() == g.n, "permute_graph: permutation size mismatch");
    Graph out;
    out.n = g.n;
    out.edges.reserve(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        int a = static_cast<int>(perm[static_cast<std::size_t>(g.edges[e].first)]);
        int b = static_cast<int>(perm[static_cast<std::size_t>(g.edges[e].second)]);
        if (a > b) std::swap(a, b);
        out.edges.emplace_back(a, b);
    }
    out.weights = g.weights;
    return out;
}

enum class OperatorKind { normalized_adjacency, laplacian, raw_adjacency };

inline std::string operator_kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::normalized_adjacency: return "normalized_adjacency";
        case OperatorKind::laplacian: return "laplacian";
        case OperatorKind::raw_adjacency: return "raw_adjacency";
    }
    fail("operator_kind_name: bad kind");
}

inline OperatorKind operator_kind_by_name(const std::string& s) {
    if (s == "normalized_adjacency") return OperatorKind::normalized_adjacency;
    if (s == "laplacian") return OperatorKind::laplacian;
    if (s == "raw_adjacency") return OperatorKind::raw_adjacency;
    fail("unknown message passing operator '" + s + "'");
}

/// One-step linear message passing operator: a symmetric n x n matrix. The
/// dense matrix is the definition; the CSR form is the path actually applied
/// (deterministic row sweep, same result either way).
struct MessagePassingOperator {
    OperatorKind kind = OperatorKind::raw_adjacency;
    std::size_t n = 0;
    Matrix matrix;    // n x n, symmetric
    SparsePtr sparse; // shares the same entries

    Matrix apply(const Matrix& x) const { return sparse->apply(x); }
};

namespace detail {
inline MessagePassingOperator make_operator(OperatorKind kind, std::size_t n, Matrix m) {
    MessagePassingOperator op;
    op.kind = kind;
    op.n = n;
    op.sparse = std::make_shared<const SparseMat>(SparseMat::from_dense(m));
    op.matrix = std::move(m);
    return op;
}
}  // namespace detail

/// D^{-1/2} A D^{-1/2}; rows and columns of isolated nodes are zero.
inline MessagePassingOperator normalized_adjacency(const Graph& g) {
    g.validate();
    const auto deg = g.degrees();
    std::vector<double> dinv(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) dinv[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    Matrix m(g.n, g.n);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [j, k] = g.edges[e];
        const double v = g.weight(e) * dinv[static_cast<std::size_t>(j)] *
                         dinv[static_cast<std::size_t>(k)];
        m(static_cast<std::size_t>(j), static_cast<std::size_t>(k)) = v;
        m(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) = v;
    }
    return detail::make_operator(OperatorKind::normalized_adjacency, g.n, std::move(m));
}

/// L = D - A with the (weighted) degree diagonal.
inline MessagePassingOperator laplacian(const Graph& g) {
    g.validate();
    Matrix m = scale(g.adjacency_dense(), -1.0);
    const auto deg = g.degrees();
    for (std::size_t i = 0; i < g.n; ++i) m(i, i) = deg[i];
    return detail::make_operator(OperatorKind::laplacian, g.n, std::move(m));
}

inline MessagePassingOperator raw_adjacency(const Graph& g) {
    g.validate();
    return detail::make_operator(OperatorKind::raw_adjacency, g.n, g.adjacency_dense());
}

inline MessagePassingOperator make_operator(OperatorKind kind, const Graph& g) {
    switch (kind) {
        case OperatorKind::normalized_adjacency: return normalized_adjacency(g);
        case OperatorKind::laplacian: return laplacian(g);
        case OperatorKind::raw_adjacency: return raw_adjacency(g);
    }
    fail("make_operator: bad kind");
}

/// Minimum-image displacement component for a periodic box.
inline double min_image(double dx, double box) {
    dx -= box * std::round(dx / box);
    return dx;
}

/// Fold every coordinate into [0, box).
inline Matrix wrap_positions(Matrix q, double box) {
    for (std::size_t k = 0; k < q.size(); ++k) {
        q[k] -= box * std::floor(q[k] / box);
        if (q[k] >= box) q[k] -= box;  // guard against floor rounding at the edge
    }
    return q;
}

/// Squared distance between rows i and j of q, minimum-image if box is set.
inline double pair_dist_sq(const Matrix& q, std::size_t i, std::size_t j,
                           std::optional<double> box) {
    double s = 0.0;
    for (std::size_t c = 0; c < q.cols(); ++c) {
        double d = q(i, c) - q(j, c);
        if (box) d = min_image(d, *box);
        s += d * d;
    }
    return s;
}

/// Unweighted edge (i, j) wherever the (minimum-image) distance is <= r_c.
inline Graph cutoff_graph(const Matrix& q, double r_c, std::optional<double> box = {}) {
    require(r_c > 0.0, "cutoff_graph: r_c must be positive");
    if (box)
        require(*box > 2.0 * r_c,
                "cutoff_graph: box must exceed 2 r_c (minimum-image ambiguity)");
    Graph g;
    g.n = q.rows();
    const double rc2 = r_c * r_c;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j)
            if (pair_dist_sq(q, i, j, box) <= rc2)
                g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return g;
}

/// Fraction of edges joining nodes with identical labels, each undirected
/// edge counted once.
inline double homophily_ratio(const Graph& g, const std::vector<int>& labels) {
    require(!g.edges.empty(), "homophily_ratio: graph has no edges");
    require(labels.size() == g.n, "homophily_ratio: label count != node count");
    std::size_t same = 0;
    for (const auto& [j, k] : g.edges)
        if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(k)]) ++same;
    return static_cast<double>(same) / static_cast<double>(g.edges.size());
}

/// Path graph of n = len(spring_constants)+1 nodes with A_{i,i+1} = k_i.
inline Graph chain_adjacency(const std::vector<double>& spring_constants) {
    require(!spring_constants.empty(), "chain_adjacency: need at least one spring");
    Graph g;
    g.n = spring_constants.size() + 1;
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        require(spring_constants[i] > 0.0, "chain_adjacency: nonpositive spring constant");
        g.edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
        g.weights.push_back(spring_constants[i]);
    }
    return g;
}

// --- JSON wire format: {"n": int, "edges": [[j,k],...], "weights": [...]} ---

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n;
    auto edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    if (g.weighted()) j["weights"] = g.weights;
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    require(j.contains("n") && j.contains("edges"), "graph JSON: missing 'n' or 'edges'");
    Graph g;
    g.n = j.at("n").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
        require(e.is_array() && e.size() == 2, "graph JSON: edge must be a pair");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    if (j.contains("weights")) g.weights = j.at("weights").get<std::vector<double>>();
    g.validate();
    return g;
}

}  // namespace sympgnn
