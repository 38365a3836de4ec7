// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "sympgnn/graph.hpp"
#include "sympgnn/io.hpp"

namespace sympgnn {

/// Transductive node-classification dataset: features, graph, labels and
/// disjoint train/validation/test masks.
struct NodeDataset {
    Matrix x;  // n x m features
    Graph g;
    std::vector<int> y;  // class ids 0..c-1
    std::vector<bool> train_mask, val_mask, test_mask;

    std::size_t n() const { return x.rows(); }
    std::size_t num_features() const { return x.cols(); }
    std::size_t num_classes() const {
        int c = 0;
        for (int v : y) c = std::max(c, v + 1);
        return static_cast<std::size_t>(c);
    }
    static std::size_t count(const std::vector<bool>& m) {
        std::size_t k = 0;
        for (bool b : m) k += b ? 1 : 0;
        return k;
    }

    void validate() const {
        g.validate();
        require(g.n == x.rows(), "NodeDataset: feature rows != graph nodes");
        require(y.size() == x.rows(), "NodeDataset: label count != node count");
        require(train_mask.size() == x.rows() && val_mask.size() == x.rows() &&
                    test_mask.size() == x.rows(),
                "NodeDataset: mask length != node count");
        const std::size_t c = num_classes();
        std::vector<bool> seen(c, false);
        for (std::size_t i = 0; i < y.size(); ++i) {
            require(y[i] >= 0, "NodeDataset: negative label");
            require(!(train_mask[i] && val_mask[i]) && !(train_mask[i] && test_mask[i]) &&
                        !(val_mask[i] && test_mask[i]),
                    "NodeDataset: masks overlap at node " + std::to_string(i));
            if (train_mask[i]) seen[static_cast<std::size_t>(y[i])] = true;
        }
        for (std::size_t k = 0; k < c; ++k)
            require(seen[k], "NodeDataset: class " + std::to_string(k) +
                                 " missing from the training mask");
    }
};

// ---- JSON schema ----------------------------------------------------------------
// {"features": [[...]], "edges": [[j,k],...], "weights": [...]?, "labels": [...],
//  "masks": {"train": [...], "val": [...], "test": [...]}}
// A .gz path reads and writes the gzip-compressed variant.

inline nlohmann::json dataset_to_json(const NodeDataset& ds) {
    nlohmann::json j;
    j["features"] = matrix_to_json(ds.x);
    nlohmann::json gj = graph_to_json(ds.g);
    j["edges"] = gj.at("edges");
    if (gj.contains("weights")) j["weights"] = gj.at("weights");
    j["labels"] = ds.y;
    j["masks"] = {{"train", ds.train_mask}, {"val", ds.val_mask}, {"test", ds.test_mask}};
    return j;
}

inline NodeDataset dataset_from_json(const nlohmann::json& j) {
    for (const char* field : {"features", "edges", "labels", "masks"})
        require(j.contains(field), std::string("dataset JSON: missing field '") + field + "'");
    NodeDataset ds;
    ds.x = matrix_from_json(j.at("features"));
    nlohmann::json gj;
    gj["n"] = ds.x.rows();
    gj["edges"] = j.at("edges");
    if (j.contains("weights")) gj["weights"] = j.at("weights");
    ds.g = graph_from_json(gj);
    ds.y = j.at("labels").get<std::vector<int>>();
    const auto& masks = j.at("masks");
    for (const char* field : {"train", "val", "test"})
        require(masks.contains(field),
                std::string("dataset JSON: masks missing field '") + field + "'");
    ds.train_mask = masks.at("train").get<std::vector<bool>>();
    ds.val_mask = masks.at("val").get<std::vector<bool>>();
    ds.test_mask = masks.at("test").get<std::vector<bool>>();
    ds.validate();
    return ds;
}

inline void save_dataset_json(const NodeDataset& ds, const std::string& path) {
    write_maybe_gzip(path, dataset_to_json(ds).dump());
}

inline NodeDataset load_dataset_json(const std::string& path) {
    require(file_exists(path), "dataset file not found: " + path);
    return dataset_from_json(nlohmann::json::parse(read_maybe_gzip(path)));
}

/// Loads the converted Planetoid Cora dataset and checks its published shape
/// (2708 nodes, 1433 features, 7 classes, 140/500/1000 split).
inline NodeDataset load_planetoid_cora(const std::string& path) {
    require(file_exists(path),
            "Planetoid Cora not found at '" + path +
                "'. Expected the JSON produced by `convert-planetoid` from the public "
                "Planetoid files (ind.cora.x, ind.cora.tx, ind.cora.allx, ind.cora.y, "
                "ind.cora.ty, ind.cora.ally, ind.cora.graph, ind.cora.test.index).");
    NodeDataset ds = load_dataset_json(path);
    require(ds.n() == 2708, "Planetoid Cora: expected 2708 nodes, got " +
                                std::to_string(ds.n()));
    require(ds.num_features() == 1433, "Planetoid Cora: expected 1433 features");
    require(ds.num_classes() == 7, "Planetoid Cora: expected 7 classes");
    require(NodeDataset::count(ds.train_mask) == 140 &&
                NodeDataset::count(ds.val_mask) == 500 &&
                NodeDataset::count(ds.test_mask) == 1000,
            "Planetoid Cora: expected the 140/500/1000 Planetoid split");
    return ds;
}

/// Two interleaved half-moons with a symmetric k-NN graph; 60/20/20 split.
/// Desk-scale classification fixture.
inline NodeDataset make_two_moons_graph(std::size_t n, double noise, std::size_t k_nn,
                                        std::uint64_t seed) {
    require(n >= 10, "make_two_moons_graph: need n >= 10");
    Rng rng(seed);
    NodeDataset ds;
    ds.x = Matrix(n, 2);
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = M_PI * rng.canonical();
        const bool second = (i % 2 == 1);
        double px = second ? 1.0 - std::cos(t) : std::cos(t);
        double py = second ? 0.5 - std::sin(t) : std::sin(t);
        ds.x(i, 0) = px + noise * rng.normal();
        ds.x(i, 1) = py + noise * rng.normal();
        ds.y[i] = second ? 1 : 0;
    }
    ds.g.n = n;
    if (k_nn > 0) {
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(n - 1);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dx = ds.x(i, 0) - ds.x(j, 0), dy = ds.x(i, 1) - ds.x(j, 1);
                dist.emplace_back(dx * dx + dy * dy, j);
            }
            std::sort(dist.begin(), dist.end());
            for (std::size_t k = 0; k < std::min(k_nn, dist.size()); ++k) {
                int a = static_cast<int>(i), b = static_cast<int>(dist[k].second);
                if (a > b) std::swap(a, b);
                edges.emplace_back(a, b);
            }
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        ds.g.edges = std::move(edges);
    }
    // random 60/20/20 split; retry until both classes appear in training
    ds.train_mask.assign(n, false);
    ds.val_mask.assign(n, false);
    ds.test_mask.assign(n, false);
    while (true) {
        std::fill(ds.train_mask.begin(), ds.train_mask.end(), false);
        std::fill(ds.val_mask.begin(), ds.val_mask.end(), false);
        std::fill(ds.test_mask.begin(), ds.test_mask.end(), false);
        const auto perm = rng.permutation(n);
        const std::size_t n_train = (n * 6) / 10, n_val = (n * 2) / 10;
        bool c0 = false, c1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train) {
                ds.train_mask[perm[i]] = true;
                (ds.y[perm[i]] == 0 ? c0 : c1) = true;
            } else if (i < n_train + n_val) {
                ds.val_mask[perm[i]] = true;
            } else {
                ds.test_mask[perm[i]] = true;
            }
        }
        if (c0 && c1) break;
    }
    ds.validate();
    return ds;
}

/// Consistent relabeling of every field (equivariance testing).
inline NodeDataset permute_dataset(const NodeDataset& ds, const std::vector<std::size_t>& perm) {
    NodeDataset out;
    out.x = Matrix(ds.x.rows(), ds.x.cols());
    out.y.resize(ds.y.size());
    out.train_mask.resize(ds.n());
    out.val_mask.resize(ds.n());
    out.test_mask.resize(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t c = 0; c < ds.x.cols(); ++c) out.x(perm[i], c) = ds.x(i, c);
        out.y[perm[i]] = ds.y[i];
        out.train_mask[perm[i]] = ds.train_mask[i];
        out.val_mask[perm[i]] = ds.val_mask[i];
        out.test_mask[perm[i]] = ds.test_mask[i];
    }
    out.g = permute_graph(ds.g, perm);
    return out;
}

}  // namespace sympgnn
