// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <cstdlib>

#include <sympgnn/dataset.hpp>
#include <sympgnn/planetoid.hpp>
#include <sympgnn/train.hpp>

using namespace sympgnn;

namespace {
std::string data_dir() {
    if (const char* env = std::getenv("SYMPGNN_TEST_DATA")) return env;
    return "tests/data";
}

NodeDataset three_node_fixture() {
    NodeDataset ds;
    ds.x = Matrix(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    ds.g.n = 3;
    ds.g.edges = {{0, 1}, {1, 2}};
    ds.y = {0, 1, 0};
    ds.train_mask = {true, true, false};
    ds.val_mask = {false, false, false};
    ds.test_mask = {false, false, true};
    return ds;
}
}  // namespace

TEST_CASE("dataset json round trip", "[data]") {
    NodeDataset ds = three_node_fixture();
    NodeDataset back = dataset_from_json(dataset_to_json(ds));
    CHECK(back.x.data() == ds.x.data());
    CHECK(back.g.edges == ds.g.edges);
    CHECK(back.y == ds.y);
    CHECK(back.train_mask == ds.train_mask);
    CHECK(back.test_mask == ds.test_mask);
}

TEST_CASE("dataset gzip round trip", "[data]") {
    NodeDataset ds = three_node_fixture();
    const std::string path = "/tmp/sympgnn_test_dataset.json.gz";
    save_dataset_json(ds, path);
    NodeDataset back = load_dataset_json(path);
    CHECK(back.x.data() == ds.x.data());
    CHECK(back.g.edges == ds.g.edges);
}

TEST_CASE("missing fields are reported by name", "[data]") {
    nlohmann::json j = dataset_to_json(three_node_fixture());
    j.erase("masks");
    CHECK_THROWS_WITH(dataset_from_json(j), Catch::Contains("masks"));
    nlohmann::json j2 = dataset_to_json(three_node_fixture());
    j2.at("masks").erase("val");
    CHECK_THROWS_WITH(dataset_from_json(j2), Catch::Contains("val"));
}

TEST_CASE("hand-written file parses to its contents", "[data]") {
    const std::string text = R"({
        "features": [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
        "edges": [[0, 1], [0, 2]],
        "labels": [1, 0, 1],
        "masks": {"train": [true, true, false],
                   "val": [false, false, false],
                   "test": [false, false, true]}
    })";
    NodeDataset ds = dataset_from_json(nlohmann::json::parse(text));
    CHECK(ds.n() == 3);
    CHECK(ds.x(1, 0) == 3.0);
    CHECK(ds.y == std::vector<int>{1, 0, 1});
    REQUIRE(ds.g.edges.size() == 2);
}

TEST_CASE("masks must be disjoint and cover every class", "[data]") {
    NodeDataset ds = three_node_fixture();
    ds.val_mask[0] = true;  // overlaps train
    CHECK_THROWS_WITH(ds.validate(), Catch::Contains("overlap"));

    NodeDataset ds2 = three_node_fixture();
    ds2.train_mask = {true, false, false};  // class 1 missing from train
    CHECK_THROWS_WITH(ds2.validate(), Catch::Contains("missing from the training mask"));
}

TEST_CASE("two moons generator properties", "[data]") {
    NodeDataset clean = make_two_moons_graph(80, 0.0, 4, 31);
    CHECK(clean.n() == 80);
    CHECK(homophily_ratio(clean.g, clean.y) > 0.9);

    NodeDataset a = make_two_moons_graph(40, 0.1, 3, 32);
    NodeDataset b = make_two_moons_graph(40, 0.1, 3, 32);
    CHECK(a.x.data() == b.x.data());
    CHECK(a.g.edges == b.g.edges);
    CHECK(a.y == b.y);
    CHECK(a.train_mask == b.train_mask);

    NodeDataset isolated = make_two_moons_graph(20, 0.1, 0, 33);
    CHECK(isolated.g.edges.empty());
    CHECK_NOTHROW(isolated.validate());
}

TEST_CASE("permuting a dataset preserves homophily and masked accuracy", "[data]") {
    NodeDataset ds = make_two_moons_graph(50, 0.08, 4, 34);
    Rng rng(35);
    SympModel model = make_la_sympgnn(3, 2, OperatorKind::normalized_adjacency,
                                      activation_tanh(), rng);
    model.encoder = make_affine_head(2, 6, rng);
    model.decoder = make_affine_head(3, 2, rng, true);

    const double hom = homophily_ratio(ds.g, ds.y);
    Matrix logits = classifier_logits(model, ds);
    const double acc = detail::masked_accuracy(logits, ds.y, ds.test_mask);

    Rng prng(36);
    for (int trial = 0; trial < 4; ++trial) {
        const auto perm = prng.permutation(ds.n());
        NodeDataset pd = permute_dataset(ds, perm);
        CHECK(std::abs(homophily_ratio(pd.g, pd.y) - hom) <= 1e-15);
        Matrix plogits = classifier_logits(model, pd);
        const double pacc = detail::masked_accuracy(plogits, pd.y, pd.test_mask);
        CHECK(std::abs(pacc - acc) <= 1e-10);
        double worst = 0;
        for (std::size_t i = 0; i < ds.n(); ++i)
            for (std::size_t c = 0; c < logits.cols(); ++c)
                worst = std::max(worst, std::abs(plogits(perm[i], c) - logits(i, c)));
        CHECK(worst <= 1e-10);
    }
}

// ---- planetoid conversion -----------------------------------------------------

TEST_CASE("planetoid fixtures convert identically across pickle protocols", "[data][planetoid]") {
    const auto expected = nlohmann::json::parse(
        read_text_file(data_dir() + "/planetoid_expected.json"));
    for (const std::string proto : {"planetoid_p0", "planetoid_p2", "planetoid_p4"}) {
        INFO("fixture " << proto);
        NodeDataset ds = convert_planetoid(data_dir() + "/" + proto, "synth");
        const auto want_features = expected.at("features");
        REQUIRE(ds.n() == want_features.size());
        for (std::size_t i = 0; i < ds.n(); ++i)
            for (std::size_t j = 0; j < ds.num_features(); ++j)
                CHECK(ds.x(i, j) == Approx(want_features[i][j].get<double>()).margin(1e-12));
        CHECK(ds.y == expected.at("labels").get<std::vector<int>>());
        auto want_edges = expected.at("edges").get<std::vector<std::vector<int>>>();
        REQUIRE(ds.g.edges.size() == want_edges.size());
        for (std::size_t e = 0; e < want_edges.size(); ++e) {
            CHECK(ds.g.edges[e].first == want_edges[e][0]);
            CHECK(ds.g.edges[e].second == want_edges[e][1]);
        }
        CHECK(ds.train_mask == expected.at("masks").at("train").get<std::vector<bool>>());
        CHECK(ds.val_mask == expected.at("masks").at("val").get<std::vector<bool>>());
        CHECK(ds.test_mask == expected.at("masks").at("test").get<std::vector<bool>>());
    }
}

TEST_CASE("python-2 style raw string pickles decode", "[data][planetoid]") {
    const std::string blob = read_text_file(data_dir() + "/py2_ndarray.pkl");
    pickle::Reader r(blob);
    pickle::NdArray arr = pickle::materialize_ndarray(r.parse());
    REQUIRE(arr.shape == std::vector<std::size_t>{2, 2});
    CHECK(arr.values == std::vector<double>{7, 8, 9, 10});
}

TEST_CASE("missing planetoid files give a layout hint", "[data][planetoid]") {
    CHECK_THROWS_WITH(convert_planetoid("/nonexistent", "cora"),
                      Catch::Contains("ind.<name>"));
    CHECK_THROWS_WITH(load_planetoid_cora("/nonexistent/cora.json"),
                      Catch::Contains("convert-planetoid"));
}

TEST_CASE("converted fixture round trips through the dataset json", "[data][planetoid]") {
    NodeDataset ds = convert_planetoid(data_dir() + "/planetoid_p2", "synth");
    const std::string path = "/tmp/sympgnn_planetoid_roundtrip.json.gz";
    save_dataset_json(ds, path);
    NodeDataset back = load_dataset_json(path);
    CHECK(back.x.data() == ds.x.data());
    CHECK(back.g.edges == ds.g.edges);
    CHECK(back.y == ds.y);
}
