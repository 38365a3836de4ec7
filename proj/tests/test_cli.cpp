// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end checks of the command-line tool. The binary path comes from the
// SYMPGNN_CLI environment variable (set by ctest).

#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sympgnn/dataset.hpp>
#include <sympgnn/io.hpp>

using namespace sympgnn;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* env = std::getenv("SYMPGNN_CLI");
    REQUIRE(env != nullptr);
    return env;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& rel = "") const {
        return (rel.empty() ? path : path / rel).string();
    }
};

void write_json(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("generate rejects a nonpositive timestep with exit 2", "[cli]") {
    TempDir dir("sympgnn_cli_badh");
    write_json(dir.str("cfg.json"),
               R"({"system":"harmonic","n":4,"h":-0.1,"frames":10,"spring_constants":[2,2,2]})");
    CHECK(run("generate --config " + dir.str("cfg.json") + " --out " + dir.str("out")) == 2);
}

TEST_CASE("unknown flags exit with code 2", "[cli]") {
    CHECK(run("generate --definitely-not-a-flag") == 2);
    CHECK(run("") == 2);
}

TEST_CASE("generate then train then rollout produces the promised files", "[cli][slow]") {
    TempDir dir("sympgnn_cli_pipeline");
    write_json(dir.str("gen.json"),
               R"({"system":"harmonic","n":4,"h":0.1,"frames":40,"seed":3})");
    REQUIRE(run("generate --config " + dir.str("gen.json") + " --out " + dir.str("gen")) == 0);
    CHECK(fs::exists(dir.str("gen/trajectory.jsonl")));
    CHECK(fs::exists(dir.str("gen/trajectory.csv")));
    CHECK(fs::exists(dir.str("gen/graph.json")));
    CHECK(fs::exists(dir.str("gen/resolved_config.json")));

    write_json(dir.str("train.json"),
               R"({"train_frames":30,"model":{"type":"la","pairs":2,"operator":"laplacian"},
                   "iterations":150,"learning_rate":0.005,"seed":4})");
    REQUIRE(run("train --config " + dir.str("train.json") + " --trajectory " +
                dir.str("gen/trajectory.jsonl") + " --graph " + dir.str("gen/graph.json") +
                " --out " + dir.str("train")) == 0);
    CHECK(fs::exists(dir.str("train/checkpoint.json")));
    CHECK(fs::exists(dir.str("train/loss_curve.csv")));

    REQUIRE(run("rollout --checkpoint " + dir.str("train/checkpoint.json") + " --trajectory " +
                dir.str("gen/trajectory.jsonl") + " --graph " + dir.str("gen/graph.json") +
                " --start-frame 29 --steps 10 --out " + dir.str("roll")) == 0);
    CHECK(fs::exists(dir.str("roll/predicted.jsonl")));
    REQUIRE(fs::exists(dir.str("roll/mse_vs_truth.csv")));
    REQUIRE(fs::exists(dir.str("roll/energy_curve.csv")));

    // MSE column parses and is finite
    std::ifstream mse(dir.str("roll/mse_vs_truth.csv"));
    std::string line;
    std::getline(mse, line);
    CHECK(line == "step,mse");
    int rows = 0;
    while (std::getline(mse, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::isfinite(std::stod(line.substr(comma + 1))));
        ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("fixed seeds give byte-identical outputs", "[cli]") {
    TempDir dir("sympgnn_cli_seed");
    write_json(dir.str("gen.json"),
               R"({"system":"harmonic","n":3,"h":0.1,"frames":12,"seed":9})");
    REQUIRE(run("generate --config " + dir.str("gen.json") + " --out " + dir.str("a")) == 0);
    REQUIRE(run("generate --config " + dir.str("gen.json") + " --out " + dir.str("b")) == 0);
    CHECK(read_text_file(dir.str("a/trajectory.jsonl")) ==
          read_text_file(dir.str("b/trajectory.jsonl")));
    CHECK(read_text_file(dir.str("a/trajectory.csv")) == read_text_file(dir.str("b/trajectory.csv")));
}

TEST_CASE("verify passes on a fresh LA model", "[cli]") {
    TempDir dir("sympgnn_cli_verify");
    REQUIRE(run("verify --fresh la --seed 5 --out " + dir.str("v")) == 0);
    auto report = nlohmann::json::parse(read_text_file(dir.str("v/report.json")));
    CHECK(report.at("all_passed").get<bool>());
}

TEST_CASE("verify passes on a fresh G model", "[cli]") {
    TempDir dir("sympgnn_cli_verify_g");
    REQUIRE(run("verify --fresh g --seed 6 --out " + dir.str("v")) == 0);
    auto report = nlohmann::json::parse(read_text_file(dir.str("v/report.json")));
    CHECK(report.at("all_passed").get<bool>());
}

TEST_CASE("classify trains on a dataset file and sweeps depth", "[cli][slow]") {
    TempDir dir("sympgnn_cli_classify");
    NodeDataset ds = make_two_moons_graph(60, 0.08, 4, 41);
    save_dataset_json(ds, dir.str("moons.json"));
    write_json(dir.str("cls.json"),
               R"({"model":{"d":4,"pairs":1,"operator":"normalized_adjacency"},
                   "iterations":60,"learning_rate":0.02,"weight_decay":0.0,
                   "dropout":0.1,"seed":2})");
    REQUIRE(run("classify --config " + dir.str("cls.json") + " --dataset " +
                dir.str("moons.json") + " --out " + dir.str("single")) == 0);
    CHECK(fs::exists(dir.str("single/accuracy.csv")));
    CHECK(fs::exists(dir.str("single/checkpoint.json")));
    CHECK(fs::exists(dir.str("single/loss_curve.csv")));
    CHECK(fs::exists(dir.str("single/val_accuracy.csv")));

    REQUIRE(run("classify --config " + dir.str("cls.json") + " --dataset " +
                dir.str("moons.json") + " --depth-sweep 1,2 --out " + dir.str("sweep")) == 0);
    std::ifstream acc(dir.str("sweep/accuracy.csv"));
    std::string line;
    std::getline(acc, line);
    CHECK(line == "depth,test_accuracy");
    int rows = 0;
    while (std::getline(acc, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("missing inputs exit with code 2", "[cli]") {
    TempDir dir("sympgnn_cli_missing");
    write_json(dir.str("t.json"), R"({"iterations":5})");
    CHECK(run("train --config " + dir.str("t.json") + " --trajectory /no/such/file --out " +
              dir.str("o")) == 2);
    CHECK(run("rollout --checkpoint /no/such.json --trajectory /no/such.jsonl --out " +
              dir.str("o")) == 2);
}
