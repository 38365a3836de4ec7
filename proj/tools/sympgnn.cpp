// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: data generation, training, rollout, classification,
// verification and Planetoid conversion. Every run writes its fully resolved
// config next to the outputs so results can be reproduced byte for byte.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <sympgnn/io.hpp>
#include <sympgnn/model.hpp>
#include <sympgnn/planetoid.hpp>
#include <sympgnn/train.hpp>
#include <sympgnn/verify.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sympgnn;

namespace {

/// Bad flags or config contents: exit code 2.
struct UsageError : Error {
    using Error::Error;
};

json load_config(const std::string& path) {
    if (!file_exists(path)) throw UsageError("config file not found: " + path);
    try {
        return json::parse(read_maybe_gzip(path));
    } catch (const json::exception& e) {
        throw UsageError("config parse error in " + path + ": " + e.what());
    }
}

template <typename T>
T cfg_get(const json& j, const std::string& key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void write_resolved_config(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/resolved_config.json", cfg.dump(2) + "\n");
}

Rng seed_rng(const json& cfg) { return Rng(cfg.value("seed", std::uint64_t{0})); }

// ---- model construction from config ------------------------------------------

SympModel model_from_config(const json& mc, std::size_t d_data, bool weighted_graph,
                            Rng& rng) {
    const std::string type = cfg_get<std::string>(mc, "type", "la");
    const auto pairs = cfg_get<std::size_t>(mc, "pairs", 4);
    const std::string opname = cfg_get<std::string>(mc, "operator", "laplacian");
    const std::string act = cfg_get<std::string>(mc, "activation", "tanh");
    const bool identity_init = cfg_get<bool>(mc, "identity_init", true);
    if (type == "la") {
        if (mc.contains("pattern"))
            return make_la_stack(d_data, mc.at("pattern").get<std::string>(),
                                 operator_kind_by_name(opname), activation_by_name(act), rng,
                                 identity_init);
        SympModel m = make_la_sympgnn(d_data, pairs, operator_kind_by_name(opname),
                                      activation_by_name(act), rng, identity_init);
        return m;
    }
    if (type == "g") {
        auto hidden = cfg_get<std::vector<std::size_t>>(mc, "hidden", {24});
        GStackOptions opt;
        opt.diff_init_scale = cfg_get<double>(mc, "diff_init_scale", 0.0);
        opt.v_input_scale = cfg_get<double>(mc, "v_input_scale", 0.0);
        opt.out_scale_v = cfg_get<double>(mc, "out_scale_v", 1.0);
        opt.out_scale_e = cfg_get<double>(mc, "out_scale_e", 1.0);
        SympModel m = make_g_sympgnn(d_data, pairs, hidden, activation_by_name(act).sigma,
                                     weighted_graph, rng, opt);
        return m;
    }
    throw UsageError("model.type must be 'la' or 'g', got '" + type + "'");
}

// ---- generate ------------------------------------------------------------------

int cmd_generate(const json& cfg, const std::string& out_dir) {
    const std::string system = cfg_get<std::string>(cfg, "system", "");
    if (system != "harmonic" && system != "lj")
        throw UsageError("generate: config 'system' must be 'harmonic' or 'lj'");
    const auto frames = cfg_get<std::size_t>(cfg, "frames", 0);
    if (frames < 2) throw UsageError("generate: config 'frames' must be >= 2");

    write_resolved_config(cfg, out_dir);
    if (system == "harmonic") {
        HarmonicChainConfig hc;
        hc.n = cfg_get<std::size_t>(cfg, "n", 40);
        hc.h = cfg_get<double>(cfg, "h", 0.1);
        if (hc.h <= 0) throw UsageError("generate: h must be positive");
        hc.substeps = cfg_get<std::size_t>(cfg, "substeps", 100);
        hc.seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
        if (cfg.contains("spring_constants")) {
            hc.spring_constants = cfg.at("spring_constants").get<std::vector<double>>();
        } else {
            Rng krng(hc.seed + 1);
            hc.spring_constants = sample_spring_constants(hc.n, krng);
        }
        hc.validate();
        Trajectory traj = generate_harmonic_trajectory(hc, frames);
        trajectory_save(traj, out_dir + "/trajectory.jsonl");
        write_text_file(out_dir + "/trajectory.csv", trajectory_to_csv(traj));
        write_text_file(out_dir + "/graph.json",
                        graph_to_json(chain_adjacency(hc.spring_constants)).dump() + "\n");
        std::cout << "wrote " << traj.frames() << "-frame harmonic trajectory (n=" << hc.n
                  << ") to " << out_dir << "\n";
        return 0;
    }
    LJConfig lj;  // defaults: desk-scale Argon
    lj.n = cfg_get<std::size_t>(cfg, "n", lj.n);
    lj.epsilon = cfg_get<double>(cfg, "epsilon", lj.epsilon);
    lj.sigma = cfg_get<double>(cfg, "sigma", lj.sigma);
    lj.r_c = cfg_get<double>(cfg, "r_c", lj.r_c);
    lj.box = cfg_get<double>(cfg, "box", lj.box);
    lj.uniform_mass = cfg_get<double>(cfg, "mass", lj.uniform_mass);
    lj.h_internal = cfg_get<double>(cfg, "h_internal", lj.h_internal);
    if (lj.h_internal <= 0) throw UsageError("generate: h_internal must be positive");
    lj.sample_stride = cfg_get<std::size_t>(cfg, "sample_stride", lj.sample_stride);
    lj.seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
    lj.k_boltzmann = cfg_get<double>(cfg, "k_boltzmann", lj.k_boltzmann);
    lj.init_temperature = cfg_get<double>(cfg, "init_temperature", lj.init_temperature);
    lj.burn_in_steps = cfg_get<std::size_t>(cfg, "burn_in_steps", lj.burn_in_steps);
    lj.validate();
    Trajectory traj = generate_lj_trajectory(lj, frames);
    trajectory_save(traj, out_dir + "/trajectory.jsonl");
    write_text_file(out_dir + "/trajectory.csv", trajectory_to_csv(traj));
    std::cout << "wrote " << traj.frames() << "-frame LJ trajectory (n=" << lj.n << ") to "
              << out_dir << "\n";
    return 0;
}

// ---- train (system identification) ---------------------------------------------

int cmd_train(const json& cfg, const std::string& traj_path, const std::string& graph_path,
              const std::string& out_dir) {
    if (!file_exists(traj_path)) throw UsageError("train: trajectory not found: " + traj_path);
    Trajectory full = trajectory_load(traj_path);
    const auto train_frames =
        std::min<std::size_t>(cfg_get<std::size_t>(cfg, "train_frames", full.frames()),
                              full.frames());
    if (train_frames < 2) throw UsageError("train: need at least two training frames");

    Graph g;
    if (!graph_path.empty()) {
        if (!file_exists(graph_path)) throw UsageError("train: graph not found: " + graph_path);
        g = graph_from_json(json::parse(read_maybe_gzip(graph_path)));
    } else if (!full.has_graphs()) {
        throw UsageError("train: no per-frame graphs in trajectory and no --graph given");
    }

    Trajectory train_traj;
    train_traj.h = full.h;
    train_traj.metadata = full.metadata;
    train_traj.states.assign(full.states.begin(),
                             full.states.begin() + static_cast<long>(train_frames));
    if (full.has_graphs())
        train_traj.graphs.assign(full.graphs.begin(),
                                 full.graphs.begin() + static_cast<long>(train_frames));

    TrainConfig tc;
    tc.iterations = cfg_get<std::size_t>(cfg, "iterations", 2000);
    tc.learning_rate = cfg_get<double>(cfg, "learning_rate", 1e-3);
    tc.weight_decay = cfg_get<double>(cfg, "weight_decay", 0.0);
    tc.seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
    tc.batch_chunks = cfg_get<std::size_t>(cfg, "batch_chunks", 1);
    tc.pair_stride = cfg_get<std::size_t>(cfg, "pair_stride", 1);
    tc.validate();

    std::optional<double> box;
    if (full.metadata.contains("box")) box = full.metadata.at("box").get<double>();

    Rng rng(tc.seed);
    const std::size_t d = train_traj.states.front().d();
    const bool weighted = !full.has_graphs() && g.weighted();
    SympModel model = model_from_config(cfg.value("model", json::object()), d, weighted, rng);

    write_resolved_config(cfg, out_dir);
    auto res = train_system_id(train_traj, std::move(model), g, tc, box,
                               [](std::size_t it, double loss) {
                                   if (it % 1000 == 0)
                                       std::cout << "iter " << it << " loss " << loss << "\n";
                               });
    write_text_file(out_dir + "/checkpoint.json", model_to_checkpoint(res.model).dump() + "\n");
    write_text_file(out_dir + "/loss_curve.csv", curve_to_csv(res.loss_curve, "loss"));
    std::cout << "final one-step MSE " << res.loss_curve.back() << "; checkpoint in " << out_dir
              << "\n";
    return 0;
}

// ---- rollout --------------------------------------------------------------------

double state_mse(const PhaseState& a, const PhaseState& b, std::optional<double> box) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t c = 0; c < a.d(); ++c) {
            const double dp = a.p(i, c) - b.p(i, c);
            double dq = a.q(i, c) - b.q(i, c);
            if (box) dq = min_image(dq, *box);
            s += dp * dp + dq * dq;
        }
    return s / static_cast<double>(2 * a.n() * a.d());
}

int cmd_rollout(const std::string& ckpt_path, const std::string& traj_path,
                const std::string& graph_path, std::size_t start_frame, std::size_t steps,
                const std::string& out_dir) {
    if (!file_exists(ckpt_path)) throw UsageError("rollout: checkpoint not found: " + ckpt_path);
    if (!file_exists(traj_path)) throw UsageError("rollout: trajectory not found: " + traj_path);
    SympModel model = model_from_checkpoint(json::parse(read_maybe_gzip(ckpt_path)));
    Trajectory truth = trajectory_load(traj_path);
    if (start_frame == static_cast<std::size_t>(-1)) start_frame = truth.frames() - 1;
    if (start_frame >= truth.frames())
        throw UsageError("rollout: start frame beyond trajectory end");
    if (steps == 0) steps = truth.frames() - 1 - start_frame;

    RolloutPolicy pol;
    Graph g0;
    if (truth.has_graphs()) {
        pol.kind = GraphPolicy::rebuild;
        pol.r_c = truth.metadata.at("r_c").get<double>();
        pol.box = truth.metadata.at("box").get<double>();
        g0 = truth.graphs[start_frame];
    } else if (!graph_path.empty()) {
        g0 = graph_from_json(json::parse(read_maybe_gzip(graph_path)));
    } else {
        throw UsageError("rollout: no graph available (need --graph or per-frame graphs)");
    }

    json rc = {{"checkpoint", ckpt_path}, {"trajectory", traj_path},
               {"start_frame", start_frame}, {"steps", steps}};
    write_resolved_config(rc, out_dir);

    Trajectory pred = rollout(model, truth.states[start_frame], steps, g0, pol, truth.h);
    pred.metadata["start_frame"] = start_frame;
    trajectory_save(pred, out_dir + "/predicted.jsonl");

    // MSE vs truth for the overlapping window
    std::ostringstream mse_csv;
    mse_csv.precision(17);
    mse_csv << "step,mse\n";
    std::optional<double> box;
    if (truth.metadata.contains("box")) box = truth.metadata.at("box").get<double>();
    for (std::size_t k = 1; k < pred.frames() && start_frame + k < truth.frames(); ++k)
        mse_csv << k << ","
                << state_mse(pred.states[k], truth.states[start_frame + k], box) << "\n";
    write_text_file(out_dir + "/mse_vs_truth.csv", mse_csv.str());

    // energy of predicted frames under the generating Hamiltonian
    const std::string system = truth.metadata.value("system", "");
    std::function<double(const PhaseState&)> ham;
    if (system == "harmonic_chain") {
        HarmonicChainConfig hc;
        hc.n = truth.metadata.at("n").get<std::size_t>();
        hc.h = truth.metadata.at("h").get<double>();
        hc.spring_constants =
            truth.metadata.at("spring_constants").get<std::vector<double>>();
        ham = [hc](const PhaseState& s) { return harmonic_energy(s, hc); };
    } else if (system == "lennard_jones_2d") {
        LJConfig lj;
        lj.n = truth.metadata.at("n").get<std::size_t>();
        lj.epsilon = truth.metadata.at("epsilon").get<double>();
        lj.sigma = truth.metadata.at("sigma").get<double>();
        lj.r_c = truth.metadata.at("r_c").get<double>();
        lj.box = truth.metadata.at("box").get<double>();
        ham = [lj](const PhaseState& s) {
            return lj_energy(s, cutoff_graph(s.q, lj.r_c, lj.box), lj);
        };
    }
    if (ham) {
        auto energies = energy_curve(pred, ham);
        std::ostringstream e_csv;
        e_csv.precision(17);
        e_csv << "step,total_energy\n";
        for (std::size_t k = 0; k < energies.size(); ++k) e_csv << k << "," << energies[k] << "\n";
        write_text_file(out_dir + "/energy_curve.csv", e_csv.str());
    }
    std::cout << "rollout of " << (pred.frames() - 1) << " steps written to " << out_dir
              << (pred.metadata.value("truncated", false) ? " (truncated: non-finite state)" : "")
              << "\n";
    return 0;
}

// ---- classify --------------------------------------------------------------------

SympModel build_classifier(std::size_t m_in, std::size_t d, std::size_t pairs,
                           std::size_t classes, OperatorKind op, double dropout_p, Rng& rng) {
    SympModel model = make_la_sympgnn(d, pairs, op, activation_tanh(), rng);
    model.encoder = make_affine_head(m_in, 2 * d, rng);
    model.decoder = make_affine_head(d, classes, rng, /*q_only=*/true);
    model.dropout_p = dropout_p;
    model.validate();
    return model;
}

int cmd_classify(const json& cfg, const std::string& dataset_path,
                 const std::vector<std::string>& sweep_datasets,
                 const std::string& depth_sweep, const std::string& out_dir) {
    TrainConfig tc;
    tc.iterations = cfg_get<std::size_t>(cfg, "iterations", 300);
    tc.learning_rate = cfg_get<double>(cfg, "learning_rate", 3e-3);
    tc.weight_decay = cfg_get<double>(cfg, "weight_decay", 3e-2);
    tc.dropout_p = cfg_get<double>(cfg, "dropout", 0.5);
    tc.seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
    tc.loss = TrainConfig::Loss::cross_entropy;
    tc.validate();
    const json mc = cfg.value("model", json::object());
    const auto d = cfg_get<std::size_t>(mc, "d", 64);
    const auto pairs = cfg_get<std::size_t>(mc, "pairs", 2);
    const OperatorKind op =
        operator_kind_by_name(cfg_get<std::string>(mc, "operator", "normalized_adjacency"));

    write_resolved_config(cfg, out_dir);
    std::ostringstream acc_csv;
    acc_csv.precision(17);

    auto run_one = [&](const NodeDataset& ds, std::size_t pair_count, std::uint64_t seed) {
        Rng rng(seed);
        SympModel model = build_classifier(ds.num_features(), d, pair_count, ds.num_classes(),
                                           op, tc.dropout_p, rng);
        TrainConfig tcs = tc;
        tcs.seed = seed;
        auto res = train_node_classifier(ds, std::move(model), tcs);
        return res;
    };

    if (!sweep_datasets.empty()) {  // homophily sweep: one row per dataset
        acc_csv << "dataset,homophily,test_accuracy\n";
        for (const auto& path : sweep_datasets) {
            NodeDataset ds = load_dataset_json(path);
            auto res = run_one(ds, pairs, tc.seed);
            acc_csv << fs::path(path).filename().string() << ","
                    << homophily_ratio(ds.g, ds.y) << "," << res.test_acc << "\n";
            std::cout << path << ": test accuracy " << res.test_acc << "\n";
        }
        write_text_file(out_dir + "/accuracy.csv", acc_csv.str());
        return 0;
    }

    if (dataset_path.empty()) throw UsageError("classify: --dataset required");
    NodeDataset ds = load_dataset_json(dataset_path);

    if (!depth_sweep.empty()) {  // one row per depth (module pair count)
        acc_csv << "depth,test_accuracy\n";
        std::istringstream in(depth_sweep);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            const auto depth = static_cast<std::size_t>(std::stoul(tok));
            auto res = run_one(ds, depth, tc.seed);
            acc_csv << depth << "," << res.test_acc << "\n";
            std::cout << "depth " << depth << ": test accuracy " << res.test_acc << "\n";
        }
        write_text_file(out_dir + "/accuracy.csv", acc_csv.str());
        return 0;
    }

    auto res = run_one(ds, pairs, tc.seed);
    write_text_file(out_dir + "/checkpoint.json", model_to_checkpoint(res.model).dump() + "\n");
    write_text_file(out_dir + "/loss_curve.csv", curve_to_csv(res.loss_curve, "loss"));
    write_text_file(out_dir + "/val_accuracy.csv",
                    curve_to_csv(res.val_acc_curve, "val_accuracy"));
    acc_csv << "split,accuracy\nval," << res.best_val_acc << "\ntest," << res.test_acc << "\n";
    write_text_file(out_dir + "/accuracy.csv", acc_csv.str());
    std::cout << "best val accuracy " << res.best_val_acc << ", test accuracy " << res.test_acc
              << "\n";
    return 0;
}

// ---- verify ---------------------------------------------------------------------

int cmd_verify(const std::string& ckpt_path, const std::string& fresh,
               std::uint64_t seed, const std::string& out_dir) {
    Rng rng(seed);
    SympModel model;
    if (!ckpt_path.empty()) {
        if (!file_exists(ckpt_path))
            throw UsageError("verify: checkpoint not found: " + ckpt_path);
        model = model_from_checkpoint(json::parse(read_maybe_gzip(ckpt_path)));
    } else if (fresh == "la") {
        model = make_la_sympgnn(2, 2, OperatorKind::normalized_adjacency, activation_tanh(), rng);
    } else if (fresh == "g") {
        SympModel g = make_g_sympgnn(2, 2, {8, 8}, FnId::tanh_fn, false, rng);
        // non-zero final layers so the checks exercise a generic map
        auto params = parameter_vector(g);
        Rng prng(seed + 1);
        for (auto& v : params) v = prng.uniform(-0.3, 0.3);
        set_parameters(g, params);
        model = std::move(g);
    } else {
        throw UsageError("verify: give --checkpoint PATH or --fresh la|g");
    }

    const std::size_t n = 6;
    Graph g;
    g.n = n;
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 3}, {1, 4}};
    std::vector<CheckResult> checks;

    PhaseMap stack_map;
    GraphPhaseMap graph_map = [&model](const PhaseState& s, const Graph& gg) {
        return model_phase_map(model, s, gg);
    };
    double worst_symp = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        PhaseState s{rng.uniform_matrix(n, model.d, -1, 1), rng.uniform_matrix(n, model.d, -1, 1)};
        stack_map = [&](const PhaseState& x) { return model_phase_map(model, x, g); };
        worst_symp = std::max(worst_symp, check_symplectic(stack_map, s));
    }
    checks.push_back({"stack_symplecticity", worst_symp, 1e-5});

    PhaseState s0{rng.uniform_matrix(n, model.d, -1, 1), rng.uniform_matrix(n, model.d, -1, 1)};
    checks.push_back(
        {"stack_permutation_equivariance", check_perm_equivariance(graph_map, s0, g, 20, seed),
         1e-10});

    fs::create_directories(out_dir);
    json report = verification_report(checks);
    write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
    for (const auto& c : checks)
        std::cout << (c.passed() ? "[pass] " : "[FAIL] ") << c.name << " deviation "
                  << c.deviation << " tol " << c.tolerance << "\n";
    return report.at("all_passed").get<bool>() ? 0 : 1;
}

// ---- convert-planetoid --------------------------------------------------------------

int cmd_convert_planetoid(const std::string& in_dir, const std::string& name,
                          const std::string& out_file) {
    NodeDataset ds = convert_planetoid(in_dir, name);
    save_dataset_json(ds, out_file);
    std::cout << "converted " << name << ": " << ds.n() << " nodes, " << ds.num_features()
              << " features, " << ds.num_classes() << " classes -> " << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symplectic graph neural networks: simulators, training and verification"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", traj_path, graph_path, ckpt_path, dataset_path;
    std::string planetoid_dir, planetoid_name = "cora", planetoid_out, fresh_kind, depth_sweep;
    std::vector<std::string> sweep_datasets;
    std::optional<std::uint64_t> seed_override;
    std::size_t start_frame = static_cast<std::size_t>(-1), steps = 0;

    auto* gen = app.add_subcommand("generate", "generate ground-truth trajectories");
    gen->add_option("--config", config_path)->required();
    gen->add_option("--out", out_dir);
    gen->add_option("--seed", seed_override);

    auto* train = app.add_subcommand("train", "train a system-identification model");
    train->add_option("--config", config_path)->required();
    train->add_option("--trajectory", traj_path)->required();
    train->add_option("--graph", graph_path);
    train->add_option("--out", out_dir);
    train->add_option("--seed", seed_override);

    auto* roll = app.add_subcommand("rollout", "iterate a trained one-step map");
    roll->add_option("--checkpoint", ckpt_path)->required();
    roll->add_option("--trajectory", traj_path)->required();
    roll->add_option("--graph", graph_path);
    roll->add_option("--start-frame", start_frame);
    roll->add_option("--steps", steps);
    roll->add_option("--out", out_dir);

    auto* cls = app.add_subcommand("classify", "transductive node classification");
    cls->add_option("--config", config_path)->required();
    cls->add_option("--dataset", dataset_path);
    cls->add_option("--sweep-datasets", sweep_datasets)->delimiter(',');
    cls->add_option("--depth-sweep", depth_sweep);
    cls->add_option("--out", out_dir);
    cls->add_option("--seed", seed_override);

    auto* ver = app.add_subcommand("verify", "symplecticity / equivariance report");
    ver->add_option("--checkpoint", ckpt_path);
    ver->add_option("--fresh", fresh_kind, "la or g");
    ver->add_option("--seed", seed_override);
    ver->add_option("--out", out_dir);

    auto* conv = app.add_subcommand("convert-planetoid",
                                    "convert the public Planetoid files to dataset JSON");
    conv->add_option("--in", planetoid_dir)->required();
    conv->add_option("--name", planetoid_name);
    conv->add_option("--out", planetoid_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            if (seed_override) cfg["seed"] = *seed_override;
        }
        if (gen->parsed()) return cmd_generate(cfg, out_dir);
        if (train->parsed()) return cmd_train(cfg, traj_path, graph_path, out_dir);
        if (roll->parsed()) return cmd_rollout(ckpt_path, traj_path, graph_path, start_frame,
                                               steps, out_dir);
        if (cls->parsed())
            return cmd_classify(cfg, dataset_path, sweep_datasets, depth_sweep, out_dir);
        if (ver->parsed()) return cmd_verify(ckpt_path, fresh_kind, seed_override.value_or(0),
                                             out_dir);
        if (conv->parsed())
            return cmd_convert_planetoid(planetoid_dir, planetoid_name, planetoid_out);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
