// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <sympgnn/model.hpp>
#include <sympgnn/train.hpp>
#include <sympgnn/verify.hpp>

using namespace sympgnn;

TEST_CASE("symplectic form satisfies its algebra", "[verify]") {
    Matrix j = symplectic_form(3);
    Matrix j2 = matmul(j, j);
    CHECK(max_abs_diff(j2, scale(Matrix::identity(6), -1.0)) == 0.0);
    CHECK(max_abs_diff(transpose(j), scale(j, -1.0)) == 0.0);
}

TEST_CASE("identity map is symplectic", "[verify]") {
    PhaseMap id = [](const PhaseState& s) { return s; };
    Rng rng(130);
    PhaseState s{rng.uniform_matrix(3, 2, -1, 1), rng.uniform_matrix(3, 2, -1, 1)};
    CHECK(check_symplectic(id, s) <= 1e-9);
}

TEST_CASE("symmetric shear is symplectic", "[verify]") {
    Rng rng(131);
    Matrix m0 = rng.uniform_matrix(6, 6, -1, 1);
    Matrix sym = scale(add(m0, transpose(m0)), 0.5);
    PhaseMap shear = [&](const PhaseState& s) {
        // q <- q + M fl(p) in flattened coordinates (n=3, d=2)
        Matrix fp = fl(s.p);
        Matrix delta = matmul(sym, fp);
        PhaseState out = s;
        out.q = add(s.q, unfl(delta, 3, 2));
        return out;
    };
    PhaseState s{rng.uniform_matrix(3, 2, -1, 1), rng.uniform_matrix(3, 2, -1, 1)};
    CHECK(check_symplectic(shear, s) <= 1e-8);
}

TEST_CASE("doubling q is detected as non-symplectic", "[verify]") {
    PhaseMap stretch = [](const PhaseState& s) {
        PhaseState out = s;
        out.q = scale(s.q, 2.0);
        return out;
    };
    Rng rng(132);
    PhaseState s{rng.uniform_matrix(2, 1, -1, 1), rng.uniform_matrix(2, 1, -1, 1)};
    CHECK(check_symplectic(stretch, s) == Approx(1.0).margin(1e-6));
}

TEST_CASE("per-node maps are permutation equivariant", "[verify]") {
    GraphPhaseMap pernode = [](const PhaseState& s, const Graph&) {
        PhaseState out = s;
        for (std::size_t k = 0; k < out.p.size(); ++k) {
            out.p[k] = std::tanh(s.p[k]) + 0.5 * s.q[k];
            out.q[k] = s.q[k] - 0.25 * s.p[k];
        }
        return out;
    };
    Rng rng(133);
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {2, 3}, {4, 5}};
    PhaseState s{rng.uniform_matrix(6, 2, -1, 1), rng.uniform_matrix(6, 2, -1, 1)};
    CHECK(check_perm_equivariance(pernode, s, g, 20, 134) <= 1e-12);
}

TEST_CASE("node-index leakage is caught by the equivariance check", "[verify]") {
    GraphPhaseMap leaky = [](const PhaseState& s, const Graph&) {
        PhaseState out = s;
        for (std::size_t i = 0; i < s.n(); ++i)
            out.p(i, 0) += static_cast<double>(i);  // depends on labeling
        return out;
    };
    Rng rng(135);
    Graph g;
    g.n = 5;
    g.edges = {{0, 1}, {1, 2}};
    PhaseState s{rng.uniform_matrix(5, 2, -1, 1), rng.uniform_matrix(5, 2, -1, 1)};
    CHECK(check_perm_equivariance(leaky, s, g, 20, 136) >= 1.0);
}

TEST_CASE("temperature basics", "[verify]") {
    PhaseState rest{Matrix::zeros(4, 2), Matrix::zeros(4, 2)};
    CHECK(temperature(rest, {}) == 0.0);

    const double v = 1.3;
    Matrix p(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        p(i, 0) = v;  // speed v along x for every particle
    }
    PhaseState s{p, Matrix::zeros(4, 2)};
    // sum |p|^2 = 4 v^2 over n d = 8 slots -> T = v^2 / 2 at k_B = 1
    CHECK(temperature(s, {}) == Approx(v * v / 2.0));
}

namespace {
/// Reduced-unit liquid-density fixture for the observable tests.
LJConfig reduced_lj_fluid(std::size_t n, double box, std::uint64_t seed) {
    LJConfig cfg;
    cfg.n = n;
    cfg.epsilon = 1.0;
    cfg.sigma = 1.0;
    cfg.uniform_mass = 1.0;
    cfg.k_boltzmann = 1.0;
    cfg.r_c = 2.5;
    cfg.box = box;
    cfg.seed = seed;
    cfg.init_temperature = 0.45;
    cfg.burn_in_steps = 3000;
    cfg.h_internal = 0.005;
    return cfg;
}
}  // namespace

TEST_CASE("temperature is stable along an equilibrated trajectory", "[verify][slow]") {
    LJConfig cfg = reduced_lj_fluid(64, 10.4, 23);
    Trajectory traj = generate_lj_trajectory(cfg, 40);
    std::vector<double> temps;
    for (const auto& s : traj.states) temps.push_back(temperature(s, {}));
    const double mean = [&] {
        double m = 0;
        for (double t : temps) m += t;
        return m / static_cast<double>(temps.size());
    }();
    for (double t : temps) CHECK(std::abs(t - mean) / mean <= 0.35);
    // ensemble mean itself is the stable quantity
    double first = 0, second = 0;
    for (std::size_t k = 0; k < temps.size() / 2; ++k) first += temps[k];
    for (std::size_t k = temps.size() / 2; k < temps.size(); ++k) second += temps[k];
    first /= static_cast<double>(temps.size() / 2);
    second /= static_cast<double>(temps.size() - temps.size() / 2);
    CHECK(std::abs(first - second) / first <= 0.10);
}

TEST_CASE("radial distribution of an ideal gas is one", "[verify][rdf]") {
    Rng rng(137);
    const double box = 10.0;
    Trajectory traj;
    traj.h = 1.0;
    for (int f = 0; f < 60; ++f)
        traj.states.push_back(
            {Matrix::zeros(60, 2), rng.uniform_matrix(60, 2, 0, box)});
    auto g = radial_distribution(traj, 20, 5.0, box);
    for (std::size_t b = 2; b < g.size(); ++b) {  // skip the tiny-shell bins
        INFO("bin " << b);
        CHECK(g[b] == Approx(1.0).margin(0.1));
    }
}

TEST_CASE("radial distribution converges as samples grow", "[verify][rdf]") {
    auto worst_dev = [](int frames, std::uint64_t seed) {
        Rng rng(seed);
        const double box = 10.0;
        Trajectory traj;
        traj.h = 1.0;
        for (int f = 0; f < frames; ++f)
            traj.states.push_back({Matrix::zeros(40, 2), rng.uniform_matrix(40, 2, 0, box)});
        auto g = radial_distribution(traj, 10, 5.0, box);
        double worst = 0;
        for (std::size_t b = 2; b < g.size(); ++b)
            worst = std::max(worst, std::abs(g[b] - 1.0));
        return worst;
    };
    CHECK(worst_dev(300, 138) <= 0.05);
}

TEST_CASE("two particles land in the right bin", "[verify][rdf]") {
    const double box = 10.0, r0 = 2.3;
    Matrix q(2, 2);
    q(1, 0) = r0;
    Trajectory traj;
    traj.h = 1.0;
    traj.states.push_back({Matrix::zeros(2, 2), q});
    auto g = radial_distribution(traj, 25, 5.0, box);
    const auto hot = static_cast<std::size_t>(r0 / (5.0 / 25.0));
    for (std::size_t b = 0; b < g.size(); ++b) {
        if (b == hot)
            CHECK(g[b] > 0.0);
        else
            CHECK(g[b] == 0.0);
    }
    CHECK_THROWS_WITH(radial_distribution(traj, 10, 6.0, box), Catch::Contains("box/2"));
}

TEST_CASE("equilibrated lj fluid peaks near the potential minimum", "[verify][rdf][slow]") {
    LJConfig cfg = reduced_lj_fluid(64, 10.4, 29);
    Trajectory traj = generate_lj_trajectory(cfg, 50);
    auto g = radial_distribution(traj, 60, 3.0, cfg.box);
    std::size_t peak = 0;
    for (std::size_t b = 1; b < g.size(); ++b)
        if (g[b] > g[peak]) peak = b;
    const double r_peak = rdf_bin_center(peak, 60, 3.0);
    const double r_min = std::pow(2.0, 1.0 / 6.0) * cfg.sigma;
    CHECK(std::abs(r_peak - r_min) / r_min <= 0.10);
}

TEST_CASE("energy curve of a constant trajectory is constant", "[verify]") {
    HarmonicChainConfig cfg;
    cfg.n = 3;
    cfg.spring_constants = {2.0, 2.0};
    Trajectory traj;
    traj.h = 0.1;
    PhaseState s{Matrix::filled(3, 1, 0.3), Matrix::filled(3, 1, 0.6)};
    traj.states = {s, s, s, s};
    auto curve = energy_curve(traj, [&](const PhaseState& st) {
        return harmonic_energy(st, cfg);
    });
    for (double e : curve) CHECK(e == curve.front());
}

TEST_CASE("energy curve of an untrained rollout stays finite", "[verify]") {
    Rng rng(139);
    SympModel m = make_la_sympgnn(1, 2, OperatorKind::laplacian, activation_tanh(), rng);
    Graph g = chain_adjacency({2.0, 3.0});
    PhaseState s{rng.uniform_matrix(3, 1, -1, 1), rng.uniform_matrix(3, 1, -1, 1)};
    Trajectory traj = rollout(m, s, 20, g, {});
    HarmonicChainConfig cfg;
    cfg.n = 3;
    cfg.spring_constants = {2.0, 3.0};
    auto curve = energy_curve(traj, [&](const PhaseState& st) {
        return harmonic_energy(st, cfg);
    });
    for (double e : curve) CHECK(std::isfinite(e));
}

TEST_CASE("verification report json", "[verify]") {
    std::vector<CheckResult> checks = {{"a", 1e-9, 1e-6}, {"b", 2.0, 1e-2}};
    auto j = verification_report(checks);
    CHECK(j.at("all_passed").get<bool>() == false);
    CHECK(j.at("checks")[0].at("pass").get<bool>() == true);
    CHECK(j.at("checks")[1].at("pass").get<bool>() == false);
}
