// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <sympgnn/io.hpp>
#include <sympgnn/simulate.hpp>
#include <sympgnn/verify.hpp>

#include "test_util.hpp"

using namespace sympgnn;
using test_oracle::fd_gradient;
using test_oracle::max_rel_err;

namespace {

HarmonicChainConfig chain_cfg(std::size_t n, std::vector<double> k) {
    HarmonicChainConfig cfg;
    cfg.n = n;
    cfg.spring_constants = std::move(k);
    return cfg;
}

/// Reduced-unit fixture (sigma = epsilon = mass = k_B = 1).
LJConfig small_lj() {
    LJConfig cfg;
    cfg.n = 16;
    cfg.epsilon = 1.0;
    cfg.sigma = 1.0;
    cfg.uniform_mass = 1.0;
    cfg.k_boltzmann = 1.0;
    cfg.box = 6.0;
    cfg.r_c = 1.8;
    cfg.init_temperature = 0.4;
    cfg.burn_in_steps = 200;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("harmonic energy and forces zero at rest", "[simulate]") {
    auto cfg = chain_cfg(3, {2.0, 2.0});
    PhaseState s{Matrix::zeros(3, 1), Matrix::filled(3, 1, 1.7)};
    CHECK(harmonic_energy(s, cfg) == 0.0);
    CHECK(max_abs(harmonic_forces(s.q, cfg)) == 0.0);
}

TEST_CASE("harmonic hand case", "[simulate]") {
    auto cfg = chain_cfg(2, {5.0});
    PhaseState s{Matrix::zeros(2, 1), Matrix(2, 1, {0.0, 1.0})};
    CHECK(harmonic_energy(s, cfg) == Approx(2.5));
    Matrix f = harmonic_forces(s.q, cfg);
    CHECK(f(0, 0) == Approx(5.0));
    CHECK(f(1, 0) == Approx(-5.0));
}

TEST_CASE("harmonic force is minus the energy gradient", "[simulate]") {
    Rng rng(90);
    auto cfg = chain_cfg(6, {1.5, 5.0, 3.2, 2.0, 4.4});
    Matrix q = rng.uniform_matrix(6, 1, -2, 2);
    Matrix fd = fd_gradient(
        [&](const Matrix& qq) {
            return harmonic_energy({Matrix::zeros(6, 1), qq}, cfg);
        },
        q, 1e-6);
    CHECK(max_rel_err(harmonic_forces(q, cfg), scale(fd, -1.0)) <= 1e-8);
}

TEST_CASE("lj pair at the potential minimum has zero force", "[simulate]") {
    LJConfig cfg = small_lj();
    cfg.n = 2;
    Matrix q(2, 2);
    q(1, 0) = std::pow(2.0, 1.0 / 6.0) * cfg.sigma;
    Graph g = cutoff_graph(q, cfg.r_c, cfg.box);
    REQUIRE(g.edges.size() == 1);
    CHECK(max_abs(lj_forces(q, g, cfg)) <= 1e-12);
}

TEST_CASE("lj potential is zero at r equal sigma", "[simulate]") {
    LJConfig cfg = small_lj();
    cfg.n = 2;
    Matrix q(2, 2);
    q(1, 0) = cfg.sigma;
    Graph g = cutoff_graph(q, cfg.r_c, cfg.box);
    PhaseState s{Matrix::zeros(2, 2), q};
    CHECK(lj_energy(s, g, cfg) == Approx(0.0).margin(1e-14));
}

TEST_CASE("lj forces match finite differences", "[simulate]") {
    LJConfig cfg = small_lj();
    cfg.n = 10;
    Rng rng(91);
    // spread particles to avoid the steep core where FD degrades
    Matrix q(10, 2);
    for (int i = 0; i < 10; ++i) {
        q(i, 0) = 1.4 * (i % 4) + rng.uniform(-0.2, 0.2);
        q(i, 1) = 1.4 * (i / 4) + rng.uniform(-0.2, 0.2);
    }
    q = wrap_positions(std::move(q), cfg.box);
    Graph g = cutoff_graph(q, cfg.r_c, cfg.box);
    REQUIRE(!g.edges.empty());
    Matrix fd = fd_gradient(
        [&](const Matrix& qq) {
            return lj_energy({Matrix::zeros(10, 2), qq}, g, cfg);
        },
        q, 1e-6);
    CHECK(max_rel_err(lj_forces(q, g, cfg), scale(fd, -1.0)) <= 1e-7);
}

TEST_CASE("lj rejects coincident particles", "[simulate]") {
    LJConfig cfg = small_lj();
    cfg.n = 2;
    Matrix q(2, 2);  // both at the origin
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    CHECK_THROWS_WITH(lj_forces(q, g, cfg), Catch::Contains("coincident"));
}

TEST_CASE("lj forces are equal and opposite", "[simulate]") {
    LJConfig cfg = small_lj();
    Rng rng(92);
    PhaseState s = lj_initial_state(cfg, rng);
    Graph g = cutoff_graph(s.q, cfg.r_c, cfg.box);
    Matrix f = lj_forces(s.q, g, cfg);
    double net_x = 0, net_y = 0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
        net_x += f(i, 0);
        net_y += f(i, 1);
    }
    CHECK(std::abs(net_x) <= 1e-10);
    CHECK(std::abs(net_y) <= 1e-10);
}

TEST_CASE("free particle drifts under stormer-verlet", "[simulate]") {
    PhaseState s{Matrix(1, 1, {0.7}), Matrix(1, 1, {0.2})};
    ForceFn zero = [](const Matrix& q) { return Matrix::zeros(q.rows(), q.cols()); };
    PhaseState out = stormer_verlet_step(s, zero, {}, 0.5);
    CHECK(out.p(0, 0) == 0.7);
    CHECK(out.q(0, 0) == Approx(0.2 + 0.5 * 0.7));
}

namespace {
ForceFn oscillator_force = [](const Matrix& q) { return scale(q, -1.0); };

double oscillator_energy(const PhaseState& s) {
    return 0.5 * (s.p(0, 0) * s.p(0, 0) + s.q(0, 0) * s.q(0, 0));
}

/// Exact-solution global error after integrating a quarter period.
template <typename Step>
double oscillator_error(Step step, double h) {
    PhaseState s{Matrix(1, 1, {0.0}), Matrix(1, 1, {1.0})};
    const double t_end = M_PI / 2.0;
    const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
    for (std::size_t k = 0; k < steps; ++k) s = step(s, h);
    const double t = static_cast<double>(steps) * h;
    // q(t) = cos t, p(t) = -sin t
    return std::abs(s.q(0, 0) - std::cos(t)) + std::abs(s.p(0, 0) + std::sin(t));
}
}  // namespace

TEST_CASE("stormer-verlet returns near the start after one period", "[simulate]") {
    PhaseState s{Matrix(1, 1, {0.0}), Matrix(1, 1, {1.0})};
    const double h = 0.01;
    const auto steps = static_cast<std::size_t>(std::llround(2.0 * M_PI / h));
    PhaseState cur = s;
    for (std::size_t k = 0; k < steps; ++k)
        cur = stormer_verlet_step(cur, oscillator_force, {}, h);
    // against the analytic cos/sin solution at the integrated time
    const double t = static_cast<double>(steps) * h;
    CHECK(std::abs(cur.q(0, 0) - std::cos(t)) <= 1e-3);
    CHECK(std::abs(cur.p(0, 0) + std::sin(t)) <= 1e-3);
}

TEST_CASE("stormer-verlet self-convergence order is two", "[simulate]") {
    auto sv = [](const PhaseState& s, double h) {
        return stormer_verlet_step(s, oscillator_force, {}, h);
    };
    const double e1 = oscillator_error(sv, 0.02);
    const double e2 = oscillator_error(sv, 0.01);
    const double ratio = e1 / e2;
    CHECK(ratio == Approx(4.0).margin(0.8));
}

TEST_CASE("composite4 coefficients sum to one", "[simulate]") {
    const auto [w1, w2, w3] = composite4_coefficients();
    CHECK(w1 + w2 + w3 == 1.0);
    CHECK(w1 == Approx(1.0 / (2.0 - std::cbrt(2.0))).epsilon(1e-15));
    CHECK(w2 == Approx(-std::cbrt(2.0) / (2.0 - std::cbrt(2.0))).epsilon(1e-12));
}

TEST_CASE("composite4 self-convergence order is four", "[simulate]") {
    auto c4 = [](const PhaseState& s, double h) {
        return composite4_step(s, oscillator_force, {}, h);
    };
    const double e1 = oscillator_error(c4, 0.04);
    const double e2 = oscillator_error(c4, 0.02);
    CHECK(e1 / e2 == Approx(16.0).margin(3.0));
}

TEST_CASE("composite4 with zero force is a plain drift", "[simulate]") {
    PhaseState s{Matrix(1, 1, {1.3}), Matrix(1, 1, {-0.4})};
    ForceFn zero = [](const Matrix& q) { return Matrix::zeros(q.rows(), q.cols()); };
    PhaseState out = composite4_step(s, zero, {}, 0.25);
    CHECK(out.p(0, 0) == 1.3);
    CHECK(out.q(0, 0) == Approx(-0.4 + 0.25 * 1.3).epsilon(1e-14));
}

TEST_CASE("integrators are symplectic maps", "[simulate][symplectic]") {
    Rng rng(93);
    auto cfg = chain_cfg(3, {2.0, 4.0});
    ForceFn f = [&](const Matrix& q) { return harmonic_forces(q, cfg); };
    PhaseMap sv = [&](const PhaseState& s) { return stormer_verlet_step(s, f, {}, 0.05); };
    PhaseMap c4 = [&](const PhaseState& s) { return composite4_step(s, f, {}, 0.05); };
    for (int t = 0; t < 3; ++t) {
        PhaseState s{rng.uniform_matrix(3, 1, -1, 1), rng.uniform_matrix(3, 1, -1, 1)};
        CHECK(check_symplectic(sv, s) <= 1e-6);
        CHECK(check_symplectic(c4, s) <= 1e-6);
    }
}

TEST_CASE("integrators are time reversible", "[simulate]") {
    Rng rng(94);
    auto cfg = chain_cfg(4, {2.0, 3.0, 1.5});
    ForceFn f = [&](const Matrix& q) { return harmonic_forces(q, cfg); };
    PhaseState s{rng.uniform_matrix(4, 1, -1, 1), rng.uniform_matrix(4, 1, -1, 1)};
    PhaseState fwd = composite4_step(s, f, {}, 0.07);
    PhaseState back = composite4_step(fwd, f, {}, -0.07);
    CHECK(max_abs_diff(back.p, s.p) <= 1e-10);
    CHECK(max_abs_diff(back.q, s.q) <= 1e-10);

    fwd = stormer_verlet_step(s, f, {}, 0.07);
    back = stormer_verlet_step(fwd, f, {}, -0.07);
    CHECK(max_abs_diff(back.p, s.p) <= 1e-10);
    CHECK(max_abs_diff(back.q, s.q) <= 1e-10);
}

TEST_CASE("harmonic trajectory conserves energy and starts at rest", "[simulate]") {
    HarmonicChainConfig cfg;
    cfg.n = 8;
    cfg.seed = 5;
    Rng krng(6);
    cfg.spring_constants = sample_spring_constants(cfg.n, krng);
    Trajectory traj = generate_harmonic_trajectory(cfg, 600);
    REQUIRE(traj.frames() == 600);
    CHECK(max_abs(traj.states.front().p) == 0.0);
    for (double v : traj.states.front().q.data()) CHECK(std::abs(v) <= 2.5);

    auto energies = energy_curve(traj, [&](const PhaseState& s) {
        return harmonic_energy(s, cfg);
    });
    const double e0 = energies.front();
    double worst = 0.0;
    for (double e : energies) worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
    CHECK(worst <= 1e-6);
}

TEST_CASE("harmonic trajectory is seed deterministic", "[simulate]") {
    HarmonicChainConfig cfg;
    cfg.n = 5;
    cfg.seed = 42;
    cfg.spring_constants = {2, 3, 4, 5};
    Trajectory a = generate_harmonic_trajectory(cfg, 20);
    Trajectory b = generate_harmonic_trajectory(cfg, 20);
    for (std::size_t f = 0; f < a.frames(); ++f) {
        CHECK(a.states[f].p.data() == b.states[f].p.data());
        CHECK(a.states[f].q.data() == b.states[f].q.data());
    }
}

TEST_CASE("lj trajectory conserves energy and momentum", "[simulate][slow]") {
    LJConfig cfg;
    cfg.n = 100;
    cfg.seed = 9;
    cfg.burn_in_steps = 500;
    Trajectory traj = generate_lj_trajectory(cfg, 30);
    REQUIRE(traj.frames() == 30);
    REQUIRE(traj.has_graphs());

    auto ham = [&](const PhaseState& s) {
        return lj_energy(s, cutoff_graph(s.q, cfg.r_c, cfg.box), cfg);
    };
    auto energies = energy_curve(traj, ham);
    const double e0 = energies.front();
    REQUIRE(std::abs(e0) > 1e-3);
    double worst = 0.0;
    for (double e : energies) worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
    // the floor is the truncated (unshifted) potential: every pair crossing
    // r_c jumps the total by V(r_c), ~2e-5 relative here; the integrator
    // itself is far below that
    CHECK(worst <= 1e-3);

    for (const auto& s : traj.states) {
        double px = 0, py = 0;
        for (std::size_t i = 0; i < cfg.n; ++i) {
            px += s.p(i, 0);
            py += s.p(i, 1);
        }
        CHECK(std::abs(px) <= 1e-9);
        CHECK(std::abs(py) <= 1e-9);
    }

    for (const auto& s : traj.states)
        for (double v : s.q.data()) {
            CHECK(v >= 0.0);
            CHECK(v < cfg.box);
        }
}

TEST_CASE("lj config validation", "[simulate]") {
    LJConfig cfg;
    cfg.box = 2.0;
    cfg.r_c = 1.2;
    CHECK_THROWS_WITH(cfg.validate(), Catch::Contains("box"));
    LJConfig ok;  // defaults: r_c=1.2, box=sqrt(20) -> the reference-preserving density
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.box == Approx(std::sqrt(20.0)));
    // full-scale reference box is admissible too
    LJConfig full;
    full.n = 2000;
    full.box = 20.0;
    CHECK_NOTHROW(full.validate());
}

TEST_CASE("trajectory jsonl round trip", "[simulate][io]") {
    HarmonicChainConfig cfg;
    cfg.n = 3;
    cfg.seed = 1;
    cfg.spring_constants = {2.0, 3.0};
    Trajectory traj = generate_harmonic_trajectory(cfg, 5);
    const std::string text = trajectory_to_jsonl(traj);
    Trajectory back = trajectory_from_jsonl(text);
    REQUIRE(back.frames() == traj.frames());
    CHECK(back.h == traj.h);
    for (std::size_t f = 0; f < traj.frames(); ++f) {
        CHECK(back.states[f].p.data() == traj.states[f].p.data());
        CHECK(back.states[f].q.data() == traj.states[f].q.data());
    }

    LJConfig lj = small_lj();
    lj.burn_in_steps = 50;
    Trajectory ljt = generate_lj_trajectory(lj, 3);
    Trajectory ljb = trajectory_from_jsonl(trajectory_to_jsonl(ljt));
    REQUIRE(ljb.has_graphs());
    for (std::size_t f = 0; f < ljt.frames(); ++f)
        CHECK(ljb.graphs[f].edges == ljt.graphs[f].edges);
}
