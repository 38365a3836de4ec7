// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file simulate.hpp
 * @brief Ground-truth Hamiltonian simulators: coupled harmonic chain and 2D
 *        periodic Lennard-Jones molecular dynamics, integrated symplectically.
 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sympgnn/graph.hpp"
#include "sympgnn/modules.hpp"

namespace sympgnn {

using ForceFn = std::function<Matrix(const Matrix& q)>;

// ---- harmonic chain ---------------------------------------------------------

struct HarmonicChainConfig {
    std::size_t n = 40;
    std::vector<double> masses;            // empty = all ones
    std::vector<double> spring_constants;  // n-1 values, all >= 1
    double h = 0.1;                        // observation timestep
    std::size_t substeps = 100;            // internal integrator substeps per frame
    std::uint64_t seed = 0;

    double mass(std::size_t i) const { return masses.empty() ? 1.0 : masses[i]; }

    void validate() const {
        require(n >= 2, "HarmonicChainConfig: need at least two particles");
        require(h > 0.0, "HarmonicChainConfig: h must be positive");
        require(substeps >= 1, "HarmonicChainConfig: substeps must be >= 1");
        require(spring_constants.size() == n - 1,
                "HarmonicChainConfig: need n-1 spring constants");
        for (double k : spring_constants)
            require(k >= 1.0, "HarmonicChainConfig: spring constants are truncated below 1");
        if (!masses.empty())
            require(masses.size() == n, "HarmonicChainConfig: mass count != n");
    }
};

/// Spring constants ~ N(5, 1.25^2), truncated below at 1.
inline std::vector<double> sample_spring_constants(std::size_t n, Rng& rng) {
    std::vector<double> k(n - 1);
    for (auto& v : k) v = std::max(1.0, rng.normal(5.0, 1.25));
    return k;
}

/// H = 1/2 (sum p_i^2 / m_i + sum k_i (q_i - q_{i+1})^2)
inline double harmonic_energy(const PhaseState& s, const HarmonicChainConfig& cfg) {
    cfg.validate();
    require(s.n() == cfg.n && s.d() == 1, "harmonic_energy: state must be n x 1");
    double t = 0.0, v = 0.0;
    for (std::size_t i = 0; i < cfg.n; ++i) t += s.p(i, 0) * s.p(i, 0) / cfg.mass(i);
    for (std::size_t i = 0; i + 1 < cfg.n; ++i) {
        const double dq = s.q(i, 0) - s.q(i + 1, 0);
        v += cfg.spring_constants[i] * dq * dq;
    }
    return 0.5 * (t + v);
}

inline Matrix harmonic_forces(const Matrix& q, const HarmonicChainConfig& cfg) {
    require(q.rows() == cfg.n && q.cols() == 1, "harmonic_forces: q must be n x 1");
    Matrix f(cfg.n, 1);
    for (std::size_t i = 0; i + 1 < cfg.n; ++i) {
        const double pull = cfg.spring_constants[i] * (q(i, 0) - q(i + 1, 0));
        f(i, 0) -= pull;
        f(i + 1, 0) += pull;
    }
    return f;
}

// ---- Lennard-Jones ------------------------------------------------------------

/// Defaults are the desk-scale Argon preset in nm / ps / amu (energies in
/// kJ/mol): n = 100 in a sqrt(20) nm box keeps the reference density of 2000
/// particles in a 20 nm box, with the same r_c, timestep and sampling stride.
/// Set epsilon = sigma = uniform_mass = k_boltzmann = 1 for reduced units.
struct LJConfig {
    std::size_t n = 100;
    double epsilon = 0.996;         // kJ/mol (Argon)
    double sigma = 0.3405;          // nm (Argon)
    double r_c = 1.2;               // nm
    double box = 4.47213595499958;  // nm, sqrt(20)
    double uniform_mass = 39.948;   // amu (Argon)
    std::vector<double> masses;     // overrides uniform_mass when set
    double h_internal = 0.01;       // ps
    std::size_t sample_stride = 10;
    std::uint64_t seed = 0;
    double k_boltzmann = 0.008314462618;  // kJ/(mol K); set 1 for reduced units
    double init_temperature = 60.0;       // K at the default k_B
    std::size_t burn_in_steps = 2000;

    double mass(std::size_t i) const { return masses.empty() ? uniform_mass : masses[i]; }

    void validate() const {
        require(n >= 2, "LJConfig: need at least two particles");
        require(epsilon > 0 && sigma > 0 && r_c > 0 && box > 0 && h_internal > 0 &&
                    uniform_mass > 0 && k_boltzmann > 0,
                "LJConfig: all physical constants must be positive");
        require(box > 2.0 * r_c, "LJConfig: box must exceed 2 r_c");
        require(sample_stride >= 1, "LJConfig: sample_stride must be >= 1");
        if (!masses.empty()) require(masses.size() == n, "LJConfig: mass count != n");
    }
};

/// Pair potential 4 eps ((sigma/r)^12 - (sigma/r)^6), summed over graph edges
/// with minimum-image distances.
inline double lj_energy(const PhaseState& s, const Graph& g, const LJConfig& cfg) {
    require(s.n() == cfg.n && s.d() == 2, "lj_energy: state must be n x 2");
    double t = 0.0;
    for (std::size_t i = 0; i < cfg.n; ++i)
        t += (s.p(i, 0) * s.p(i, 0) + s.p(i, 1) * s.p(i, 1)) / cfg.mass(i);
    double v = 0.0;
    for (const auto& [a, b] : g.edges) {
        const double r2 =
            pair_dist_sq(s.q, static_cast<std::size_t>(a), static_cast<std::size_t>(b), cfg.box);
        require(r2 > 0.0, "lj_energy: coincident particles");
        const double sr2 = cfg.sigma * cfg.sigma / r2;
        const double sr6 = sr2 * sr2 * sr2;
        v += 4.0 * cfg.epsilon * (sr6 * sr6 - sr6);
    }
    return 0.5 * t + v;
}

inline Matrix lj_forces(const Matrix& q, const Graph& g, const LJConfig& cfg) {
    require(q.rows() == cfg.n && q.cols() == 2, "lj_forces: q must be n x 2");
    Matrix f(cfg.n, 2);
    for (const auto& [a, b] : g.edges) {
        const auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
        double dx = min_image(q(i, 0) - q(j, 0), cfg.box);
        double dy = min_image(q(i, 1) - q(j, 1), cfg.box);
        const double r2 = dx * dx + dy * dy;
        require(r2 > 0.0, "lj_forces: coincident particles");
        const double sr2 = cfg.sigma * cfg.sigma / r2;
        const double sr6 = sr2 * sr2 * sr2;
        // -dV/dr / r = 24 eps (2 (sigma/r)^12 - (sigma/r)^6) / r^2
        const double fac = 24.0 * cfg.epsilon * (2.0 * sr6 * sr6 - sr6) / r2;
        f(i, 0) += fac * dx;
        f(i, 1) += fac * dy;
        f(j, 0) -= fac * dx;
        f(j, 1) -= fac * dy;
    }
    f.check_finite("lj_forces");
    return f;
}

// ---- symplectic integrators ----------------------------------------------------

/// Kick-drift-kick leapfrog, second order.
inline PhaseState stormer_verlet_step(const PhaseState& s, const ForceFn& force,
                                      const std::vector<double>& masses, double h) {
    PhaseState out = s;
    Matrix f = force(out.q);
    require(f.same_shape(out.p), "stormer_verlet_step: force shape mismatch");
    const std::size_t n = out.n(), d = out.d();
    auto m_of = [&](std::size_t i) { return masses.empty() ? 1.0 : masses[i]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out.p(i, c) += 0.5 * h * f(i, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out.q(i, c) += h * out.p(i, c) / m_of(i);
    f = force(out.q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out.p(i, c) += 0.5 * h * f(i, c);
    return out;
}

struct Composite4Coefficients {
    double w1, w2, w3;
};

/// Triple-jump coefficients: w1 = w3 = 1/(2 - 2^{1/3}), w2 = 1 - 2 w1.
inline Composite4Coefficients composite4_coefficients() {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    return {w1, 1.0 - 2.0 * w1, w1};
}

/// Fourth-order composite Stormer-Verlet (three concatenated SV sub-steps).
inline PhaseState composite4_step(const PhaseState& s, const ForceFn& force,
                                  const std::vector<double>& masses, double h) {
    const auto [w1, w2, w3] = composite4_coefficients();
    PhaseState out = stormer_verlet_step(s, force, masses, w1 * h);
    out = stormer_verlet_step(out, force, masses, w2 * h);
    return stormer_verlet_step(out, force, masses, w3 * h);
}

// ---- trajectories ---------------------------------------------------------------

struct Trajectory {
    std::vector<PhaseState> states;
    double h = 0.0;  // time between stored frames
    nlohmann::json metadata;
    std::vector<Graph> graphs;  // per-frame cutoff graphs (LJ only)

    std::size_t frames() const { return states.size(); }
    bool has_graphs() const { return !graphs.empty(); }

    void validate() const {
        require(!states.empty(), "Trajectory: no frames");
        for (const auto& s : states) {
            s.validate();
            require(s.p.same_shape(states.front().p), "Trajectory: frame shape drift");
        }
        if (has_graphs())
            require(graphs.size() == states.size(), "Trajectory: graph/frame count mismatch");
    }
};

/// Initial p = 0, q ~ U(-2.5, 2.5); composite4 substeps between saved frames.
inline Trajectory generate_harmonic_trajectory(const HarmonicChainConfig& cfg,
                                               std::size_t frames) {
    cfg.validate();
    require(frames >= 2, "generate_harmonic_trajectory: need at least 2 frames");
    Rng rng(cfg.seed);
    PhaseState s{Matrix::zeros(cfg.n, 1), rng.uniform_matrix(cfg.n, 1, -2.5, 2.5)};
    ForceFn force = [&cfg](const Matrix& q) { return harmonic_forces(q, cfg); };
    std::vector<double> masses = cfg.masses;
    const double h_sub = cfg.h / static_cast<double>(cfg.substeps);

    Trajectory traj;
    traj.h = cfg.h;
    traj.metadata = {{"system", "harmonic_chain"},
                     {"n", cfg.n},
                     {"h", cfg.h},
                     {"substeps", cfg.substeps},
                     {"seed", cfg.seed},
                     {"spring_constants", cfg.spring_constants}};
    traj.states.push_back(s);
    for (std::size_t f = 1; f < frames; ++f) {
        for (std::size_t k = 0; k < cfg.substeps; ++k)
            s = composite4_step(s, force, masses, h_sub);
        traj.states.push_back(s);
    }
    return traj;
}

/// Jittered square lattice, Maxwell-like momenta with zero net drift.
inline PhaseState lj_initial_state(const LJConfig& cfg, Rng& rng) {
    const auto cells = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.n))));
    const double spacing = cfg.box / static_cast<double>(cells);
    Matrix q(cfg.n, 2);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double cx = (static_cast<double>(i % cells) + 0.5) * spacing;
        const double cy = (static_cast<double>(i / cells) + 0.5) * spacing;
        q(i, 0) = cx + rng.uniform(-0.05, 0.05) * spacing;
        q(i, 1) = cy + rng.uniform(-0.05, 0.05) * spacing;
    }
    q = wrap_positions(std::move(q), cfg.box);
    for (std::size_t i = 0; i < cfg.n; ++i)
        for (std::size_t j = i + 1; j < cfg.n; ++j)
            require(pair_dist_sq(q, i, j, cfg.box) > 0.25 * cfg.sigma * cfg.sigma,
                    "lj_initial_state: particle overlap at init");

    Matrix p(cfg.n, 2);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double sd = std::sqrt(cfg.mass(i) * cfg.k_boltzmann * cfg.init_temperature);
        p(i, 0) = rng.normal(0.0, sd);
        p(i, 1) = rng.normal(0.0, sd);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < cfg.n; ++i) mean += p(i, c);
        mean /= static_cast<double>(cfg.n);
        for (std::size_t i = 0; i < cfg.n; ++i) p(i, c) -= mean;
    }
    return {std::move(p), std::move(q)};
}

/// NVE trajectory; the cutoff graph is rebuilt at every force evaluation and
/// positions stay wrapped inside the box. Stores the per-frame graph.
inline Trajectory generate_lj_trajectory(const LJConfig& cfg, std::size_t frames) {
    cfg.validate();
    require(frames >= 2, "generate_lj_trajectory: need at least 2 frames");
    Rng rng(cfg.seed);
    PhaseState s = lj_initial_state(cfg, rng);
    ForceFn force = [&cfg](const Matrix& q) {
        Graph g = cutoff_graph(q, cfg.r_c, cfg.box);
        return lj_forces(q, g, cfg);
    };
    std::vector<double> masses = cfg.masses;
    if (masses.empty()) masses.assign(cfg.n, cfg.uniform_mass);

    auto advance = [&](PhaseState st) {
        st = composite4_step(st, force, masses, cfg.h_internal);
        st.q = wrap_positions(std::move(st.q), cfg.box);
        return st;
    };

    for (std::size_t k = 0; k < cfg.burn_in_steps; ++k) s = advance(std::move(s));

    Trajectory traj;
    traj.h = cfg.h_internal * static_cast<double>(cfg.sample_stride);
    traj.metadata = {{"system", "lennard_jones_2d"}, {"n", cfg.n},
                     {"epsilon", cfg.epsilon},       {"sigma", cfg.sigma},
                     {"r_c", cfg.r_c},               {"box", cfg.box},
                     {"h_internal", cfg.h_internal}, {"sample_stride", cfg.sample_stride},
                     {"k_boltzmann", cfg.k_boltzmann},
                     {"init_temperature", cfg.init_temperature},
                     {"burn_in_steps", cfg.burn_in_steps},
                     {"seed", cfg.seed}};
    traj.states.push_back(s);
    traj.graphs.push_back(cutoff_graph(s.q, cfg.r_c, cfg.box));
    for (std::size_t f = 1; f < frames; ++f) {
        for (std::size_t k = 0; k < cfg.sample_stride; ++k) s = advance(std::move(s));
        traj.states.push_back(s);
        traj.graphs.push_back(cutoff_graph(s.q, cfg.r_c, cfg.box));
    }
    return traj;
}

}  // namespace sympgnn
