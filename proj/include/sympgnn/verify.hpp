// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file verify.hpp
 * @brief Independent numerical oracles: symplecticity and permutation
 *        equivariance checks, plus physical observables (temperature, g(r),
 *        energy curves). Everything here works from finite differences and
 *        plain arithmetic, never through the tape, so it can sit in judgment
 *        of the model code.
 */

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sympgnn/graph.hpp"
#include "sympgnn/modules.hpp"
#include "sympgnn/simulate.hpp"

namespace sympgnn {

/// Canonical symplectic form J = [[0, I], [-I, 0]] of size 2m.
inline Matrix symplectic_form(std::size_t m) {
    Matrix j(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        j(i, m + i) = 1.0;
        j(m + i, i) = -1.0;
    }
    return j;
}

namespace detail {
inline Matrix flatten_state(const PhaseState& s) {
    Matrix v(2 * s.n() * s.d(), 1);
    Matrix fp = fl(s.p), fq = fl(s.q);
    for (std::size_t k = 0; k < fp.size(); ++k) v[k] = fp[k];
    for (std::size_t k = 0; k < fq.size(); ++k) v[fp.size() + k] = fq[k];
    return v;
}
inline PhaseState unflatten_state(const Matrix& v, std::size_t n, std::size_t d) {
    Matrix fp(n * d, 1), fq(n * d, 1);
    for (std::size_t k = 0; k < n * d; ++k) {
        fp[k] = v[k];
        fq[k] = v[n * d + k];
    }
    return {unfl(fp, n, d), unfl(fq, n, d)};
}
}  // namespace detail

/// Central-difference Jacobian of the flattened map at s, column by column.
inline Matrix fd_jacobian(const PhaseMap& map, const PhaseState& s, double fd_step = 1e-5) {
    const std::size_t n = s.n(), d = s.d(), dim = 2 * n * d;
    Matrix x0 = detail::flatten_state(s);
    Matrix jac(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        Matrix xp = x0, xm = x0;
        xp[j] += fd_step;
        xm[j] -= fd_step;
        Matrix fp = detail::flatten_state(map(detail::unflatten_state(xp, n, d)));
        Matrix fm = detail::flatten_state(map(detail::unflatten_state(xm, n, d)));
        for (std::size_t i = 0; i < dim; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * fd_step);
    }
    jac.check_finite("fd_jacobian");
    return jac;
}

/// max |(grad phi)^T J (grad phi) - J| with the Jacobian from central
/// differences in the flattened coordinates.
inline double check_symplectic(const PhaseMap& map, const PhaseState& s,
                               double fd_step = 1e-5) {
    const std::size_t m = s.n() * s.d();
    Matrix g = fd_jacobian(map, s, fd_step);
    Matrix j = symplectic_form(m);
    Matrix lhs = matmul(matmul(transpose(g), j), g);
    return max_abs_diff(lhs, j);
}

/// Determinant via LU with partial pivoting (volume-preservation check).
inline double lu_determinant(Matrix a) {
    require(a.rows() == a.cols(), "lu_determinant: matrix must be square");
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

/// max over random permutations of |map(P s, P g) - P map(s, g)|.
inline double check_perm_equivariance(const GraphPhaseMap& map, const PhaseState& s,
                                      const Graph& g, std::size_t trials,
                                      std::uint64_t seed) {
    s.validate();
    PhaseState base = map(s, g);
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto perm = rng.permutation(g.n);
        PhaseState ps{Matrix(s.n(), s.d()), Matrix(s.n(), s.d())};
        for (std::size_t i = 0; i < s.n(); ++i)
            for (std::size_t c = 0; c < s.d(); ++c) {
                ps.p(perm[i], c) = s.p(i, c);
                ps.q(perm[i], c) = s.q(i, c);
            }
        PhaseState got = map(ps, permute_graph(g, perm));
        for (std::size_t i = 0; i < s.n(); ++i)
            for (std::size_t c = 0; c < s.d(); ++c) {
                worst = std::max(worst, std::abs(got.p(perm[i], c) - base.p(i, c)));
                worst = std::max(worst, std::abs(got.q(perm[i], c) - base.q(i, c)));
            }
    }
    return worst;
}

/// Equipartition estimate T = (sum |p_i|^2 / m_i) / (n d k_B).
inline double temperature(const PhaseState& s, const std::vector<double>& masses,
                          double k_boltzmann = 1.0) {
    s.validate();
    double twice_kinetic = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double m = masses.empty() ? 1.0 : masses[i];
        for (std::size_t c = 0; c < s.d(); ++c) twice_kinetic += s.p(i, c) * s.p(i, c) / m;
    }
    return twice_kinetic /
           (static_cast<double>(s.n()) * static_cast<double>(s.d()) * k_boltzmann);
}

/// Pair-distance histogram normalized by the 2D ideal-gas shell density
/// 2 pi r dr rho and the frame count; g(r) -> 1 for uncorrelated particles.
inline std::vector<double> radial_distribution(const Trajectory& traj, std::size_t bins,
                                               double r_max, double box) {
    traj.validate();
    require(bins >= 1, "radial_distribution: need at least one bin");
    require(r_max > 0.0 && r_max <= 0.5 * box,
            "radial_distribution: r_max must be in (0, box/2]");
    const std::size_t n = traj.states.front().n();
    require(traj.states.front().d() == 2, "radial_distribution: 2D systems only");
    const double dr = r_max / static_cast<double>(bins);
    std::vector<double> hist(bins, 0.0);
    for (const auto& s : traj.states) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double r = std::sqrt(pair_dist_sq(s.q, i, j, box));
                const auto b = static_cast<std::size_t>(r / dr);
                if (b < bins) hist[b] += 2.0;  // both orderings of the pair
            }
    }
    const double rho = static_cast<double>(n) / (box * box);
    std::vector<double> g(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
        const double r_lo = static_cast<double>(b) * dr;
        const double r_hi = r_lo + dr;
        const double shell = M_PI * (r_hi * r_hi - r_lo * r_lo) * rho;
        g[b] = hist[b] /
               (static_cast<double>(traj.frames()) * static_cast<double>(n) * shell);
    }
    return g;
}

inline double rdf_bin_center(std::size_t bin, std::size_t bins, double r_max) {
    return (static_cast<double>(bin) + 0.5) * r_max / static_cast<double>(bins);
}

/// Per-frame total energy of a trajectory under a known Hamiltonian.
inline std::vector<double> energy_curve(const Trajectory& traj,
                                        const std::function<double(const PhaseState&)>& h) {
    traj.validate();
    std::vector<double> e;
    e.reserve(traj.frames());
    for (const auto& s : traj.states) e.push_back(h(s));
    return e;
}

// ---- report -------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed() const { return deviation <= tolerance; }
};

inline nlohmann::json verification_report(const std::vector<CheckResult>& checks) {
    nlohmann::json j;
    auto arr = nlohmann::json::array();
    bool all = true;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"deviation", c.deviation},
                       {"tolerance", c.tolerance},
                       {"pass", c.passed()}});
        all = all && c.passed();
    }
    j["checks"] = std::move(arr);
    j["all_passed"] = all;
    return j;
}

}  // namespace sympgnn
