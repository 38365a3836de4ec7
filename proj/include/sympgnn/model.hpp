// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sympgnn/modules.hpp"

namespace sympgnn {

enum class HeadKind { identity, affine, mlp };

inline std::string head_kind_name(HeadKind k) {
    switch (k) {
        case HeadKind::identity: return "identity";
        case HeadKind::affine: return "affine";
        case HeadKind::mlp: return "mlp";
    }
    fail("head_kind_name: bad kind");
}
inline HeadKind head_kind_by_name(const std::string& s) {
    if (s == "identity") return HeadKind::identity;
    if (s == "affine") return HeadKind::affine;
    if (s == "mlp") return HeadKind::mlp;
    fail("unknown head kind '" + s + "'");
}

/// Per-node encoder or decoder map. The decoder may read only the position
/// half of the latent state (the node-classification output layer).
struct Head {
    HeadKind kind = HeadKind::identity;
    Mlp net;            // unused for identity
    bool q_only = false;

    std::size_t in_dim(std::size_t full_width) const {
        if (kind == HeadKind::identity) return q_only ? full_width / 2 : full_width;
        return net.in_dim();
    }
};

/// Encoder + alternating symplectic module stack + decoder.
struct SympModel {
    std::size_t d = 0;  // latent feature width per half
    OperatorKind op_kind = OperatorKind::normalized_adjacency;
    Head encoder;                     // R^m -> R^{2d}
    std::vector<SympModule> modules;  // strict up/low alternation
    Head decoder;                     // R^{2d} (or R^d when q_only) -> R^{m_out}
    double dropout_p = 0.0;           // applied after the decoder in train mode

    bool needs_operator() const {
        for (const auto& m : modules)
            if (std::holds_alternative<LaLinearModule>(m)) return true;
        return false;
    }
    bool has_g_modules() const {
        for (const auto& m : modules)
            if (std::holds_alternative<GModule>(m)) return true;
        return false;
    }

    void validate() const {
        for (std::size_t i = 1; i < modules.size(); ++i)
            require(module_flavor(modules[i]) != module_flavor(modules[i - 1]),
                    "SympModel: module flavors must strictly alternate (violated at " +
                        std::to_string(i) + ")");
        if (encoder.kind != HeadKind::identity)
            require(encoder.net.out_dim() == 2 * d, "SympModel: encoder must output 2d");
        if (decoder.kind != HeadKind::identity)
            require(decoder.net.in_dim() == (decoder.q_only ? d : 2 * d),
                    "SympModel: decoder input width mismatch");
    }
};

// ---- parameter vector ------------------------------------------------------

namespace detail {
template <typename ModelT, typename Fn>
void for_each_param(ModelT& m, Fn&& fn) {
    auto head_params = [&](auto& head) {
        if (head.kind == HeadKind::identity) return;
        for (auto& L : head.net.layers) {
            fn(L.W);
            fn(L.b);
        }
    };
    head_params(m.encoder);
    for (auto& mod : m.modules) {
        if (auto* lin = std::get_if<LaLinearModule>(&mod)) {
            fn(lin->param);
        } else if (auto* act = std::get_if<LaActivationModule>(&mod)) {
            fn(act->coeff);
        } else {
            for (auto& L : std::get<GModule>(mod).net.layers) {
                fn(L.W);
                fn(L.b);
            }
        }
    }
    head_params(m.decoder);
}
}  // namespace detail

inline std::size_t parameter_count(const SympModel& m) {
    std::size_t n = 0;
    detail::for_each_param(m, [&](const Matrix& p) { n += p.size(); });
    return n;
}

/// Flatten every trainable block, in a fixed documented order:
/// encoder layers, modules front to back, decoder layers.
inline std::vector<double> parameter_vector(const SympModel& m) {
    std::vector<double> out;
    out.reserve(parameter_count(m));
    detail::for_each_param(m, [&](const Matrix& p) {
        out.insert(out.end(), p.data().begin(), p.data().end());
    });
    return out;
}

inline void set_parameters(SympModel& m, const std::vector<double>& v) {
    require(v.size() == parameter_count(m),
            "set_parameters: expected " + std::to_string(parameter_count(m)) +
                " values, got " + std::to_string(v.size()));
    std::size_t at = 0;
    detail::for_each_param(m, [&](Matrix& p) {
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = v[at++];
        p.check_finite("set_parameters");
    });
}

// ---- tape binding and forward ----------------------------------------------

struct BoundModel {
    MlpVars enc, dec;
    std::vector<ModuleVars> mods;
    std::vector<Var> flat;  // one leaf per parameter block, canonical order
};

inline BoundModel bind_model(Tape& t, const SympModel& m, bool requires_grad) {
    BoundModel b;
    auto bind_head = [&](const Head& h) {
        MlpVars v;
        if (h.kind == HeadKind::identity) return v;
        v = bind_mlp(t, h.net, requires_grad);
        for (auto& [w, bias] : v.wb) {
            b.flat.push_back(w);
            b.flat.push_back(bias);
        }
        return v;
    };
    b.enc = bind_head(m.encoder);
    for (const auto& mod : m.modules) {
        ModuleVars mv = bind_module(t, mod, requires_grad);
        if (std::holds_alternative<GModule>(mod)) {
            for (auto& [w, bias] : mv.mlp.wb) {
                b.flat.push_back(w);
                b.flat.push_back(bias);
            }
        } else {
            b.flat.push_back(mv.mat);
        }
        b.mods.push_back(std::move(mv));
    }
    b.dec = bind_head(m.decoder);
    return b;
}

inline StackContext model_context(const SympModel& m, const Graph& g) {
    return make_stack_context(
        g, m.needs_operator() ? std::optional<OperatorKind>(m.op_kind) : std::nullopt);
}

/// Run the symplectic stack only (latent phase space in, latent out).
inline PhaseVars stack_forward(Tape& t, const SympModel& m, const BoundModel& b,
                               PhaseVars s, const StackContext& ctx) {
    for (std::size_t i = 0; i < m.modules.size(); ++i)
        s = module_forward(t, m.modules[i], b.mods[i], s, ctx);
    return s;
}

/// Full model: per-node encode, module stack, per-node decode. The optional
/// dropout mask (already scaled by 1/(1-p)) is applied after the decoder;
/// evaluation passes leave it null.
inline Var model_forward_tape(Tape& t, const SympModel& m, const BoundModel& b, Var x,
                              const StackContext& ctx,
                              const Matrix* dropout_mask = nullptr) {
    m.validate();
    const std::size_t width = t.value(x).cols();
    Var h = x;
    if (m.encoder.kind == HeadKind::identity) {
        require(width == 2 * m.d,
                "model_forward: identity encoder needs input width 2d = " +
                    std::to_string(2 * m.d) + ", got " + std::to_string(width));
    } else {
        require(width == m.encoder.net.in_dim(), "model_forward: encoder input width " +
                                                     std::to_string(m.encoder.net.in_dim()) +
                                                     " != x width " + std::to_string(width));
        h = mlp_forward(t, m.encoder.net, b.enc, x);
    }
    PhaseVars s{t.slice_cols(h, 0, m.d), t.slice_cols(h, m.d, 2 * m.d)};
    s = stack_forward(t, m, b, s, ctx);

    Var out;
    if (m.decoder.kind == HeadKind::identity) {
        if (m.decoder.q_only) {
            out = s.q;
        } else {
            out = t.add(t.scatter_cols(s.p, 0, 2 * m.d), t.scatter_cols(s.q, m.d, 2 * m.d));
        }
    } else {
        Var dec_in = m.decoder.q_only
                         ? s.q
                         : t.add(t.scatter_cols(s.p, 0, 2 * m.d),
                                 t.scatter_cols(s.q, m.d, 2 * m.d));
        out = mlp_forward(t, m.decoder.net, b.dec, dec_in);
    }
    if (dropout_mask) out = t.mul_const(out, *dropout_mask);
    return out;
}

/// Plain inference. Deterministic: same inputs and parameters give
/// bit-identical outputs.
inline Matrix model_forward(const SympModel& m, const Matrix& x, const Graph& g) {
    StackContext ctx = model_context(m, g);
    Tape t;
    BoundModel b = bind_model(t, m, false);
    Var xv = t.leaf(x, m.has_g_modules());
    return t.value(model_forward_tape(t, m, b, xv, ctx));
}

/// Phase-space map with the stack only (identity heads), used by the
/// verification oracles.
inline PhaseState model_phase_map(const SympModel& m, const PhaseState& s, const Graph& g) {
    s.validate();
    StackContext ctx = model_context(m, g);
    Tape t;
    BoundModel b = bind_model(t, m, false);
    PhaseVars sv{t.leaf(s.p, true), t.leaf(s.q, true)};
    PhaseVars out = stack_forward(t, m, b, sv, ctx);
    return {t.value(out.p), t.value(out.q)};
}

// ---- constructors ------------------------------------------------------------

inline Head make_affine_head(std::size_t in, std::size_t out, Rng& rng, bool q_only = false) {
    Head h;
    h.kind = HeadKind::affine;
    h.q_only = q_only;
    h.net = make_mlp({in, out}, FnId::identity, rng);
    return h;
}

/// LA stack from a pair pattern: one (low, up) pair per character, 'L' for
/// linear modules and 'A' for activation modules. identity_init zeroes the
/// module parameters so the fresh stack is the identity map (the stable
/// start for rollout training).
inline SympModel make_la_stack(std::size_t d, const std::string& pair_pattern,
                               OperatorKind op_kind, const ActivationKind& act, Rng& rng,
                               bool identity_init = false) {
    SympModel m;
    m.d = d;
    m.op_kind = op_kind;
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (char c : pair_pattern) {
        require(c == 'L' || c == 'A',
                "make_la_stack: pattern must contain only 'L' and 'A', got '" +
                    std::string(1, c) + "'");
        for (Flavor f : {Flavor::low, Flavor::up}) {
            if (c == 'L') {
                LaLinearModule lin;
                lin.flavor = f;
                lin.param = identity_init ? Matrix::zeros(d, d)
                                          : rng.uniform_matrix(d, d, -s, s);
                m.modules.emplace_back(std::move(lin));
            } else {
                LaActivationModule a;
                a.flavor = f;
                a.coeff = identity_init ? Matrix::zeros(1, d)
                                        : rng.uniform_matrix(1, d, -1.0, 1.0);
                a.act = act;
                m.modules.emplace_back(std::move(a));
            }
        }
    }
    m.validate();
    return m;
}

/// LA-SympGNN default: pair types alternate linear, activation, linear, ...
inline SympModel make_la_sympgnn(std::size_t d, std::size_t pairs, OperatorKind op_kind,
                                 const ActivationKind& act, Rng& rng,
                                 bool identity_init = false) {
    std::string pattern;
    for (std::size_t i = 0; i < pairs; ++i) pattern.push_back(i % 2 == 0 ? 'L' : 'A');
    return make_la_stack(d, pattern, op_kind, act, rng, identity_init);
}

/// G-SympGNN stack: (low phi_v, up phi_e) pairs with zero-initialized final
/// layers, so a fresh model is the identity map. diff_init_scale > 0 starts
/// the first phi_e layer antisymmetric, W = [R; -R], so its features begin as
/// projections of q_j - q_k; the family is unchanged, only the starting
/// point (pair interactions depend on coordinate differences).
struct GStackOptions {
    double diff_init_scale = 0.0;   // phi_e first layer, [R; -R] with this spread
    double v_input_scale = 0.0;     // phi_v first-layer init spread; 0 = 1/sqrt(fan_in)
    double out_scale_v = 1.0;       // fixed energy prefactors
    double out_scale_e = 1.0;
};

inline SympModel make_g_sympgnn(std::size_t d, std::size_t pairs,
                                const std::vector<std::size_t>& hidden, FnId act,
                                bool uses_edge_weight, Rng& rng,
                                const GStackOptions& opt = {}) {
    const double diff_init_scale = opt.diff_init_scale;
    SympModel m;
    m.d = d;
    for (std::size_t i = 0; i < pairs; ++i) {
        GModule low;
        low.flavor = Flavor::low;
        low.out_scale = opt.out_scale_v;
        std::vector<std::size_t> dims_v{d};
        dims_v.insert(dims_v.end(), hidden.begin(), hidden.end());
        dims_v.push_back(1);
        low.net = make_mlp(dims_v, act, rng, /*zero_final=*/true);
        if (opt.v_input_scale > 0.0) {
            Matrix& w = low.net.layers.front().W;
            for (std::size_t k = 0; k < w.size(); ++k)
                w[k] = rng.uniform(-opt.v_input_scale, opt.v_input_scale);
        }
        m.modules.emplace_back(std::move(low));

        GModule up;
        up.flavor = Flavor::up;
        up.uses_edge_weight = uses_edge_weight;
        up.out_scale = opt.out_scale_e;
        std::vector<std::size_t> dims_e{2 * d + (uses_edge_weight ? 1u : 0u)};
        dims_e.insert(dims_e.end(), hidden.begin(), hidden.end());
        dims_e.push_back(1);
        up.net = make_mlp(dims_e, act, rng, /*zero_final=*/true);
        if (diff_init_scale > 0.0) {
            Matrix& w = up.net.layers.front().W;
            Matrix& b = up.net.layers.front().b;
            for (std::size_t c = 0; c < w.cols(); ++c) {
                for (std::size_t r = 0; r < d; ++r) {
                    const double v = rng.uniform(-diff_init_scale, diff_init_scale);
                    w(r, c) = v;
                    w(d + r, c) = -v;
                }
                if (uses_edge_weight) w(2 * d, c) = rng.uniform(-1.0, 1.0);
                // nonzero bias: otherwise the two edge orientations cancel
                // (tanh odd, tanh' even) and the module force vanishes
                b(0, c) = rng.uniform(-1.5, 1.5);
            }
        }
        m.modules.emplace_back(std::move(up));
    }
    m.validate();
    return m;
}

// ---- checkpoint JSON ---------------------------------------------------------

namespace detail {
inline nlohmann::json head_to_json(const Head& h) {
    nlohmann::json j;
    j["kind"] = head_kind_name(h.kind);
    j["q_only"] = h.q_only;
    if (h.kind != HeadKind::identity) {
        auto dims = nlohmann::json::array();
        dims.push_back(h.net.layers.front().W.rows());
        for (const auto& L : h.net.layers) dims.push_back(L.W.cols());
        j["dims"] = std::move(dims);
        j["activation"] = fn_name(h.net.layers.front().act);
    }
    return j;
}

inline Head head_from_json(const nlohmann::json& j) {
    Head h;
    h.kind = head_kind_by_name(j.at("kind").get<std::string>());
    h.q_only = j.value("q_only", false);
    if (h.kind != HeadKind::identity) {
        auto dims = j.at("dims").get<std::vector<std::size_t>>();
        FnId act = FnId::identity;
        const std::string an = j.value("activation", "identity");
        if (an != "identity") act = activation_by_name(an).sigma;
        Rng dummy(0);
        h.net = make_mlp(dims, act, dummy);
    }
    return h;
}
}  // namespace detail

inline nlohmann::json model_architecture_json(const SympModel& m) {
    nlohmann::json arch;
    arch["d"] = m.d;
    arch["operator"] = operator_kind_name(m.op_kind);
    arch["dropout_p"] = m.dropout_p;
    arch["encoder"] = detail::head_to_json(m.encoder);
    arch["decoder"] = detail::head_to_json(m.decoder);
    auto mods = nlohmann::json::array();
    for (const auto& mod : m.modules) {
        nlohmann::json mj;
        mj["flavor"] = flavor_name(module_flavor(mod));
        if (const auto* lin = std::get_if<LaLinearModule>(&mod)) {
            mj["type"] = "la_linear";
            mj["d"] = lin->param.rows();
        } else if (const auto* act = std::get_if<LaActivationModule>(&mod)) {
            mj["type"] = "la_activation";
            mj["d"] = act->coeff.cols();
            mj["activation"] = act->act.name;
        } else {
            const auto& g = std::get<GModule>(mod);
            mj["type"] = "g";
            mj["uses_edge_weight"] = g.uses_edge_weight;
            mj["out_scale"] = g.out_scale;
            auto dims = nlohmann::json::array();
            dims.push_back(g.net.layers.front().W.rows());
            for (const auto& L : g.net.layers) dims.push_back(L.W.cols());
            mj["dims"] = std::move(dims);
            mj["activation"] = fn_name(g.net.layers.front().act);
        }
        mods.push_back(std::move(mj));
    }
    arch["modules"] = std::move(mods);
    return arch;
}

inline SympModel model_from_architecture_json(const nlohmann::json& arch) {
    SympModel m;
    m.d = arch.at("d").get<std::size_t>();
    m.op_kind = operator_kind_by_name(arch.at("operator").get<std::string>());
    m.dropout_p = arch.value("dropout_p", 0.0);
    m.encoder = detail::head_from_json(arch.at("encoder"));
    m.decoder = detail::head_from_json(arch.at("decoder"));
    for (const auto& mj : arch.at("modules")) {
        const std::string type = mj.at("type").get<std::string>();
        const Flavor f = flavor_by_name(mj.at("flavor").get<std::string>());
        if (type == "la_linear") {
            LaLinearModule lin;
            lin.flavor = f;
            const auto d = mj.at("d").get<std::size_t>();
            lin.param = Matrix::zeros(d, d);
            m.modules.emplace_back(std::move(lin));
        } else if (type == "la_activation") {
            LaActivationModule a;
            a.flavor = f;
            a.coeff = Matrix::zeros(1, mj.at("d").get<std::size_t>());
            a.act = activation_by_name(mj.at("activation").get<std::string>());
            m.modules.emplace_back(std::move(a));
        } else if (type == "g") {
            GModule g;
            g.flavor = f;
            g.uses_edge_weight = mj.at("uses_edge_weight").get<bool>();
            g.out_scale = mj.value("out_scale", 1.0);
            auto dims = mj.at("dims").get<std::vector<std::size_t>>();
            FnId act = FnId::identity;
            const std::string an = mj.value("activation", "tanh");
            if (an != "identity") act = activation_by_name(an).sigma;
            Rng dummy(0);
            g.net = make_mlp(dims, act, dummy);
            m.modules.emplace_back(std::move(g));
        } else {
            fail("checkpoint: unknown module type '" + type + "'");
        }
    }
    m.validate();
    return m;
}

/// {"format_version": 1, "architecture": {...}, "parameters": [...]}; doubles
/// round-trip exactly through the JSON encoder.
inline nlohmann::json model_to_checkpoint(const SympModel& m) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["architecture"] = model_architecture_json(m);
    j["parameters"] = parameter_vector(m);
    return j;
}

inline SympModel model_from_checkpoint(const nlohmann::json& j) {
    require(j.contains("format_version") && j.at("format_version").get<int>() == 1,
            "checkpoint: unsupported or missing format_version");
    SympModel m = model_from_architecture_json(j.at("architecture"));
    set_parameters(m, j.at("parameters").get<std::vector<double>>());
    return m;
}

}  // namespace sympgnn
