// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "sympgnn/core.hpp"

namespace sympgnn {

/// Scalar functions usable as element-wise tape primitives. Each entry knows
/// its derivative (another entry), so reverse mode stays closed under
/// differentiation up to the depth the models need (third derivatives for the
/// smooth activations; beyond that fn_deriv throws).
enum class FnId : std::uint8_t {
    identity,
    zero,
    one,
    tanh_antideriv,  // log cosh
    tanh_fn,
    tanh_d1,  // 1 - tanh^2
    tanh_d2,  // -2 t (1 - t^2)
    tanh_d3,  // -2 (1 - t^2)(1 - 3 t^2)
    sigmoid_antideriv,  // softplus
    sigmoid_fn,
    sigmoid_d1,  // s(1-s)
    sigmoid_d2,  // s(1-s)(1-2s)
    sigmoid_d3,  // s(1-s)(1 - 6s + 6s^2)
    relu_antideriv,  // max(x,0)^2 / 2
    relu_fn,
    relu_d1,  // step
    square,     // x^2 (test stub energies)
    square_d1,  // 2x
    two,
    exp_fn,
    log_fn,
    recip,     // 1/x
    recip_d1,  // -1/x^2
};

inline double fn_eval(FnId f, double x) {
    switch (f) {
        case FnId::identity: return x;
        case FnId::zero: return 0.0;
        case FnId::one: return 1.0;
        case FnId::tanh_antideriv: {
            // log cosh, overflow-safe
            const double a = std::abs(x);
            return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
        }
        case FnId::tanh_fn: return std::tanh(x);
        case FnId::tanh_d1: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case FnId::tanh_d2: {
            const double t = std::tanh(x);
            return -2.0 * t * (1.0 - t * t);
        }
        case FnId::tanh_d3: {
            const double t = std::tanh(x);
            const double s = 1.0 - t * t;
            return -2.0 * s * (1.0 - 3.0 * t * t);
        }
        case FnId::sigmoid_antideriv: {
            // softplus, overflow-safe
            return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
        }
        case FnId::sigmoid_fn: return 1.0 / (1.0 + std::exp(-x));
        case FnId::sigmoid_d1: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case FnId::sigmoid_d2: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case FnId::sigmoid_d3: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s);
        }
        case FnId::relu_antideriv: {
            const double r = std::max(x, 0.0);
            return 0.5 * r * r;
        }
        case FnId::relu_fn: return std::max(x, 0.0);
        case FnId::relu_d1: return x > 0.0 ? 1.0 : 0.0;
        case FnId::square: return x * x;
        case FnId::square_d1: return 2.0 * x;
        case FnId::two: return 2.0;
        case FnId::exp_fn: return std::exp(x);
        case FnId::log_fn: return std::log(x);
        case FnId::recip: return 1.0 / x;
        case FnId::recip_d1: return -1.0 / (x * x);
    }
    fail("fn_eval: unknown function id");
}

inline FnId fn_deriv(FnId f) {
    switch (f) {
        case FnId::identity: return FnId::one;
        case FnId::zero: return FnId::zero;
        case FnId::one: return FnId::zero;
        case FnId::tanh_antideriv: return FnId::tanh_fn;
        case FnId::tanh_fn: return FnId::tanh_d1;
        case FnId::tanh_d1: return FnId::tanh_d2;
        case FnId::tanh_d2: return FnId::tanh_d3;
        case FnId::sigmoid_antideriv: return FnId::sigmoid_fn;
        case FnId::sigmoid_fn: return FnId::sigmoid_d1;
        case FnId::sigmoid_d1: return FnId::sigmoid_d2;
        case FnId::sigmoid_d2: return FnId::sigmoid_d3;
        case FnId::relu_antideriv: return FnId::relu_fn;
        case FnId::relu_fn: return FnId::relu_d1;
        case FnId::relu_d1: return FnId::zero;
        case FnId::square: return FnId::square_d1;
        case FnId::square_d1: return FnId::two;
        case FnId::two: return FnId::zero;
        case FnId::exp_fn: return FnId::exp_fn;
        case FnId::log_fn: return FnId::recip;
        case FnId::recip: return FnId::recip_d1;
        default:
            fail("fn_deriv: derivative depth exceeded for function id " +
                 std::to_string(static_cast<int>(f)));
    }
}

inline std::string fn_name(FnId f) {
    switch (f) {
        case FnId::tanh_fn: return "tanh";
        case FnId::sigmoid_fn: return "sigmoid";
        case FnId::relu_fn: return "relu";
        case FnId::identity: return "identity";
        case FnId::square: return "square";
        default: return "fn" + std::to_string(static_cast<int>(f));
    }
}

/// A nonlinearity together with its antiderivative and derivative.
struct ActivationKind {
    std::string name;
    FnId sigma;
    FnId sigma_antideriv;
    FnId sigma_deriv;

    double apply(double x) const { return fn_eval(sigma, x); }
    double antideriv(double x) const { return fn_eval(sigma_antideriv, x); }
    double deriv(double x) const { return fn_eval(sigma_deriv, x); }
};

inline ActivationKind activation_tanh() {
    return {"tanh", FnId::tanh_fn, FnId::tanh_antideriv, FnId::tanh_d1};
}
inline ActivationKind activation_sigmoid() {
    return {"sigmoid", FnId::sigmoid_fn, FnId::sigmoid_antideriv, FnId::sigmoid_d1};
}
inline ActivationKind activation_relu() {
    return {"relu", FnId::relu_fn, FnId::relu_antideriv, FnId::relu_d1};
}

inline ActivationKind activation_by_name(const std::string& name) {
    if (name == "tanh") return activation_tanh();
    if (name == "sigmoid") return activation_sigmoid();
    if (name == "relu") return activation_relu();
    fail("unknown activation '" + name + "' (expected tanh, sigmoid or relu)");
}

}  // namespace sympgnn
