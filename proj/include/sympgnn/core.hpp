// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sympgnn {

/// Thrown on contract violations (shape mismatch, bad config, corrupt file).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

/// Dense row-major matrix of 64-bit floats. Value semantics; every public
/// constructor and operation checks all entries are finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        require(data_.size() == rows_ * cols_,
                "Matrix: data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
        check_finite("Matrix(ctor)");
    }

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix filled(std::size_t r, std::size_t c, double v) {
        Matrix m(r, c);
        for (auto& x : m.data_) x = v;
        return m;
    }
    /// Column vector from values.
    static Matrix col(std::vector<double> v) {
        std::size_t n = v.size();
        return Matrix(n, 1, std::move(v));
    }
    static Matrix row(std::vector<double> v) {
        std::size_t n = v.size();
        return Matrix(1, n, std::move(v));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    void check_finite(const char* where) const {
        for (double x : data_)
            if (!std::isfinite(x)) fail(std::string(where) + ": non-finite entry");
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline Matrix add(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "add: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    Matrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "sub: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    Matrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "hadamard: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    Matrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] * b[k];
    return r;
}

inline Matrix scale(const Matrix& a, double c) {
    Matrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = c * a[k];
    r.check_finite("scale");
    return r;
}

inline Matrix transpose(const Matrix& a) {
    Matrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(),
            "matmul: dimension mismatch, " + a.shape_str() + " times " + b.shape_str());
    Matrix r(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* ri = &r.data()[i * p];
        for (std::size_t k = 0; k < m; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = &b.data()[k * p];
            for (std::size_t j = 0; j < p; ++j) ri[j] += aik * bk[j];
        }
    }
    r.check_finite("matmul");
    return r;
}

/// Column-stacking flatten: (n x m) -> (nm x 1), columns on top of each other.
inline Matrix fl(const Matrix& x) {
    Matrix r(x.rows() * x.cols(), 1);
    std::size_t k = 0;
    for (std::size_t j = 0; j < x.cols(); ++j)
        for (std::size_t i = 0; i < x.rows(); ++i) r[k++] = x(i, j);
    return r;
}

/// Inverse of fl for a known target shape.
inline Matrix unfl(const Matrix& v, std::size_t rows, std::size_t cols) {
    require(v.size() == rows * cols && v.cols() == 1, "unfl: size mismatch");
    Matrix r(rows, cols);
    std::size_t k = 0;
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) r(i, j) = v[k++];
    return r;
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double sum(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x;
    return s;
}

inline double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return std::sqrt(s);
}

/// Deterministic RNG. Draws are hand-rolled on top of mt19937_64 so that the
/// stream does not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double canonical() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * canonical(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 0.0, u2 = 0.0;
        do {
            u1 = canonical();
        } while (u1 <= 0.0);
        u2 = canonical();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return mean + stddev * r * std::cos(th);
    }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return eng_() % n; }

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(index(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

    Matrix uniform_matrix(std::size_t r, std::size_t c, double a, double b) {
        Matrix m(r, c);
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = uniform(a, b);
        return m;
    }
    Matrix normal_matrix(std::size_t r, std::size_t c, double mean = 0.0, double stddev = 1.0) {
        Matrix m(r, c);
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = normal(mean, stddev);
        return m;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sympgnn
