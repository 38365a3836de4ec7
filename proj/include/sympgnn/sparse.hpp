// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <tuple>
#include <vector>

#include "sympgnn/core.hpp"

namespace sympgnn {

/// CSR matrix used for message-passing operators and sparse feature blocks.
/// Row-major sweep order makes products deterministic.
struct SparseMat {
    std::size_t rows = 0, cols = 0;
    std::vector<int> row_ptr;  // size rows+1
    std::vector<int> col_idx;
    std::vector<double> vals;

    static SparseMat from_dense(const Matrix& m, double drop_tol = 0.0) {
        SparseMat s;
        s.rows = m.rows();
        s.cols = m.cols();
        s.row_ptr.assign(s.rows + 1, 0);
        for (std::size_t i = 0; i < s.rows; ++i) {
            for (std::size_t j = 0; j < s.cols; ++j) {
                const double v = m(i, j);
                if (std::abs(v) > drop_tol) {
                    s.col_idx.push_back(static_cast<int>(j));
                    s.vals.push_back(v);
                }
            }
            s.row_ptr[i + 1] = static_cast<int>(s.col_idx.size());
        }
        return s;
    }

    /// Triplets must not contain duplicates; they are sorted into CSR order.
    static SparseMat from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<std::tuple<int, int, double>> trips) {
        std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
            return std::get<1>(a) < std::get<1>(b);
        });
        SparseMat s;
        s.rows = rows;
        s.cols = cols;
        s.row_ptr.assign(rows + 1, 0);
        for (const auto& [i, j, v] : trips) {
            require(i >= 0 && static_cast<std::size_t>(i) < rows && j >= 0 &&
                        static_cast<std::size_t>(j) < cols,
                    "SparseMat: triplet out of range");
            s.row_ptr[static_cast<std::size_t>(i) + 1]++;
            s.col_idx.push_back(j);
            s.vals.push_back(v);
        }
        for (std::size_t i = 0; i < rows; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
        return s;
    }

    SparseMat transposed() const {
        std::vector<std::tuple<int, int, double>> trips;
        trips.reserve(vals.size());
        for (std::size_t i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                trips.emplace_back(col_idx[k], static_cast<int>(i), vals[k]);
        return from_triplets(cols, rows, std::move(trips));
    }

    std::size_t nnz() const { return vals.size(); }

    /// this * x for dense x.
    Matrix apply(const Matrix& x) const {
        require(x.rows() == cols, "SparseMat::apply: dimension mismatch " +
                                      std::to_string(rows) + "x" + std::to_string(cols) +
                                      " times " + x.shape_str());
        Matrix r(rows, x.cols());
        const std::size_t p = x.cols();
        for (std::size_t i = 0; i < rows; ++i) {
            double* ri = &r.data()[i * p];
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                const double v = vals[k];
                const double* xr = &x.data()[static_cast<std::size_t>(col_idx[k]) * p];
                for (std::size_t j = 0; j < p; ++j) ri[j] += v * xr[j];
            }
        }
        r.check_finite("SparseMat::apply");
        return r;
    }

    Matrix to_dense() const {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                m(i, static_cast<std::size_t>(col_idx[k])) = vals[k];
        return m;
    }
};

using SparsePtr = std::shared_ptr<const SparseMat>;

}  // namespace sympgnn
