// Copyright 2026 The topoff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TOPOFF_GF2_HPP
#define TOPOFF_GF2_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "topoff/pauli.hpp"

namespace topoff::gf2 {

/// Dense binary matrix with bit-packed rows.
class BitMatrix {
   public:
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(bits::words_for(cols)), data_(rows * stride_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return bits::get(row(r), c); }
    void set(std::size_t r, std::size_t c, bool v) { bits::set(row(r), c, v); }

    std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
    std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }

    void xor_row(std::size_t dst, std::size_t src) {
        for (std::size_t k = 0; k < stride_; ++k) {
            data_[dst * stride_ + k] ^= data_[src * stride_ + k];
        }
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) {
            return;
        }
        for (std::size_t k = 0; k < stride_; ++k) {
            std::swap(data_[a * stride_ + k], data_[b * stride_ + k]);
        }
    }

   private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t stride_;
    std::vector<std::uint64_t> data_;
};

/// Reduces m to row echelon form in place and returns its rank. When `ops` is
/// non-null, every elementary row operation (dst ^= src, or swap encoded as
/// {a, b, true}) is recorded so callers can replay it on companion data.
struct RowOp {
    std::size_t dst;
    std::size_t src;
    bool swap;
};

inline std::size_t row_reduce(BitMatrix& m, std::vector<RowOp>* ops = nullptr, bool full = true) {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
        std::size_t pivot = rank;
        while (pivot < m.rows() && !m.get(pivot, c)) {
            ++pivot;
        }
        if (pivot == m.rows()) {
            continue;
        }
        m.swap_rows(rank, pivot);
        if (ops != nullptr && pivot != rank) {
            ops->push_back({rank, pivot, true});
        }
        for (std::size_t r = full ? 0 : rank + 1; r < m.rows(); ++r) {
            if (r != rank && m.get(r, c)) {
                m.xor_row(r, rank);
                if (ops != nullptr) {
                    ops->push_back({r, rank, false});
                }
            }
        }
        ++rank;
    }
    return rank;
}

inline std::size_t rank(BitMatrix m) { return row_reduce(m, nullptr, false); }

/// Basis of {a : a^T m = 0}, i.e. the left nullspace, as coefficient vectors over the rows of m.
inline std::vector<std::vector<std::uint64_t>> left_nullspace(const BitMatrix& m) {
    // Augment [m | I] and reduce on the m columns; rows that vanish on m carry the combination.
    BitMatrix aug(m.rows(), m.cols() + m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, m.cols() + r, true);
    }
    std::size_t rk = 0;
    for (std::size_t c = 0; c < m.cols() && rk < aug.rows(); ++c) {
        std::size_t pivot = rk;
        while (pivot < aug.rows() && !aug.get(pivot, c)) {
            ++pivot;
        }
        if (pivot == aug.rows()) {
            continue;
        }
        aug.swap_rows(rk, pivot);
        for (std::size_t r = rk + 1; r < aug.rows(); ++r) {
            if (aug.get(r, c)) {
                aug.xor_row(r, rk);
            }
        }
        ++rk;
    }
    std::vector<std::vector<std::uint64_t>> basis;
    for (std::size_t r = rk; r < aug.rows(); ++r) {
        std::vector<std::uint64_t> v(bits::words_for(m.rows()), 0);
        for (std::size_t k = 0; k < m.rows(); ++k) {
            bits::set(v, k, aug.get(r, m.cols() + k));
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Symplectic matrix with one row per Pauli: columns [x_0..x_{n-1} | z_0..z_{n-1}].
inline BitMatrix symplectic_rows(const std::vector<PauliOperator>& paulis, std::size_t n) {
    BitMatrix m(paulis.size(), 2 * n);
    for (std::size_t r = 0; r < paulis.size(); ++r) {
        for (std::size_t q = 0; q < n; ++q) {
            m.set(r, q, paulis[r].x(q));
            m.set(r, n + q, paulis[r].z(q));
        }
    }
    return m;
}

inline std::size_t pauli_rank(const std::vector<PauliOperator>& paulis) {
    if (paulis.empty()) {
        return 0;
    }
    return rank(symplectic_rows(paulis, paulis.front().num_qubits()));
}

}  // namespace topoff::gf2

#endif  // TOPOFF_GF2_HPP
