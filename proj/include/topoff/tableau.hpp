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

#ifndef TOPOFF_TABLEAU_HPP
#define TOPOFF_TABLEAU_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoff/gf2.hpp"
#include "topoff/pauli.hpp"
#include "topoff/rng.hpp"

namespace topoff {

/// Pure stabilizer state on n qubits, stored as the Aaronson-Gottesman
/// destabilizer/stabilizer tableau. Rows 0..n-1 are destabilizers, rows
/// n..2n-1 are stabilizers; each row is a bit-packed (x, z) pair plus a sign.
///
/// Destabilizer signs are not meaningful and are not maintained exactly.
class StabilizerTableau {
   public:
    /// |0...0>.
    explicit StabilizerTableau(std::size_t n) : n_(n), w_(bits::words_for(n)) {
        if (n == 0) {
            throw std::invalid_argument("a stabilizer state needs at least one qubit");
        }
        xs_.assign(2 * n * w_, 0);
        zs_.assign(2 * n * w_, 0);
        signs_.assign(2 * n, 0);
        for (std::size_t q = 0; q < n; ++q) {
            bits::set(row_x(q), q, true);
            bits::set(row_z(n + q), q, true);
        }
    }

    std::size_t num_qubits() const { return n_; }

    // ---- Clifford gates -------------------------------------------------

    void h(std::size_t q) {
        check(q);
        for_rows(q, [](bool& x, bool& z, bool& r) {
            r ^= x && z;
            std::swap(x, z);
        });
    }

    void s(std::size_t q) {
        check(q);
        for_rows(q, [](bool& x, bool& z, bool& r) {
            r ^= x && z;
            z ^= x;
        });
    }

    void sdg(std::size_t q) {
        check(q);
        for_rows(q, [](bool& x, bool& z, bool& r) {
            r ^= x && !z;
            z ^= x;
        });
    }

    void x(std::size_t q) {
        check(q);
        flip_signs_where(q, /*on_x=*/false, /*on_z=*/true);
    }
    void z(std::size_t q) {
        check(q);
        flip_signs_where(q, true, false);
    }
    void y(std::size_t q) {
        check(q);
        for_rows(q, [](bool& x, bool& z, bool& r) { r ^= x != z; });
    }

    void cx(std::size_t c, std::size_t t) {
        check_pair(c, t);
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            auto rx = row_x(i);
            auto rz = row_z(i);
            const bool xc = bits::get(rx, c);
            const bool zc = bits::get(rz, c);
            const bool xt = bits::get(rx, t);
            const bool zt = bits::get(rz, t);
            if (xc && zt && (xt == zc)) {
                signs_[i] ^= 1;
            }
            bits::set(rx, t, xt != xc);
            bits::set(rz, c, zc != zt);
        }
    }

    void cz(std::size_t a, std::size_t b) {
        check_pair(a, b);
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            auto rx = row_x(i);
            auto rz = row_z(i);
            const bool xa = bits::get(rx, a);
            const bool za = bits::get(rz, a);
            const bool xb = bits::get(rx, b);
            const bool zb = bits::get(rz, b);
            if (xa && xb && (za != zb)) {
                signs_[i] ^= 1;
            }
            bits::set(rz, a, za != xb);
            bits::set(rz, b, zb != xa);
        }
    }

    void swap(std::size_t a, std::size_t b) {
        check_pair(a, b);
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            auto rx = row_x(i);
            auto rz = row_z(i);
            const bool xa = bits::get(rx, a);
            const bool za = bits::get(rz, a);
            bits::set(rx, a, bits::get(rx, b));
            bits::set(rz, a, bits::get(rz, b));
            bits::set(rx, b, xa);
            bits::set(rz, b, za);
        }
    }

    /// Conjugates the state by a Pauli (applies it as a gate). The phase of p is irrelevant.
    void apply_pauli(const PauliOperator& p) {
        check_size(p);
        for (std::size_t i = n_; i < 2 * n_; ++i) {
            if (!row_commutes(i, p)) {
                signs_[i] ^= 1;
            }
        }
    }

    // ---- Measurement ----------------------------------------------------

    /// Measures the Hermitian Pauli p and returns its eigenvalue (+1 or -1).
    /// Deterministic outcomes consume no randomness.
    int measure(const PauliOperator& p, Rng& rng) {
        require_hermitian(p);
        const std::size_t anti = first_anticommuting_stabilizer(p);
        if (anti == npos) {
            return deterministic_value(p);
        }
        const int outcome = coin(rng) ? -1 : 1;
        collapse(p, anti, outcome);
        return outcome;
    }

    /// Like measure(), but forces the outcome of a random measurement. Used by
    /// oracles that enumerate branches. Throws if the forced outcome has zero probability.
    int measure_forced(const PauliOperator& p, int outcome) {
        require_hermitian(p);
        const std::size_t anti = first_anticommuting_stabilizer(p);
        if (anti == npos) {
            if (deterministic_value(p) != outcome) {
                throw std::domain_error("forced measurement outcome has probability zero");
            }
            return outcome;
        }
        collapse(p, anti, outcome);
        return outcome;
    }

    /// Computational-basis measurement of one qubit, returning the bit (0 ↔ +1).
    bool measure_z(std::size_t q, Rng& rng) { return measure(PauliOperator::single(n_, q, Pauli1::Z), rng) < 0; }

    /// Returns q to |0>.
    void reset(std::size_t q, Rng& rng) {
        if (measure_z(q, rng)) {
            x(q);
        }
    }

    /// Exact expectation value: +1, -1, or 0.
    int expect(const PauliOperator& p) const {
        require_hermitian(p);
        if (first_anticommuting_stabilizer(p) != npos) {
            return 0;
        }
        return deterministic_value(p);
    }

    // ---- Structure ------------------------------------------------------

    PauliOperator row(std::size_t i) const {
        PauliOperator p(n_);
        auto px = p.x_words();
        auto pz = p.z_words();
        for (std::size_t k = 0; k < w_; ++k) {
            px[k] = xs_[i * w_ + k];
            pz[k] = zs_[i * w_ + k];
        }
        p.set_phase(signs_[i] ? 2 : 0);
        return p;
    }

    PauliOperator stabilizer(std::size_t k) const { return row(n_ + k); }
    PauliOperator destabilizer(std::size_t k) const { return row(k); }

    std::vector<PauliOperator> stabilizers() const {
        std::vector<PauliOperator> out;
        out.reserve(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            out.push_back(stabilizer(k));
        }
        return out;
    }

    /// Row-reduced echelon form of the stabilizer group with exact signs. Two
    /// tableaus describe the same state iff their canonical forms are equal.
    std::vector<PauliOperator> canonical_stabilizers() const {
        std::vector<PauliOperator> rows = stabilizers();
        std::size_t rank = 0;
        for (std::size_t col = 0; col < 2 * n_ && rank < n_; ++col) {
            const std::size_t q = col % n_;
            const bool use_x = col < n_;
            auto has = [&](const PauliOperator& p) { return use_x ? p.x(q) : p.z(q); };
            std::size_t pivot = rank;
            while (pivot < n_ && !has(rows[pivot])) {
                ++pivot;
            }
            if (pivot == n_) {
                continue;
            }
            std::swap(rows[rank], rows[pivot]);
            for (std::size_t r = 0; r < n_; ++r) {
                if (r != rank && has(rows[r])) {
                    rows[r] *= rows[rank];
                }
            }
            ++rank;
        }
        return rows;
    }

    friend bool states_equal(const StabilizerTableau& a, const StabilizerTableau& b) {
        if (a.n_ != b.n_) {
            throw std::invalid_argument("states_equal: qubit counts differ");
        }
        return a.canonical_stabilizers() == b.canonical_stabilizers();
    }

    /// Exact second Rényi entropy (in nats) of the reduced state on `subset`.
    /// For stabilizer states every Rényi order gives the same value.
    double renyi2(std::span<const std::size_t> subset) const {
        std::vector<bool> in_a(n_, false);
        std::size_t size_a = 0;
        for (std::size_t q : subset) {
            check(q);
            if (!in_a[q]) {
                in_a[q] = true;
                ++size_a;
            }
        }
        if (size_a == 0) {
            return 0.0;
        }
        // Independent stabilizers supported inside A = n - rank(restriction to the complement).
        std::vector<std::size_t> comp;
        for (std::size_t q = 0; q < n_; ++q) {
            if (!in_a[q]) {
                comp.push_back(q);
            }
        }
        gf2::BitMatrix m(n_, 2 * comp.size());
        for (std::size_t k = 0; k < n_; ++k) {
            for (std::size_t j = 0; j < comp.size(); ++j) {
                m.set(k, 2 * j, bits::get(row_x(n_ + k), comp[j]));
                m.set(k, 2 * j + 1, bits::get(row_z(n_ + k), comp[j]));
            }
        }
        const std::size_t inside = n_ - gf2::rank(std::move(m));
        return static_cast<double>(size_a - inside) * std::numbers::ln2;
    }

    /// Checks the destabilizer/stabilizer commutation pattern and full rank.
    /// Returns an empty string when valid, else a description of the first defect.
    std::string validate() const {
        std::vector<PauliOperator> all;
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            all.push_back(row(i));
        }
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            for (std::size_t j = i + 1; j < 2 * n_; ++j) {
                const bool should_anticommute = (j == i + n_);
                if (all[i].commutes(all[j]) == should_anticommute) {
                    return "rows " + std::to_string(i) + " and " + std::to_string(j) + " have wrong commutation";
                }
            }
        }
        if (gf2::pauli_rank(all) != 2 * n_) {
            return "rows are not symplectically independent";
        }
        return {};
    }

   private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::span<std::uint64_t> row_x(std::size_t i) { return {xs_.data() + i * w_, w_}; }
    std::span<std::uint64_t> row_z(std::size_t i) { return {zs_.data() + i * w_, w_}; }
    std::span<const std::uint64_t> row_x(std::size_t i) const { return {xs_.data() + i * w_, w_}; }
    std::span<const std::uint64_t> row_z(std::size_t i) const { return {zs_.data() + i * w_, w_}; }

    void check(std::size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
        }
    }
    void check_pair(std::size_t a, std::size_t b) const {
        check(a);
        check(b);
        if (a == b) {
            throw std::invalid_argument("two-qubit gate on repeated qubit " + std::to_string(a));
        }
    }
    void check_size(const PauliOperator& p) const {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("Pauli size does not match state");
        }
    }
    void require_hermitian(const PauliOperator& p) const {
        check_size(p);
        if (!p.is_hermitian()) {
            throw std::invalid_argument("Pauli with imaginary phase is not an observable");
        }
    }

    template <typename F>
    void for_rows(std::size_t q, F&& f) {
        const std::size_t word = q >> 6;
        const std::uint64_t mask = std::uint64_t{1} << (q & 63);
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            std::uint64_t& wx = xs_[i * w_ + word];
            std::uint64_t& wz = zs_[i * w_ + word];
            bool x = (wx & mask) != 0;
            bool z = (wz & mask) != 0;
            bool r = signs_[i] != 0;
            f(x, z, r);
            wx = x ? (wx | mask) : (wx & ~mask);
            wz = z ? (wz | mask) : (wz & ~mask);
            signs_[i] = r;
        }
    }

    void flip_signs_where(std::size_t q, bool on_x, bool on_z) {
        const std::size_t word = q >> 6;
        const std::uint64_t mask = std::uint64_t{1} << (q & 63);
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            const bool hit = (on_x && (xs_[i * w_ + word] & mask)) || (on_z && (zs_[i * w_ + word] & mask));
            signs_[i] ^= hit ? 1 : 0;
        }
    }

    bool row_commutes(std::size_t i, const PauliOperator& p) const {
        int parity = 0;
        auto px = p.x_words();
        auto pz = p.z_words();
        for (std::size_t k = 0; k < w_; ++k) {
            parity ^= std::popcount((xs_[i * w_ + k] & pz[k]) ^ (zs_[i * w_ + k] & px[k])) & 1;
        }
        return parity == 0;
    }

    std::size_t first_anticommuting_stabilizer(const PauliOperator& p) const {
        for (std::size_t i = n_; i < 2 * n_; ++i) {
            if (!row_commutes(i, p)) {
                return i;
            }
        }
        return npos;
    }

    /// dst <- dst * src. The stored sign keeps only the real part of the phase.
    void row_mul(std::size_t dst, std::size_t src) {
        const int g = PauliOperator::product_phase(row_x(dst), row_z(dst), row_x(src), row_z(src));
        const int phase = (2 * signs_[dst] + 2 * signs_[src] + g) & 3;
        signs_[dst] = static_cast<std::uint8_t>((phase >> 1) & 1);
        for (std::size_t k = 0; k < w_; ++k) {
            xs_[dst * w_ + k] ^= xs_[src * w_ + k];
            zs_[dst * w_ + k] ^= zs_[src * w_ + k];
        }
    }

    int deterministic_value(const PauliOperator& p) const {
        PauliOperator acc(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            if (!row_commutes(k, p)) {
                acc *= row(n_ + k);
            }
        }
        if (!acc.same_letters(p)) {
            throw std::logic_error("stabilizer tableau is inconsistent");
        }
        return acc.phase() == p.phase() ? 1 : -1;
    }

    void collapse(const PauliOperator& p, std::size_t anti, int outcome) {
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            if (i != anti && !row_commutes(i, p)) {
                row_mul(i, anti);
            }
        }
        const std::size_t d = anti - n_;
        for (std::size_t k = 0; k < w_; ++k) {
            xs_[d * w_ + k] = xs_[anti * w_ + k];
            zs_[d * w_ + k] = zs_[anti * w_ + k];
            xs_[anti * w_ + k] = p.x_words()[k];
            zs_[anti * w_ + k] = p.z_words()[k];
        }
        signs_[d] = signs_[anti];
        const bool negative = (p.sign() * outcome) < 0;
        signs_[anti] = negative ? 1 : 0;
    }

    std::size_t n_;
    std::size_t w_;
    std::vector<std::uint64_t> xs_;
    std::vector<std::uint64_t> zs_;
    std::vector<std::uint8_t> signs_;
};

}  // namespace topoff

#endif  // TOPOFF_TABLEAU_HPP
