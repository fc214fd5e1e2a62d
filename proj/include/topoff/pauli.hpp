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

#ifndef TOPOFF_PAULI_HPP
#define TOPOFF_PAULI_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace topoff {

namespace bits {

inline constexpr std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

inline bool get(std::span<const std::uint64_t> w, std::size_t k) { return (w[k >> 6] >> (k & 63)) & 1U; }

inline void set(std::span<std::uint64_t> w, std::size_t k, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (k & 63);
    if (v) {
        w[k >> 6] |= m;
    } else {
        w[k >> 6] &= ~m;
    }
}

inline void flip(std::span<std::uint64_t> w, std::size_t k) { w[k >> 6] ^= std::uint64_t{1} << (k & 63); }

}  // namespace bits

/// Single-qubit Pauli letter. The numeric value packs (x, z) as x | z << 1.
enum class Pauli1 : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char pauli_char(Pauli1 p) {
    static constexpr char kChars[] = {'I', 'X', 'Z', 'Y'};
    return kChars[static_cast<int>(p)];
}

inline Pauli1 pauli_from_char(char c) {
    switch (c) {
        case 'I':
        case '_':
            return Pauli1::I;
        case 'X':
            return Pauli1::X;
        case 'Y':
            return Pauli1::Y;
        case 'Z':
            return Pauli1::Z;
        default:
            throw std::invalid_argument(std::string("not a Pauli letter: '") + c + "'");
    }
}

/// n-qubit Pauli operator i^phase * (P_0 ⊗ ... ⊗ P_{n-1}) with P_k ∈ {I, X, Y, Z}.
///
/// Y is the Hermitian Y, so an operator with phase 0 or 2 is Hermitian. The x/z
/// bit vectors are packed 64 qubits per word; padding bits above n stay zero.
class PauliOperator {
   public:
    PauliOperator() = default;
    explicit PauliOperator(std::size_t n) : n_(n), xs_(bits::words_for(n), 0), zs_(bits::words_for(n), 0) {}

    /// Parses a dense string such as "+XXIZ", "-Y_Z" or "iXY".
    static PauliOperator from_string(std::string_view text) {
        int phase = 0;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            phase = text[pos] == '-' ? 2 : 0;
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i') {
            phase += 1;
            ++pos;
        }
        PauliOperator p(text.size() - pos);
        for (std::size_t q = 0; pos < text.size(); ++pos, ++q) {
            p.set(q, pauli_from_char(text[pos]));
        }
        p.phase_ = static_cast<std::uint8_t>(phase & 3);
        return p;
    }

    /// Builds an operator on n qubits from letters placed on the listed qubits.
    static PauliOperator from_sparse(std::size_t n, std::string_view letters, std::span<const std::size_t> qubits) {
        if (letters.size() != qubits.size()) {
            throw std::invalid_argument("sparse Pauli: letter count does not match qubit count");
        }
        PauliOperator p(n);
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            if (qubits[k] >= n) {
                throw std::out_of_range("sparse Pauli: qubit index out of range");
            }
            if (p.get(qubits[k]) != Pauli1::I) {
                throw std::invalid_argument("sparse Pauli: repeated qubit");
            }
            p.set(qubits[k], pauli_from_char(letters[k]));
        }
        return p;
    }

    static PauliOperator single(std::size_t n, std::size_t q, Pauli1 letter) {
        PauliOperator p(n);
        p.set(q, letter);
        return p;
    }

    std::size_t num_qubits() const { return n_; }
    std::span<const std::uint64_t> x_words() const { return xs_; }
    std::span<const std::uint64_t> z_words() const { return zs_; }
    std::span<std::uint64_t> x_words() { return xs_; }
    std::span<std::uint64_t> z_words() { return zs_; }

    bool x(std::size_t q) const { return bits::get(xs_, q); }
    bool z(std::size_t q) const { return bits::get(zs_, q); }

    Pauli1 get(std::size_t q) const { return static_cast<Pauli1>(int(x(q)) | (int(z(q)) << 1)); }

    void set(std::size_t q, Pauli1 letter) {
        check_qubit(q);
        bits::set(xs_, q, static_cast<int>(letter) & 1);
        bits::set(zs_, q, (static_cast<int>(letter) >> 1) & 1);
    }

    /// Phase exponent k of i^k, in 0..3.
    int phase() const { return phase_; }
    void set_phase(int k) { phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4); }

    bool is_hermitian() const { return (phase_ & 1) == 0; }

    /// +1 or -1 for Hermitian operators.
    int sign() const {
        if (!is_hermitian()) {
            throw std::domain_error("sign() of a non-Hermitian Pauli");
        }
        return phase_ == 0 ? 1 : -1;
    }

    PauliOperator negated() const {
        PauliOperator r = *this;
        r.phase_ = static_cast<std::uint8_t>((phase_ + 2) & 3);
        return r;
    }

    /// Same operator on m ≥ n qubits (identity on the added qubits).
    PauliOperator widened(std::size_t m) const {
        if (m < n_) {
            throw std::invalid_argument("widened: cannot shrink a Pauli");
        }
        PauliOperator r(m);
        std::copy(xs_.begin(), xs_.end(), r.xs_.begin());
        std::copy(zs_.begin(), zs_.end(), r.zs_.begin());
        r.phase_ = phase_;
        return r;
    }

    bool is_identity_up_to_phase() const {
        return std::all_of(xs_.begin(), xs_.end(), [](auto w) { return w == 0; }) &&
               std::all_of(zs_.begin(), zs_.end(), [](auto w) { return w == 0; });
    }

    std::size_t weight() const {
        std::size_t w = 0;
        for (std::size_t k = 0; k < xs_.size(); ++k) {
            w += static_cast<std::size_t>(std::popcount(xs_[k] | zs_[k]));
        }
        return w;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < n_; ++q) {
            if (x(q) || z(q)) {
                out.push_back(q);
            }
        }
        return out;
    }

    bool commutes(const PauliOperator& other) const {
        check_same_size(other);
        int parity = 0;
        for (std::size_t k = 0; k < xs_.size(); ++k) {
            parity ^= std::popcount((xs_[k] & other.zs_[k]) ^ (zs_[k] & other.xs_[k])) & 1;
        }
        return parity == 0;
    }

    /// In-place right multiplication: *this = *this * rhs with exact phase.
    PauliOperator& operator*=(const PauliOperator& rhs) {
        check_same_size(rhs);
        phase_ = static_cast<std::uint8_t>((phase_ + rhs.phase_ + product_phase(xs_, zs_, rhs.xs_, rhs.zs_)) & 3);
        for (std::size_t k = 0; k < xs_.size(); ++k) {
            xs_[k] ^= rhs.xs_[k];
            zs_[k] ^= rhs.zs_[k];
        }
        return *this;
    }

    friend PauliOperator operator*(PauliOperator lhs, const PauliOperator& rhs) { return lhs *= rhs; }

    friend bool operator==(const PauliOperator& a, const PauliOperator& b) {
        return a.n_ == b.n_ && a.phase_ == b.phase_ && a.xs_ == b.xs_ && a.zs_ == b.zs_;
    }

    /// Equality ignoring the phase.
    bool same_letters(const PauliOperator& other) const { return n_ == other.n_ && xs_ == other.xs_ && zs_ == other.zs_; }

    /// Dense text form, e.g. "+XIZY" or "-iZZ".
    std::string str() const {
        std::string out = (phase_ & 2) ? "-" : "+";
        if (phase_ & 1) {
            out += 'i';
        }
        for (std::size_t q = 0; q < n_; ++q) {
            out += pauli_char(get(q));
        }
        return out;
    }

    /// Sparse text form "XXXX@[0,1,4,5]", prefixed by '-' when the sign is negative.
    std::string sparse_str() const {
        std::string letters;
        std::string idx;
        for (std::size_t q : support()) {
            letters += pauli_char(get(q));
            if (!idx.empty()) {
                idx += ',';
            }
            idx += std::to_string(q);
        }
        std::string prefix = (phase_ & 2) ? "-" : "";
        if (phase_ & 1) {
            prefix += 'i';
        }
        return prefix + letters + "@[" + idx + "]";
    }

    /// Inverse of sparse_str().
    static PauliOperator from_sparse_str(std::size_t n, std::string_view text) {
        int phase = 0;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            phase = text[pos] == '-' ? 2 : 0;
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i') {
            ++phase;
            ++pos;
        }
        const auto at = text.find('@', pos);
        if (at == std::string_view::npos || at + 2 > text.size() || text[at + 1] != '[' || text.back() != ']') {
            throw std::invalid_argument("malformed sparse Pauli: " + std::string(text));
        }
        const std::string_view letters = text.substr(pos, at - pos);
        std::vector<std::size_t> qubits;
        std::string_view list = text.substr(at + 2, text.size() - at - 3);
        while (!list.empty()) {
            const auto comma = list.find(',');
            const std::string_view tok = list.substr(0, comma);
            qubits.push_back(static_cast<std::size_t>(std::stoul(std::string(tok))));
            if (comma == std::string_view::npos) {
                break;
            }
            list.remove_prefix(comma + 1);
        }
        PauliOperator p = from_sparse(n, letters, qubits);
        p.set_phase(phase);
        return p;
    }

    /// Phase exponent contributed by multiplying (x1, z1) by (x2, z2) letter-wise.
    static int product_phase(std::span<const std::uint64_t> x1, std::span<const std::uint64_t> z1,
                             std::span<const std::uint64_t> x2, std::span<const std::uint64_t> z2) {
        int plus = 0;
        int minus = 0;
        for (std::size_t k = 0; k < x1.size(); ++k) {
            const std::uint64_t a_x = x1[k] & ~z1[k];
            const std::uint64_t a_y = x1[k] & z1[k];
            const std::uint64_t a_z = ~x1[k] & z1[k];
            const std::uint64_t b_x = x2[k] & ~z2[k];
            const std::uint64_t b_y = x2[k] & z2[k];
            const std::uint64_t b_z = ~x2[k] & z2[k];
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            plus += std::popcount((a_x & b_y) | (a_y & b_z) | (a_z & b_x));
            minus += std::popcount((a_y & b_x) | (a_z & b_y) | (a_x & b_z));
        }
        return ((plus - minus) % 4 + 4) % 4;
    }

   private:
    void check_qubit(std::size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("Pauli qubit index " + std::to_string(q) + " out of range");
        }
    }
    void check_same_size(const PauliOperator& other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("Pauli size mismatch");
        }
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> xs_;
    std::vector<std::uint64_t> zs_;
    std::uint8_t phase_ = 0;
};

}  // namespace topoff

#endif  // TOPOFF_PAULI_HPP
