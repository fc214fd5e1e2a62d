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

// Dense statevector reference simulator used as an independent oracle in tests.
// Qubit q is bit q of the basis-state index.

#ifndef TOPOFF_TESTS_STATEVECTOR_HPP
#define TOPOFF_TESTS_STATEVECTOR_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "topoff/pauli.hpp"

namespace topoff::testing {

using cd = std::complex<double>;

class StateVector {
   public:
    explicit StateVector(std::size_t n) : n_(n), amp_(std::size_t{1} << n, 0.0) { amp_[0] = 1.0; }

    std::size_t num_qubits() const { return n_; }
    std::span<const cd> amplitudes() const { return amp_; }
    std::span<cd> amplitudes() { return amp_; }

    void apply1(std::size_t q, const cd m[2][2]) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) {
                continue;
            }
            const cd a0 = amp_[i];
            const cd a1 = amp_[i | bit];
            amp_[i] = m[0][0] * a0 + m[0][1] * a1;
            amp_[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    void h(std::size_t q) {
        const double r = 1.0 / std::sqrt(2.0);
        const cd m[2][2] = {{r, r}, {r, -r}};
        apply1(q, m);
    }
    void s(std::size_t q) {
        const cd m[2][2] = {{1.0, 0.0}, {0.0, cd(0, 1)}};
        apply1(q, m);
    }
    void sdg(std::size_t q) {
        const cd m[2][2] = {{1.0, 0.0}, {0.0, cd(0, -1)}};
        apply1(q, m);
    }
    void x(std::size_t q) {
        const cd m[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
        apply1(q, m);
    }
    void y(std::size_t q) {
        const cd m[2][2] = {{0.0, cd(0, -1)}, {cd(0, 1), 0.0}};
        apply1(q, m);
    }
    void z(std::size_t q) {
        const cd m[2][2] = {{1.0, 0.0}, {0.0, -1.0}};
        apply1(q, m);
    }
    /// exp(-i (cos φ X + sin φ Y) θ / 2)
    void u1q(std::size_t q, double theta, double phi) {
        const double c = std::cos(theta / 2);
        const double s = std::sin(theta / 2);
        const cd e_m = std::polar(1.0, -phi);
        const cd e_p = std::polar(1.0, phi);
        const cd m[2][2] = {{c, cd(0, -1) * s * e_m}, {cd(0, -1) * s * e_p, c}};
        apply1(q, m);
    }
    /// exp(-i Z λ / 2)
    void rz(std::size_t q, double lambda) {
        const cd m[2][2] = {{std::polar(1.0, -lambda / 2), 0.0}, {0.0, std::polar(1.0, lambda / 2)}};
        apply1(q, m);
    }
    void cx(std::size_t c, std::size_t t) {
        const std::size_t bc = std::size_t{1} << c;
        const std::size_t bt = std::size_t{1} << t;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & bc) && !(i & bt)) {
                std::swap(amp_[i], amp_[i | bt]);
            }
        }
    }
    void cz(std::size_t a, std::size_t b) {
        const std::size_t m = (std::size_t{1} << a) | (std::size_t{1} << b);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & m) == m) {
                amp_[i] = -amp_[i];
            }
        }
    }
    void swap(std::size_t a, std::size_t b) {
        cx(a, b);
        cx(b, a);
        cx(a, b);
    }
    /// exp(-i θ/2 Z⊗Z)
    void rzz(std::size_t a, std::size_t b, double theta) {
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            const bool pa = (i >> a) & 1;
            const bool pb = (i >> b) & 1;
            amp_[i] *= std::polar(1.0, (pa == pb) ? -theta / 2 : theta / 2);
        }
    }

    /// Returns P|psi> for a Pauli operator (including its phase).
    std::vector<cd> apply_pauli_copy(const PauliOperator& p) const {
        std::vector<cd> out(amp_.size());
        std::size_t xmask = 0;
        std::size_t zmask = 0;
        int ys = 0;
        for (std::size_t q = 0; q < n_; ++q) {
            if (p.x(q)) {
                xmask |= std::size_t{1} << q;
            }
            if (p.z(q)) {
                zmask |= std::size_t{1} << q;
            }
            if (p.x(q) && p.z(q)) {
                ++ys;
            }
        }
        // Y = i X Z, so P = i^{phase + #Y} X^x Z^z.
        const int k = (p.phase() + ys) & 3;
        const cd pre = k == 0 ? cd(1, 0) : k == 1 ? cd(0, 1) : k == 2 ? cd(-1, 0) : cd(0, -1);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            const double zsign = (std::popcount(i & zmask) & 1) ? -1.0 : 1.0;
            out[i ^ xmask] = pre * zsign * amp_[i];
        }
        return out;
    }

    double expect(const PauliOperator& p) const {
        const auto pv = apply_pauli_copy(p);
        cd acc = 0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            acc += std::conj(amp_[i]) * pv[i];
        }
        return acc.real();
    }

    /// Probability that measuring Hermitian p yields +1.
    double prob_plus(const PauliOperator& p) const { return 0.5 * (1.0 + expect(p)); }

    /// Projects onto the outcome eigenspace of p and renormalises.
    void project(const PauliOperator& p, int outcome) {
        const auto pv = apply_pauli_copy(p);
        double norm = 0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            amp_[i] = 0.5 * (amp_[i] + static_cast<double>(outcome) * pv[i]);
            norm += std::norm(amp_[i]);
        }
        if (norm < 1e-14) {
            throw std::domain_error("projection onto zero-probability branch");
        }
        const double inv = 1.0 / std::sqrt(norm);
        for (auto& a : amp_) {
            a *= inv;
        }
    }

    /// Tr(rho_A^2) of the reduced state on subset A.
    double purity(std::span<const std::size_t> subset) const {
        std::size_t amask = 0;
        for (std::size_t q : subset) {
            amask |= std::size_t{1} << q;
        }
        const std::size_t dim_a = std::size_t{1} << subset.size();
        auto a_index = [&](std::size_t i) {
            std::size_t k = 0;
            for (std::size_t j = 0; j < subset.size(); ++j) {
                k |= ((i >> subset[j]) & 1) << j;
            }
            return k;
        };
        std::vector<cd> rho(dim_a * dim_a, 0.0);
        // rho_A[a, a'] = sum_b psi[a b] conj(psi[a' b]); group by complement bits.
        std::vector<std::vector<std::pair<std::size_t, cd>>> by_b(std::size_t{1} << (n_ - subset.size()));
        auto b_index = [&](std::size_t i) {
            std::size_t k = 0;
            std::size_t j = 0;
            for (std::size_t q = 0; q < n_; ++q) {
                if (!(amask >> q & 1)) {
                    k |= ((i >> q) & 1) << j;
                    ++j;
                }
            }
            return k;
        };
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (std::norm(amp_[i]) > 0) {
                by_b[b_index(i)].push_back({a_index(i), amp_[i]});
            }
        }
        for (const auto& group : by_b) {
            for (const auto& [a1, v1] : group) {
                for (const auto& [a2, v2] : group) {
                    rho[a1 * dim_a + a2] += v1 * std::conj(v2);
                }
            }
        }
        double tr = 0;
        for (const auto& v : rho) {
            tr += std::norm(v);
        }
        return tr;
    }

   private:
    std::size_t n_;
    std::vector<cd> amp_;
};

}  // namespace topoff::testing

#endif  // TOPOFF_TESTS_STATEVECTOR_HPP
