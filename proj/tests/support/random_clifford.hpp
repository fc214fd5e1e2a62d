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

// Random Clifford + measurement circuits applied in lock step to the tableau
// simulator and the dense statevector oracle.

#ifndef TOPOFF_TESTS_RANDOM_CLIFFORD_HPP
#define TOPOFF_TESTS_RANDOM_CLIFFORD_HPP

#include <cmath>
#include <random>
#include <string>

#include "support/statevector.hpp"
#include "topoff/tableau.hpp"

namespace topoff::testing {

inline PauliOperator random_hermitian_pauli(std::size_t n, std::mt19937_64& rng, bool allow_identity = false) {
    PauliOperator p(n);
    do {
        for (std::size_t q = 0; q < n; ++q) {
            p.set(q, static_cast<Pauli1>(rng() % 4));
        }
    } while (!allow_identity && p.is_identity_up_to_phase());
    p.set_phase((rng() & 1) ? 2 : 0);
    return p;
}

struct LockStepResult {
    bool ok = true;
    std::string message;
    int deterministic_checks = 0;
};

/// Applies `steps` random operations (gates or Pauli measurements) to both
/// simulators. Measurements are sampled by the tableau and the statevector is
/// projected onto the same branch after checking the branch probability.
inline LockStepResult run_lock_step(StabilizerTableau& tab, StateVector& sv, int steps, std::mt19937_64& rng,
                                    Rng& sim_rng) {
    LockStepResult res;
    const std::size_t n = tab.num_qubits();
    auto fail = [&](const std::string& m) {
        res.ok = false;
        res.message = m;
    };
    for (int step = 0; step < steps && res.ok; ++step) {
        const int kind = static_cast<int>(rng() % 11);
        const std::size_t a = rng() % n;
        std::size_t b = rng() % n;
        if (n > 1) {
            while (b == a) {
                b = rng() % n;
            }
        }
        switch (kind) {
            case 0: tab.h(a); sv.h(a); break;
            case 1: tab.s(a); sv.s(a); break;
            case 2: tab.sdg(a); sv.sdg(a); break;
            case 3: tab.x(a); sv.x(a); break;
            case 4: tab.y(a); sv.y(a); break;
            case 5: tab.z(a); sv.z(a); break;
            case 6: if (n > 1) { tab.cx(a, b); sv.cx(a, b); } break;
            case 7: if (n > 1) { tab.cz(a, b); sv.cz(a, b); } break;
            case 8: if (n > 1) { tab.swap(a, b); sv.swap(a, b); } break;
            default: {
                const PauliOperator p = random_hermitian_pauli(n, rng);
                const double p_plus = sv.prob_plus(p);
                const int e = tab.expect(p);
                if (std::abs(static_cast<double>(e) - (2 * p_plus - 1)) > 1e-9) {
                    fail("expectation mismatch for " + p.str());
                    break;
                }
                const int outcome = tab.measure(p, sim_rng);
                if (e != 0) {
                    ++res.deterministic_checks;
                    if (outcome != e) {
                        fail("deterministic outcome mismatch for " + p.str());
                        break;
                    }
                } else if (std::abs(p_plus - 0.5) > 1e-9) {
                    fail("random measurement without probability 1/2");
                    break;
                }
                sv.project(p, outcome);
            }
        }
    }
    return res;
}

/// Compares every one of `probes` random Pauli expectations between the two simulators.
inline bool expectations_agree(const StabilizerTableau& tab, const StateVector& sv, int probes,
                               std::mt19937_64& rng) {
    for (int k = 0; k < probes; ++k) {
        const PauliOperator p = random_hermitian_pauli(tab.num_qubits(), rng);
        if (std::abs(tab.expect(p) - sv.expect(p)) > 1e-9) {
            return false;
        }
    }
    return true;
}

}  // namespace topoff::testing

#endif  // TOPOFF_TESTS_RANDOM_CLIFFORD_HPP
