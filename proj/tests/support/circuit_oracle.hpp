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

// Dense-statevector interpretation of circuit gates with their true rotation
// angles, independent of the stabilizer rewrites used by the interpreter.

#ifndef TOPOFF_TESTS_CIRCUIT_ORACLE_HPP
#define TOPOFF_TESTS_CIRCUIT_ORACLE_HPP

#include <complex>
#include <numbers>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "support/statevector.hpp"
#include "topoff/circuit.hpp"

namespace topoff::testing {

inline void apply_dense(StateVector& sv, const Instruction& in) {
    const double quarter = std::numbers::pi / 2;
    const std::size_t a = in.qubits[0];
    const std::size_t b = in.qubits[1];
    switch (in.gate) {
        case Gate::H: sv.h(a); break;
        case Gate::S: sv.s(a); break;
        case Gate::SDG: sv.sdg(a); break;
        case Gate::X: sv.x(a); break;
        case Gate::Y: sv.y(a); break;
        case Gate::Z: sv.z(a); break;
        case Gate::CX: sv.cx(a, b); break;
        case Gate::CZ: sv.cz(a, b); break;
        case Gate::SWAP: sv.swap(a, b); break;
        case Gate::U1Q: sv.u1q(a, in.theta * quarter, in.phi * quarter); break;
        case Gate::RZ: sv.rz(a, in.theta * quarter); break;
        case Gate::RZZ: sv.rzz(a, b, in.theta * quarter); break;
    }
}

/// Applies every (unconditional) gate of a measurement-free circuit.
inline void apply_dense(StateVector& sv, const Circuit& c) {
    for (const auto& in : c.instructions) {
        if (in.kind != Instruction::Kind::Gate) {
            throw std::invalid_argument("dense oracle handles unitary circuits only");
        }
        apply_dense(sv, in);
    }
}

/// Follows one measurement branch of a circuit densely: measurements are
/// projected onto the recorded bits, resets must be deterministic and
/// conditions read the recorded bits. Returns the branch probability.
inline double run_dense_branch(StateVector& sv, const Circuit& c, const std::vector<std::uint8_t>& clbits) {
    double prob = 1.0;
    const std::size_t n = sv.num_qubits();
    for (const auto& in : c.instructions) {
        const auto zq = PauliOperator::single(n, in.qubits[0], Pauli1::Z);
        switch (in.kind) {
            case Instruction::Kind::Gate:
                apply_dense(sv, in);
                break;
            case Instruction::Kind::Measure: {
                const int outcome = clbits.at(in.clbit) ? -1 : 1;
                const double p_plus = sv.prob_plus(zq);
                prob *= outcome > 0 ? p_plus : 1 - p_plus;
                sv.project(zq, outcome);
                break;
            }
            case Instruction::Kind::Reset: {
                const double p_plus = sv.prob_plus(zq);
                if (p_plus > 1e-12 && p_plus < 1 - 1e-12) {
                    throw std::invalid_argument("dense branch: reset of an unmeasured qubit");
                }
                if (p_plus < 0.5) {
                    sv.x(in.qubits[0]);
                }
                break;
            }
            case Instruction::Kind::CondGate:
                if (in.cond.holds(clbits)) {
                    apply_dense(sv, in);
                }
                break;
        }
    }
    return prob;
}

/// |<a|b>| == 1 within tolerance, i.e. equal up to global phase.
inline bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol = 1e-9) {
    std::complex<double> overlap = 0;
    for (std::size_t i = 0; i < a.amplitudes().size(); ++i) {
        overlap += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    }
    return std::abs(std::abs(overlap) - 1.0) < tol;
}

/// Unitaries agree up to one global phase: compare images of all basis states
/// and of their uniform superposition (which pins the relative phases).
inline bool same_unitary_up_to_phase(const Circuit& x, const Circuit& y, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    std::complex<double> ref_phase = 0;
    for (std::size_t col = 0; col <= dim; ++col) {
        StateVector sx(n);
        StateVector sy(n);
        for (auto* s : {&sx, &sy}) {
            auto amp = s->amplitudes();
            std::fill(amp.begin(), amp.end(), 0.0);
            if (col < dim) {
                amp[col] = 1.0;
            } else {
                std::fill(amp.begin(), amp.end(), 1.0 / std::sqrt(static_cast<double>(dim)));
            }
        }
        apply_dense(sx, x);
        apply_dense(sy, y);
        std::complex<double> overlap = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            overlap += std::conj(sx.amplitudes()[i]) * sy.amplitudes()[i];
        }
        if (std::abs(std::abs(overlap) - 1.0) > 1e-9) {
            return false;
        }
        if (col == 0) {
            ref_phase = overlap;
        } else if (std::abs(overlap - ref_phase) > 1e-9) {
            return false;
        }
    }
    return true;
}

}  // namespace topoff::testing

#endif  // TOPOFF_TESTS_CIRCUIT_ORACLE_HPP
