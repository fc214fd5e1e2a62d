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

#ifndef TOPOFF_NOISE_HPP
#define TOPOFF_NOISE_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "topoff/pauli.hpp"
#include "topoff/rng.hpp"

namespace topoff {

/// Stochastic Pauli noise. Gate errors are inserted after the gate; readout
/// errors flip the recorded bit only; memory errors hit every qubit once per
/// two-qubit layer.
struct NoiseSpec {
    double p1 = 0;      // one-qubit gate error (uniform X/Y/Z)
    double p2 = 0;      // two-qubit gate error
    double z_bias = 0;  // fraction of two-qubit errors drawn from {IZ, ZI, ZZ}
    double p01 = 0;     // readout 0 -> 1
    double p10 = 0;     // readout 1 -> 0
    double mem = 0;     // per qubit per layer (uniform X/Y/Z)
    double spam = 0;    // aggregate SPAM infidelity used by the closed-form budget

    static NoiseSpec none() { return {}; }

    /// Device-like defaults.
    static NoiseSpec h1_1() { return {4e-5, 3e-3, 0.6, 1e-3, 5e-3, 3e-4, 4e-3}; }

    bool is_noiseless() const { return p1 == 0 && p2 == 0 && p01 == 0 && p10 == 0 && mem == 0; }

    void validate() const {
        for (auto [name, v] : {std::pair{"p1", p1}, {"p2", p2}, {"z_bias", z_bias}, {"p01", p01},
                               {"p10", p10}, {"mem", mem}, {"spam", spam}}) {
            if (!(v >= 0 && v <= 1)) {
                throw std::invalid_argument(std::string("noise parameter ") + name + " must lie in [0, 1]");
            }
        }
    }

    nlohmann::json to_json() const {
        return {{"p1", p1}, {"p2", p2}, {"z_bias", z_bias}, {"p01", p01}, {"p10", p10}, {"mem", mem}, {"spam", spam}};
    }

    /// Missing keys keep their zero default; unknown keys are rejected.
    static NoiseSpec from_json(const nlohmann::json& j) {
        if (!j.is_object()) {
            throw std::invalid_argument("noise spec must be a JSON object");
        }
        NoiseSpec s;
        for (const auto& [key, value] : j.items()) {
            if (key == "name" || key == "description") {
                continue;
            }
            if (!value.is_number()) {
                throw std::invalid_argument("noise parameter '" + key + "' must be a number");
            }
            const double v = value.get<double>();
            if (key == "p1") {
                s.p1 = v;
            } else if (key == "p2") {
                s.p2 = v;
            } else if (key == "z_bias") {
                s.z_bias = v;
            } else if (key == "p01") {
                s.p01 = v;
            } else if (key == "p10") {
                s.p10 = v;
            } else if (key == "mem") {
                s.mem = v;
            } else if (key == "spam") {
                s.spam = v;
            } else {
                throw std::invalid_argument("unknown noise parameter '" + key + "'");
            }
        }
        s.validate();
        return s;
    }

    /// Sets one field by name (used by parameter sweeps).
    void set(const std::string& key, double v) {
        nlohmann::json j = to_json();
        if (!j.contains(key)) {
            throw std::invalid_argument("unknown noise parameter '" + key + "'");
        }
        j[key] = v;
        *this = from_json(j);
    }
};

/// Uniformly random non-identity single-qubit Pauli.
inline Pauli1 random_pauli1(Rng& rng) { return static_cast<Pauli1>(1 + uniform_below(rng, 3)); }

/// Draws the error following a gate of the given arity, as an operator on the
/// gate's qubits (qubit 0 = first operand). Returns nullopt for no error.
inline std::optional<PauliOperator> sample_gate_error(const NoiseSpec& spec, int arity, Rng& rng) {
    if (arity == 1) {
        if (spec.p1 <= 0 || uniform01(rng) >= spec.p1) {
            return std::nullopt;
        }
        return PauliOperator::single(1, 0, random_pauli1(rng));
    }
    if (arity != 2) {
        throw std::invalid_argument("gate errors are defined for arity 1 or 2");
    }
    if (spec.p2 <= 0 || uniform01(rng) >= spec.p2) {
        return std::nullopt;
    }
    PauliOperator e(2);
    if (uniform01(rng) < spec.z_bias) {
        // IZ, ZI, ZZ
        const auto k = uniform_below(rng, 3);
        e.set(0, k != 0 ? Pauli1::Z : Pauli1::I);
        e.set(1, k != 1 ? Pauli1::Z : Pauli1::I);
    } else {
        // The 12 non-identity pairs containing an X or Y somewhere.
        static constexpr int kOthers[12][2] = {{0, 1}, {0, 3}, {1, 0}, {1, 1}, {1, 2}, {1, 3},
                                                {2, 1}, {2, 3}, {3, 0}, {3, 1}, {3, 2}, {3, 3}};
        const auto k = uniform_below(rng, 12);
        e.set(0, static_cast<Pauli1>(kOthers[k][0]));
        e.set(1, static_cast<Pauli1>(kOthers[k][1]));
    }
    return e;
}

/// Classical readout channel: 0 -> 1 with p01, 1 -> 0 with p10.
inline bool apply_readout_flip(const NoiseSpec& spec, bool bit, Rng& rng) {
    const double p = bit ? spec.p10 : spec.p01;
    if (p > 0 && uniform01(rng) < p) {
        return !bit;
    }
    return bit;
}

/// Closed-form global damping factor: the probability that no error of any kind occurs.
inline double error_budget(double n_2q, double n_1q, double depth, double n_qubits, double n_spam,
                           const NoiseSpec& spec) {
    if (n_2q < 0 || n_1q < 0 || depth < 0 || n_qubits < 0 || n_spam < 0) {
        throw std::invalid_argument("error budget inputs must be nonnegative");
    }
    return std::pow(1 - spec.p2, n_2q) * std::pow(1 - spec.p1, n_1q) * std::pow(1 - spec.mem, depth * n_qubits) *
           std::pow(1 - spec.spam, n_spam);
}

}  // namespace topoff

#endif  // TOPOFF_NOISE_HPP
