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

#ifndef TOPOFF_CIRCUIT_HPP
#define TOPOFF_CIRCUIT_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topoff/noise.hpp"
#include "topoff/tableau.hpp"

namespace topoff {

/// Gate set: stabilizer gates plus the native U1q/Rz/RZZ family. Native angles
/// are multiples of pi/2 and are stored as quarter turns (0..3).
enum class Gate : std::uint8_t { H, S, SDG, X, Y, Z, CX, CZ, SWAP, U1Q, RZ, RZZ };

inline constexpr std::array<std::string_view, 12> kGateNames{"h", "s", "sdg", "x",    "y",   "z",
                                                             "cx", "cz", "swap", "u1q", "rz", "rzz"};

inline std::string_view gate_name(Gate g) { return kGateNames[static_cast<std::size_t>(g)]; }

inline int gate_arity(Gate g) { return (g == Gate::CX || g == Gate::CZ || g == Gate::SWAP || g == Gate::RZZ) ? 2 : 1; }

inline bool gate_is_native(Gate g) { return g == Gate::U1Q || g == Gate::RZ || g == Gate::RZZ; }

/// Classical condition on previously written bits.
///   Xor: parity of the listed bits equals `value` (0 or 1).
///   Eq:  the listed bits, read as an unsigned integer with the first listed bit
///        least significant, equal `value` (a whole-register comparison).
struct Condition {
    enum class Kind : std::uint8_t { Xor, Eq };
    Kind kind = Kind::Xor;
    std::vector<std::uint32_t> clbits;
    std::uint64_t value = 0;

    bool holds(const std::vector<std::uint8_t>& bits) const {
        if (kind == Kind::Xor) {
            std::uint64_t parity = 0;
            for (auto c : clbits) {
                parity ^= bits[c];
            }
            return parity == value;
        }
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < clbits.size(); ++k) {
            v |= std::uint64_t{bits[clbits[k]]} << k;
        }
        return v == value;
    }

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Instruction {
    enum class Kind : std::uint8_t { Gate, Measure, Reset, CondGate };
    Kind kind = Kind::Gate;
    Gate gate = Gate::H;
    std::array<std::uint32_t, 2> qubits{0, 0};
    std::uint32_t clbit = 0;  // Measure target
    std::uint8_t theta = 0;   // quarter turns (U1Q, RZ, RZZ)
    std::uint8_t phi = 0;     // quarter turns (U1Q)
    Condition cond;           // CondGate only

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Native-gate tallies. depth counts layers of two-qubit gates scheduled as
/// early as qubit availability allows.
struct NativeGateCounts {
    std::size_t n_1q = 0;
    std::size_t n_2q = 0;
    std::size_t depth = 0;
};

class Circuit {
   public:
    Circuit() = default;
    Circuit(std::size_t n_qubits, std::size_t n_clbits) : num_qubits(n_qubits), num_clbits(n_clbits) {}

    std::size_t num_qubits = 0;
    std::size_t num_clbits = 0;
    std::vector<Instruction> instructions;

    // ---- builders --------------------------------------------------------

    Circuit& gate(Gate g, std::size_t a, std::size_t b = 0, int theta = 0, int phi = 0) {
        Instruction in;
        in.kind = Instruction::Kind::Gate;
        in.gate = g;
        in.qubits = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(gate_arity(g) == 2 ? b : 0)};
        in.theta = static_cast<std::uint8_t>(((theta % 4) + 4) % 4);
        in.phi = static_cast<std::uint8_t>(((phi % 4) + 4) % 4);
        return push(in);
    }
    Circuit& h(std::size_t q) { return gate(Gate::H, q); }
    Circuit& s(std::size_t q) { return gate(Gate::S, q); }
    Circuit& sdg(std::size_t q) { return gate(Gate::SDG, q); }
    Circuit& x(std::size_t q) { return gate(Gate::X, q); }
    Circuit& y(std::size_t q) { return gate(Gate::Y, q); }
    Circuit& z(std::size_t q) { return gate(Gate::Z, q); }
    Circuit& cx(std::size_t c, std::size_t t) { return gate(Gate::CX, c, t); }
    Circuit& cz(std::size_t a, std::size_t b) { return gate(Gate::CZ, a, b); }
    Circuit& swap(std::size_t a, std::size_t b) { return gate(Gate::SWAP, a, b); }
    Circuit& u1q(std::size_t q, int theta, int phi) { return gate(Gate::U1Q, q, 0, theta, phi); }
    Circuit& rz(std::size_t q, int theta) { return gate(Gate::RZ, q, 0, theta); }
    Circuit& rzz(std::size_t a, std::size_t b, int theta) { return gate(Gate::RZZ, a, b, theta); }

    /// Single-qubit Pauli by letter; identity is a no-op.
    Circuit& pauli(std::size_t q, Pauli1 p) {
        switch (p) {
            case Pauli1::X:
                return x(q);
            case Pauli1::Y:
                return y(q);
            case Pauli1::Z:
                return z(q);
            default:
                return *this;
        }
    }

    Circuit& measure(std::size_t q, std::size_t c) {
        Instruction in;
        in.kind = Instruction::Kind::Measure;
        in.qubits = {static_cast<std::uint32_t>(q), 0};
        in.clbit = static_cast<std::uint32_t>(c);
        return push(in);
    }

    Circuit& reset(std::size_t q) {
        Instruction in;
        in.kind = Instruction::Kind::Reset;
        in.qubits = {static_cast<std::uint32_t>(q), 0};
        return push(in);
    }

    Circuit& conditional(Condition cond, Gate g, std::size_t q, int theta = 0, int phi = 0) {
        Instruction in;
        in.kind = Instruction::Kind::CondGate;
        in.gate = g;
        in.qubits = {static_cast<std::uint32_t>(q), 0};
        in.theta = static_cast<std::uint8_t>(((theta % 4) + 4) % 4);
        in.phi = static_cast<std::uint8_t>(((phi % 4) + 4) % 4);
        in.cond = std::move(cond);
        return push(in);
    }

    Circuit& if_xor(std::vector<std::uint32_t> clbits, int parity, Gate g, std::size_t q) {
        return conditional({Condition::Kind::Xor, std::move(clbits), static_cast<std::uint64_t>(parity)}, g, q);
    }

    Circuit& if_eq(std::vector<std::uint32_t> clbits, std::uint64_t value, Gate g, std::size_t q) {
        return conditional({Condition::Kind::Eq, std::move(clbits), value}, g, q);
    }

    /// Appends another circuit acting on the same (or fewer) qubits and clbits.
    Circuit& append(const Circuit& other) {
        if (other.num_qubits > num_qubits || other.num_clbits > num_clbits) {
            throw std::invalid_argument("append: circuit does not fit");
        }
        instructions.insert(instructions.end(), other.instructions.begin(), other.instructions.end());
        return *this;
    }

    // ---- analysis ---------------------------------------------------------

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const {
        if (auto v = first_violation()) {
            throw std::invalid_argument("instruction " + std::to_string(v->first) + ": " + v->second);
        }
    }

    /// Index and description of the first invalid instruction, if any.
    std::optional<std::pair<std::size_t, std::string>> first_violation() const {
        std::vector<bool> written(num_clbits, false);
        for (std::size_t i = 0; i < instructions.size(); ++i) {
            const auto& in = instructions[i];
            auto fail = [i](std::string why) { return std::optional{std::pair{i, std::move(why)}}; };
            const int arity = (in.kind == Instruction::Kind::Gate || in.kind == Instruction::Kind::CondGate)
                                  ? gate_arity(in.gate)
                                  : 1;
            for (int k = 0; k < arity; ++k) {
                if (in.qubits[k] >= num_qubits) {
                    return fail("qubit index out of range");
                }
            }
            if (arity == 2 && in.qubits[0] == in.qubits[1]) {
                return fail("two-qubit gate on a repeated qubit");
            }
            if (in.kind == Instruction::Kind::Measure) {
                if (in.clbit >= num_clbits) {
                    return fail("clbit index out of range");
                }
                written[in.clbit] = true;
            }
            if (in.kind == Instruction::Kind::CondGate) {
                if (arity != 1 || !is_pauli_action(in)) {
                    return fail("conditional gates must be single-qubit Paulis");
                }
                for (auto c : in.cond.clbits) {
                    if (c >= num_clbits || !written[c]) {
                        return fail("condition reads clbit c" + std::to_string(c) + " before it is written");
                    }
                }
                if (in.cond.kind == Condition::Kind::Xor && in.cond.value > 1) {
                    return fail("parity condition value must be 0 or 1");
                }
            }
        }
        return std::nullopt;
    }

    /// Two-qubit layer index (1-based) of every instruction, 0 for everything else.
    std::vector<std::size_t> two_qubit_layers() const {
        std::vector<std::size_t> avail(num_qubits, 0);
        std::vector<std::size_t> out(instructions.size(), 0);
        for (std::size_t i = 0; i < instructions.size(); ++i) {
            const auto& in = instructions[i];
            if (in.kind == Instruction::Kind::Gate && gate_arity(in.gate) == 2) {
                const std::size_t layer = std::max(avail[in.qubits[0]], avail[in.qubits[1]]) + 1;
                avail[in.qubits[0]] = avail[in.qubits[1]] = layer;
                out[i] = layer;
            }
        }
        return out;
    }

    NativeGateCounts counts() const {
        NativeGateCounts c;
        for (const auto& in : instructions) {
            if (in.kind == Instruction::Kind::Gate || in.kind == Instruction::Kind::CondGate) {
                (gate_arity(in.gate) == 2 ? c.n_2q : c.n_1q)++;
            }
        }
        const auto layers = two_qubit_layers();
        c.depth = layers.empty() ? 0 : *std::max_element(layers.begin(), layers.end());
        return c;
    }

    /// True for instructions whose gate acts as a Pauli (up to global phase).
    static bool is_pauli_action(const Instruction& in) {
        switch (in.gate) {
            case Gate::X:
            case Gate::Y:
            case Gate::Z:
                return true;
            case Gate::RZ:
            case Gate::U1Q:
                return in.theta == 2 || in.theta == 0;
            default:
                return false;
        }
    }

    friend bool operator==(const Circuit&, const Circuit&) = default;

   private:
    Circuit& push(const Instruction& in) {
        instructions.push_back(in);
        return *this;
    }
};

// ---- interpretation -------------------------------------------------------

namespace detail {

/// Rotation by theta quarter turns about cos(phi) X + sin(phi) Y, as stabilizer gates.
inline void apply_u1q(StabilizerTableau& t, std::size_t q, int theta, int phi) {
    theta &= 3;
    phi &= 3;
    if (theta == 0) {
        return;
    }
    if (theta == 2) {
        (phi & 1) ? t.y(q) : t.x(q);
        return;
    }
    if (theta == 3) {
        phi = (phi + 2) & 3;
    }
    switch (phi) {
        case 0:  // R_X(pi/2)
            t.h(q);
            t.s(q);
            t.h(q);
            break;
        case 1:  // R_Y(pi/2) ~ H Z
            t.z(q);
            t.h(q);
            break;
        case 2:  // R_X(-pi/2)
            t.h(q);
            t.sdg(q);
            t.h(q);
            break;
        default:  // R_Y(-pi/2) ~ Z H
            t.h(q);
            t.z(q);
    }
}

inline void apply_rz(StabilizerTableau& t, std::size_t q, int theta) {
    switch (theta & 3) {
        case 1:
            t.s(q);
            break;
        case 2:
            t.z(q);
            break;
        case 3:
            t.sdg(q);
            break;
        default:
            break;
    }
}

inline void apply_rzz(StabilizerTableau& t, std::size_t a, std::size_t b, int theta) {
    switch (theta & 3) {
        case 1:  // CZ (S x S)
            t.s(a);
            t.s(b);
            t.cz(a, b);
            break;
        case 2:
            t.z(a);
            t.z(b);
            break;
        case 3:
            t.sdg(a);
            t.sdg(b);
            t.cz(a, b);
            break;
        default:
            break;
    }
}

inline void apply_gate(StabilizerTableau& t, const Instruction& in) {
    const std::size_t a = in.qubits[0];
    const std::size_t b = in.qubits[1];
    switch (in.gate) {
        case Gate::H:
            t.h(a);
            break;
        case Gate::S:
            t.s(a);
            break;
        case Gate::SDG:
            t.sdg(a);
            break;
        case Gate::X:
            t.x(a);
            break;
        case Gate::Y:
            t.y(a);
            break;
        case Gate::Z:
            t.z(a);
            break;
        case Gate::CX:
            t.cx(a, b);
            break;
        case Gate::CZ:
            t.cz(a, b);
            break;
        case Gate::SWAP:
            t.swap(a, b);
            break;
        case Gate::U1Q:
            apply_u1q(t, a, in.theta, in.phi);
            break;
        case Gate::RZ:
            apply_rz(t, a, in.theta);
            break;
        case Gate::RZZ:
            apply_rzz(t, a, b, in.theta);
            break;
    }
}

inline void apply_letter(StabilizerTableau& t, std::size_t q, Pauli1 p) {
    switch (p) {
        case Pauli1::X:
            t.x(q);
            break;
        case Pauli1::Y:
            t.y(q);
            break;
        case Pauli1::Z:
            t.z(q);
            break;
        default:
            break;
    }
}

}  // namespace detail

struct ExecutionResult {
    StabilizerTableau state;
    std::vector<std::uint8_t> clbits;  // recorded (possibly readout-flipped) bits
    std::size_t injected_errors = 0;
};

/// Runs the circuit on `state` (which may be wider than the circuit). With a
/// noise spec, gate errors follow each gate, readout flips hit recorded bits and
/// memory errors hit every qubit whenever a new two-qubit layer begins.
inline ExecutionResult execute(const Circuit& circuit, StabilizerTableau state, Rng& rng,
                               const NoiseSpec* noise = nullptr) {
    if (state.num_qubits() < circuit.num_qubits) {
        throw std::invalid_argument("execute: state has fewer qubits than the circuit");
    }
    ExecutionResult res{std::move(state), std::vector<std::uint8_t>(circuit.num_clbits, 0), 0};
    std::vector<bool> written(circuit.num_clbits, false);
    const bool noisy = noise != nullptr && !noise->is_noiseless();
    std::vector<std::size_t> layers;
    std::size_t current_layer = 0;
    if (noisy && noise->mem > 0) {
        layers = circuit.two_qubit_layers();
    }
    auto& st = res.state;
    auto gate_noise = [&](const Instruction& in) {
        if (!noisy) {
            return;
        }
        const int arity = gate_arity(in.gate);
        if (auto e = sample_gate_error(*noise, arity, rng)) {
            ++res.injected_errors;
            for (int k = 0; k < arity; ++k) {
                detail::apply_letter(st, in.qubits[k], e->get(static_cast<std::size_t>(k)));
            }
        }
    };
    for (std::size_t i = 0; i < circuit.instructions.size(); ++i) {
        const auto& in = circuit.instructions[i];
        switch (in.kind) {
            case Instruction::Kind::Gate:
                if (!layers.empty() && layers[i] > current_layer) {
                    for (; current_layer < layers[i]; ++current_layer) {
                        for (std::size_t q = 0; q < circuit.num_qubits; ++q) {
                            if (uniform01(rng) < noise->mem) {
                                ++res.injected_errors;
                                detail::apply_letter(st, q, random_pauli1(rng));
                            }
                        }
                    }
                }
                detail::apply_gate(st, in);
                gate_noise(in);
                break;
            case Instruction::Kind::Measure: {
                bool bit = st.measure_z(in.qubits[0], rng);
                if (noisy) {
                    bit = apply_readout_flip(*noise, bit, rng);
                }
                res.clbits[in.clbit] = bit;
                written[in.clbit] = true;
                break;
            }
            case Instruction::Kind::Reset:
                st.reset(in.qubits[0], rng);
                break;
            case Instruction::Kind::CondGate:
                for (auto c : in.cond.clbits) {
                    if (c >= written.size() || !written[c]) {
                        throw std::logic_error("condition reads unwritten clbit c" + std::to_string(c));
                    }
                }
                if (in.cond.holds(res.clbits)) {
                    detail::apply_gate(st, in);
                    gate_noise(in);
                }
                break;
        }
    }
    return res;
}

inline ExecutionResult execute(const Circuit& circuit, Rng& rng, const NoiseSpec* noise = nullptr) {
    return execute(circuit, StabilizerTableau(circuit.num_qubits), rng, noise);
}

// ---- native compilation ---------------------------------------------------

/// Rewrites every gate into U1q / Rz / RZZ:
///   CZ   -> RZZ(pi/2), Rz(-pi/2) on both qubits
///   CX   -> H_t CZ H_t
///   H    -> Rz(pi), U1q(pi/2, pi/2)
///   S, Sdg, Z -> Rz(pi/2), Rz(-pi/2), Rz(pi);  X, Y -> U1q(pi, 0), U1q(pi, pi/2)
///   SWAP -> three CX
/// Conditional Paulis become conditional native Paulis.
inline std::pair<Circuit, NativeGateCounts> compile_to_native(const Circuit& circuit) {
    Circuit out(circuit.num_qubits, circuit.num_clbits);
    auto native_h = [&](std::size_t q) {
        out.rz(q, 2);
        out.u1q(q, 1, 1);
    };
    auto native_cz = [&](std::size_t a, std::size_t b) {
        out.rzz(a, b, 1);
        out.rz(a, 3);
        out.rz(b, 3);
    };
    auto native_cx = [&](std::size_t c, std::size_t t) {
        native_h(t);
        native_cz(c, t);
        native_h(t);
    };
    for (const auto& in : circuit.instructions) {
        const std::size_t a = in.qubits[0];
        const std::size_t b = in.qubits[1];
        if (in.kind == Instruction::Kind::Measure || in.kind == Instruction::Kind::Reset) {
            out.instructions.push_back(in);
            continue;
        }
        if (in.kind == Instruction::Kind::CondGate) {
            switch (in.gate) {
                case Gate::X:
                    out.conditional(in.cond, Gate::U1Q, a, 2, 0);
                    break;
                case Gate::Y:
                    out.conditional(in.cond, Gate::U1Q, a, 2, 1);
                    break;
                case Gate::Z:
                    out.conditional(in.cond, Gate::RZ, a, 2);
                    break;
                default:
                    out.instructions.push_back(in);
            }
            continue;
        }
        switch (in.gate) {
            case Gate::H:
                native_h(a);
                break;
            case Gate::S:
                out.rz(a, 1);
                break;
            case Gate::SDG:
                out.rz(a, 3);
                break;
            case Gate::Z:
                out.rz(a, 2);
                break;
            case Gate::X:
                out.u1q(a, 2, 0);
                break;
            case Gate::Y:
                out.u1q(a, 2, 1);
                break;
            case Gate::CZ:
                native_cz(a, b);
                break;
            case Gate::CX:
                native_cx(a, b);
                break;
            case Gate::SWAP:
                native_cx(a, b);
                native_cx(b, a);
                native_cx(a, b);
                break;
            case Gate::U1Q:
            case Gate::RZ:
            case Gate::RZZ:
                out.instructions.push_back(in);
                break;
        }
    }
    const NativeGateCounts counts = out.counts();
    return {std::move(out), counts};
}

/// Replaces every parity condition by one whole-register equality test per
/// satisfying register value, the only conditional form older QASM dialects allow.
inline Circuit expand_parity_conditions(const Circuit& circuit) {
    Circuit out(circuit.num_qubits, circuit.num_clbits);
    for (const auto& in : circuit.instructions) {
        if (in.kind != Instruction::Kind::CondGate || in.cond.kind != Condition::Kind::Xor) {
            out.instructions.push_back(in);
            continue;
        }
        const std::size_t k = in.cond.clbits.size();
        if (k > 20) {
            throw std::invalid_argument("parity condition too wide to expand");
        }
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); ++v) {
            if (static_cast<std::uint64_t>(std::popcount(v) & 1) == in.cond.value) {
                Instruction e = in;
                e.cond = {Condition::Kind::Eq, in.cond.clbits, v};
                out.instructions.push_back(std::move(e));
            }
        }
    }
    return out;
}

inline double error_budget(const NativeGateCounts& counts, std::size_t n_qubits, std::size_t n_spam,
                           const NoiseSpec& spec) {
    return error_budget(static_cast<double>(counts.n_2q), static_cast<double>(counts.n_1q),
                        static_cast<double>(counts.depth), static_cast<double>(n_qubits), static_cast<double>(n_spam),
                        spec);
}

// ---- text format ----------------------------------------------------------

class CircuitParseError : public std::runtime_error {
   public:
    CircuitParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

   private:
    std::size_t line_;
};

namespace detail {

inline std::string angle_str(int quarter) {
    static constexpr std::array<std::string_view, 4> kAngles{"0", "pi/2", "pi", "3pi/2"};
    return std::string(kAngles[static_cast<std::size_t>(quarter & 3)]);
}

inline int parse_angle(std::string_view s) {
    std::string t(s);
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    bool neg = false;
    if (!t.empty() && t[0] == '-') {
        neg = true;
        t.erase(0, 1);
    }
    int q;
    if (t == "0") {
        q = 0;
    } else if (t == "pi/2") {
        q = 1;
    } else if (t == "pi") {
        q = 2;
    } else if (t == "3pi/2") {
        q = 3;
    } else {
        throw std::invalid_argument("angle must be a multiple of pi/2: '" + std::string(s) + "'");
    }
    return neg ? (4 - q) & 3 : q;
}

inline std::string gate_str(const Instruction& in) {
    std::string s(gate_name(in.gate));
    if (in.gate == Gate::U1Q) {
        s += "(" + angle_str(in.theta) + "," + angle_str(in.phi) + ")";
    } else if (in.gate == Gate::RZ || in.gate == Gate::RZZ) {
        s += "(" + angle_str(in.theta) + ")";
    }
    s += " q" + std::to_string(in.qubits[0]);
    if (gate_arity(in.gate) == 2) {
        s += " q" + std::to_string(in.qubits[1]);
    }
    return s;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

inline std::uint32_t parse_index(const std::string& tok, char prefix) {
    if (tok.size() < 2 || tok[0] != prefix ||
        !std::all_of(tok.begin() + 1, tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument(std::string("expected ") + prefix + "<index>, got '" + tok + "'");
    }
    return static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
}

/// Parses "name(args) qA [qB]" into an instruction skeleton.
inline Instruction parse_gate(std::string_view text) {
    const auto toks = split_ws(text);
    if (toks.empty()) {
        throw std::invalid_argument("missing gate");
    }
    std::string head = toks[0];
    std::vector<std::string> args;
    if (const auto open = head.find('('); open != std::string::npos) {
        if (head.back() != ')') {
            throw std::invalid_argument("unterminated angle list");
        }
        std::string inner = head.substr(open + 1, head.size() - open - 2);
        head = head.substr(0, open);
        std::size_t start = 0;
        while (true) {
            const auto comma = inner.find(',', start);
            args.push_back(inner.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
    }
    const auto it = std::find(kGateNames.begin(), kGateNames.end(), head);
    if (it == kGateNames.end()) {
        throw std::invalid_argument("unknown mnemonic '" + head + "'");
    }
    Instruction in;
    in.gate = static_cast<Gate>(it - kGateNames.begin());
    const std::size_t want_args = in.gate == Gate::U1Q ? 2 : (in.gate == Gate::RZ || in.gate == Gate::RZZ) ? 1 : 0;
    if (args.size() != want_args) {
        throw std::invalid_argument("gate '" + head + "' takes " + std::to_string(want_args) + " angle(s)");
    }
    if (want_args >= 1) {
        in.theta = static_cast<std::uint8_t>(parse_angle(args[0]));
    }
    if (want_args == 2) {
        in.phi = static_cast<std::uint8_t>(parse_angle(args[1]));
    }
    const std::size_t arity = static_cast<std::size_t>(gate_arity(in.gate));
    if (toks.size() != 1 + arity) {
        throw std::invalid_argument("gate '" + head + "' takes " + std::to_string(arity) + " qubit(s)");
    }
    for (std::size_t k = 0; k < arity; ++k) {
        in.qubits[k] = parse_index(toks[1 + k], 'q');
    }
    return in;
}

}  // namespace detail

/// Line-based text form; see docs/formats.md.
inline std::string serialize(const Circuit& c) {
    std::string out = "qubits " + std::to_string(c.num_qubits) + "\nclbits " + std::to_string(c.num_clbits) + "\n";
    for (const auto& in : c.instructions) {
        switch (in.kind) {
            case Instruction::Kind::Gate:
                out += detail::gate_str(in);
                break;
            case Instruction::Kind::Measure:
                out += "measure q" + std::to_string(in.qubits[0]) + " -> c" + std::to_string(in.clbit);
                break;
            case Instruction::Kind::Reset:
                out += "reset q" + std::to_string(in.qubits[0]);
                break;
            case Instruction::Kind::CondGate:
                out += in.cond.kind == Condition::Kind::Xor ? "ifxor" : "ifeq";
                for (auto b : in.cond.clbits) {
                    out += " c" + std::to_string(b);
                }
                out += " == " + std::to_string(in.cond.value) + " : " + detail::gate_str(in);
                break;
        }
        out += '\n';
    }
    return out;
}

inline Circuit parse_circuit(std::string_view text) {
    Circuit c;
    std::vector<std::size_t> line_of;  // source line of each instruction
    bool have_qubits = false;
    bool have_clbits = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto toks = detail::split_ws(line);
        if (toks.empty()) {
            continue;
        }
        try {
            if (toks[0] == "qubits" || toks[0] == "clbits") {
                if (toks.size() != 2 || !c.instructions.empty()) {
                    throw std::invalid_argument("'" + toks[0] + " <count>' must precede all instructions");
                }
                const std::size_t v = std::stoul(toks[1]);
                (toks[0] == "qubits" ? c.num_qubits : c.num_clbits) = v;
                (toks[0] == "qubits" ? have_qubits : have_clbits) = true;
            } else if (!have_qubits || !have_clbits) {
                throw std::invalid_argument("'qubits' and 'clbits' headers must come first");
            } else if (toks[0] == "measure") {
                if (toks.size() != 4 || toks[2] != "->") {
                    throw std::invalid_argument("expected 'measure qA -> cB'");
                }
                c.measure(detail::parse_index(toks[1], 'q'), detail::parse_index(toks[3], 'c'));
            } else if (toks[0] == "reset") {
                if (toks.size() != 2) {
                    throw std::invalid_argument("expected 'reset qA'");
                }
                c.reset(detail::parse_index(toks[1], 'q'));
            } else if (toks[0] == "ifxor" || toks[0] == "ifeq") {
                const auto colon = line.find(':');
                if (colon == std::string_view::npos) {
                    throw std::invalid_argument("conditional needs ': <gate>'");
                }
                const auto head = detail::split_ws(line.substr(0, colon));
                if (head.size() < 4 || head[head.size() - 2] != "==") {
                    throw std::invalid_argument("expected '" + toks[0] + " cA [cB ...] == V : <gate>'");
                }
                Condition cond;
                cond.kind = toks[0] == "ifxor" ? Condition::Kind::Xor : Condition::Kind::Eq;
                for (std::size_t k = 1; k + 2 < head.size(); ++k) {
                    cond.clbits.push_back(detail::parse_index(head[k], 'c'));
                }
                cond.value = std::stoull(head.back());
                Instruction in = detail::parse_gate(line.substr(colon + 1));
                c.conditional(std::move(cond), in.gate, in.qubits[0], in.theta, in.phi);
            } else {
                Instruction in = detail::parse_gate(line);
                c.gate(in.gate, in.qubits[0], in.qubits[1], in.theta, in.phi);
            }
            line_of.resize(c.instructions.size(), line_no);
        } catch (const CircuitParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw CircuitParseError(line_no, e.what());
        }
    }
    if (!have_qubits || !have_clbits) {
        throw CircuitParseError(line_no, "missing 'qubits' or 'clbits' header");
    }
    if (auto v = c.first_violation()) {
        throw CircuitParseError(line_of[v->first], v->second);
    }
    return c;
}

}  // namespace topoff

#endif  // TOPOFF_CIRCUIT_HPP
