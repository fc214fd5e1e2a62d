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

#include "topoff/circuit.hpp"

#include <random>

#include "gtest/gtest.h"
#include "support/circuit_oracle.hpp"
#include "support/random_clifford.hpp"
#include "support/statevector.hpp"

using namespace topoff;
using topoff::testing::StateVector;

namespace {

Circuit random_unitary_circuit(std::size_t n, int len, std::mt19937_64& rng, bool native_too) {
    Circuit c(n, 0);
    const int kinds = native_too ? 12 : 9;
    for (int k = 0; k < len; ++k) {
        const auto g = static_cast<Gate>(rng() % kinds);
        const std::size_t a = rng() % n;
        const std::size_t b = (a + 1 + rng() % (n - 1)) % n;
        c.gate(g, a, b, static_cast<int>(rng() % 4), static_cast<int>(rng() % 4));
    }
    return c;
}

}  // namespace

TEST(Circuit, feed_forward_example) {
    Circuit c(2, 1);
    c.x(0).measure(0, 0).if_xor({0}, 1, Gate::X, 1);
    Rng rng(1);
    const auto r = execute(c, rng);
    EXPECT_EQ(r.clbits[0], 1);
    EXPECT_EQ(r.state.expect(PauliOperator::from_string("+IZ")), -1);
}

TEST(Circuit, condition_on_unwritten_bit_rejected) {
    Circuit c(1, 2);
    c.measure(0, 0).if_xor({0, 1}, 1, Gate::Z, 0);
    EXPECT_THROW(c.validate(), std::invalid_argument);
    Rng rng(1);
    EXPECT_THROW(execute(c, rng), std::logic_error);
    Circuit bad(1, 1);
    bad.measure(0, 0).if_xor({0}, 1, Gate::H, 0);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Circuit, same_seed_same_transcript) {
    Circuit c(4, 4);
    for (std::size_t q = 0; q < 4; ++q) {
        c.h(q);
    }
    c.cx(0, 1).cz(2, 3);
    for (std::size_t q = 0; q < 4; ++q) {
        c.measure(q, q);
    }
    const NoiseSpec noise = NoiseSpec::h1_1();
    for (std::uint64_t shot = 0; shot < 20; ++shot) {
        Rng r1 = shot_rng(9, shot);
        Rng r2 = shot_rng(9, shot);
        EXPECT_EQ(execute(c, r1, &noise).clbits, execute(c, r2, &noise).clbits);
    }
}

TEST(Circuit, interpreter_matches_hand_applied_gates) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Circuit c = random_unitary_circuit(5, 40, rng, true);
        StabilizerTableau hand(5);
        for (const auto& in : c.instructions) {
            detail::apply_gate(hand, in);
        }
        Rng r(0);
        EXPECT_TRUE(states_equal(execute(c, r).state, hand));
    }
}

TEST(Circuit, native_gates_match_dense_rotations) {
    // Each quarter-turn native gate, interpreted by stabilizer rewrites, must
    // act like the true rotation on random stabilizer states.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        StabilizerTableau tab(3);
        StateVector sv(3);
        Rng sim(trial);
        ASSERT_TRUE(topoff::testing::run_lock_step(tab, sv, 15, rng, sim).ok);
        Instruction in;
        in.gate = static_cast<Gate>(9 + rng() % 3);
        in.qubits = {static_cast<std::uint32_t>(rng() % 3), 0};
        in.qubits[1] = (in.qubits[0] + 1 + static_cast<std::uint32_t>(rng() % 2)) % 3;
        in.theta = static_cast<std::uint8_t>(rng() % 4);
        in.phi = static_cast<std::uint8_t>(rng() % 4);
        detail::apply_gate(tab, in);
        topoff::testing::apply_dense(sv, in);
        ASSERT_TRUE(topoff::testing::expectations_agree(tab, sv, 40, rng))
            << gate_name(in.gate) << " theta=" << int(in.theta) << " phi=" << int(in.phi);
    }
}

TEST(Circuit, native_rewrites_are_unitarily_exact) {
    for (int g = 0; g < 9; ++g) {
        Circuit c(2, 0);
        c.gate(static_cast<Gate>(g), 0, 1);
        const auto [native, counts] = compile_to_native(c);
        for (const auto& in : native.instructions) {
            EXPECT_TRUE(gate_is_native(in.gate));
        }
        EXPECT_TRUE(topoff::testing::same_unitary_up_to_phase(c, native, 2)) << gate_name(static_cast<Gate>(g));
        EXPECT_EQ(counts.n_2q, g == 8 ? 3u : (g >= 6 ? 1u : 0u));
    }
}

TEST(Circuit, compiled_random_circuits_preserve_outcome_distribution) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const Circuit c = random_unitary_circuit(4, 30, rng, false);
        const Circuit native = compile_to_native(c).first;
        StateVector a(4);
        StateVector b(4);
        topoff::testing::apply_dense(a, c);
        topoff::testing::apply_dense(b, native);
        for (std::size_t i = 0; i < 16; ++i) {
            EXPECT_NEAR(std::norm(a.amplitudes()[i]), std::norm(b.amplitudes()[i]), 1e-12);
        }
        EXPECT_TRUE(topoff::testing::equal_up_to_phase(a, b));
        // The stabilizer interpreter agrees on the compiled circuit as well.
        Rng r1(0);
        Rng r2(0);
        EXPECT_TRUE(states_equal(execute(c, r1).state, execute(native, r2).state));
    }
}

TEST(Circuit, text_round_trip) {
    Circuit c(3, 3);
    c.h(0).cz(0, 2).u1q(1, 1, 3).rz(2, 3).rzz(0, 1, 1).measure(2, 1).reset(2);
    c.if_xor({1}, 1, Gate::Z, 0).if_eq({1, 1}, 3, Gate::X, 2);
    const std::string text = serialize(c);
    EXPECT_EQ(parse_circuit(text), c);
    EXPECT_EQ(serialize(parse_circuit(text)), text);
    EXPECT_NE(text.find("u1q(pi/2,3pi/2) q1"), std::string::npos);
    EXPECT_NE(text.find("ifxor c1 == 1 : z q0"), std::string::npos);
}

TEST(Circuit, parse_grammar_and_errors) {
    const Circuit c = parse_circuit("qubits 1\nclbits 1\n# comment\nmeasure q0 -> c0\nifxor c0 == 1 : z q0\n");
    ASSERT_EQ(c.instructions.size(), 2u);
    const auto& in = c.instructions[1];
    EXPECT_EQ(in.kind, Instruction::Kind::CondGate);
    EXPECT_EQ(in.cond.clbits, (std::vector<std::uint32_t>{0}));
    EXPECT_EQ(in.cond.value, 1u);
    EXPECT_EQ(parse_circuit("qubits 1\nclbits 0\nrz(-pi/2) q0\n").instructions[0].theta, 3);

    auto line_of = [](const char* text) {
        try {
            parse_circuit(text);
        } catch (const CircuitParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    EXPECT_EQ(line_of("qubits 1\nclbits 0\nh q0\nqq q0\n"), 4u);
    EXPECT_EQ(line_of("qubits 1\nclbits 0\nrz(pi/3) q0\n"), 3u);
    EXPECT_EQ(line_of("qubits 2\nclbits 1\n\nifxor c0 == 1 : z q0\n"), 4u);
    EXPECT_EQ(line_of("qubits 2\nclbits 1\ncx q1 q1\n"), 3u);
    EXPECT_EQ(line_of("h q0\n"), 1u);
}

TEST(Circuit, parity_expansion_preserves_semantics) {
    Circuit c(2, 3);
    c.h(0).measure(0, 0).h(0).measure(0, 1).h(0).measure(0, 2);
    c.if_xor({0, 1, 2}, 1, Gate::X, 1);
    const Circuit e = expand_parity_conditions(c);
    EXPECT_EQ(e.instructions.size(), c.instructions.size() + 3);
    for (std::uint64_t shot = 0; shot < 64; ++shot) {
        Rng r1 = shot_rng(2, shot);
        Rng r2 = shot_rng(2, shot);
        const auto a = execute(c, r1);
        const auto b = execute(e, r2);
        EXPECT_EQ(a.clbits, b.clbits);
        EXPECT_TRUE(states_equal(a.state, b.state));
    }
}

TEST(Circuit, depth_counts_two_qubit_layers) {
    Circuit c(4, 0);
    c.cx(0, 1).cx(2, 3).h(1).cx(1, 2).cz(0, 3);
    const auto counts = c.counts();
    EXPECT_EQ(counts.n_2q, 4u);
    EXPECT_EQ(counts.n_1q, 1u);
    EXPECT_EQ(counts.depth, 2u);
}

TEST(Circuit, noise_free_spec_is_exactly_noiseless) {
    Circuit c(2, 2);
    c.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
    const NoiseSpec none = NoiseSpec::none();
    for (std::uint64_t shot = 0; shot < 50; ++shot) {
        Rng r = shot_rng(4, shot);
        const auto res = execute(compile_to_native(c).first, r, &none);
        EXPECT_EQ(res.clbits[0], res.clbits[1]);
        EXPECT_EQ(res.injected_errors, 0u);
    }
}
