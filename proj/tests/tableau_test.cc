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

#include "topoff/tableau.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "support/random_clifford.hpp"
#include "support/statevector.hpp"

using namespace topoff;
using topoff::testing::StateVector;

namespace {

PauliOperator P(const char* s) { return PauliOperator::from_string(s); }

}  // namespace

TEST(StabilizerTableau, new_state_is_all_zero) {
    StabilizerTableau s3(3);
    EXPECT_EQ(s3.expect(P("+ZII")), 1);
    StabilizerTableau s1(1);
    EXPECT_EQ(s1.expect(P("+X")), 0);
    StabilizerTableau s16(16);
    for (std::size_t q = 0; q < 16; ++q) {
        EXPECT_EQ(s16.expect(PauliOperator::single(16, q, Pauli1::Z)), 1);
    }
    EXPECT_THROW(StabilizerTableau(0), std::invalid_argument);
    EXPECT_EQ(s16.validate(), "");
}

TEST(StabilizerTableau, single_gate_examples) {
    StabilizerTableau a(1);
    a.h(0);
    EXPECT_EQ(a.expect(P("+X")), 1);

    StabilizerTableau bell(2);
    bell.h(0);
    bell.cx(0, 1);
    EXPECT_EQ(bell.expect(P("+XX")), 1);
    EXPECT_EQ(bell.expect(P("+ZZ")), 1);
    EXPECT_EQ(bell.expect(P("+XZ")), 0);

    StabilizerTableau plus(1);
    plus.h(0);
    plus.s(0);
    EXPECT_EQ(plus.expect(P("+Y")), 1);

    EXPECT_THROW(bell.cx(1, 1), std::invalid_argument);
    EXPECT_THROW(bell.cz(0, 2), std::out_of_range);
}

TEST(StabilizerTableau, measurement_examples) {
    Rng rng(1);
    StabilizerTableau s(1);
    EXPECT_EQ(s.measure(P("+Z"), rng), 1);
    EXPECT_EQ(s.expect(P("+Z")), 1);

    int plus = 0;
    for (int shot = 0; shot < 1000; ++shot) {
        StabilizerTableau t(1);
        Rng r = shot_rng(42, static_cast<std::uint64_t>(shot));
        plus += t.measure(P("+X"), r) > 0;
    }
    EXPECT_NEAR(plus / 1000.0, 0.5, 0.05);

    StabilizerTableau four(4);
    const int first = four.measure(P("+XXXX"), rng);
    EXPECT_EQ(four.measure(P("+XXXX"), rng), first);
    EXPECT_EQ(four.expect(P("+XXXX")), first);
    EXPECT_EQ(four.validate(), "");

    EXPECT_THROW(four.measure(P("iXXXX"), rng), std::invalid_argument);
}

TEST(StabilizerTableau, negative_observable_eigenvalue) {
    Rng rng(3);
    StabilizerTableau s(2);
    // -Z0 has eigenvalue -1 on |00>.
    EXPECT_EQ(s.measure(P("-ZI"), rng), -1);
    const int m = s.measure(P("-XX"), rng);
    EXPECT_EQ(s.expect(P("-XX")), m);
    EXPECT_EQ(s.expect(P("+XX")), -m);
}

TEST(StabilizerTableau, deterministic_measurement_consumes_no_randomness) {
    StabilizerTableau s(5);
    s.h(0);
    s.cx(0, 1);
    s.cx(1, 2);
    Rng rng(99);
    Rng reference = rng;
    EXPECT_EQ(s.measure(P("+XXXII"), rng), 1);
    EXPECT_EQ(s.measure(P("-ZZIII"), rng), -1);
    EXPECT_EQ(s.measure(P("+IIIZZ"), rng), 1);
    EXPECT_EQ(rng(), reference());
}

TEST(StabilizerTableau, bell_and_product_entropies) {
    StabilizerTableau bell(2);
    bell.h(0);
    bell.cx(0, 1);
    const std::size_t half[] = {0};
    EXPECT_DOUBLE_EQ(bell.renyi2(half), std::numbers::ln2);
    EXPECT_DOUBLE_EQ(bell.renyi2(std::span<const std::size_t>{}), 0.0);

    StabilizerTableau product(4);
    product.h(1);
    product.s(2);
    const std::size_t sub[] = {1, 2};
    EXPECT_DOUBLE_EQ(product.renyi2(sub), 0.0);
}

TEST(StabilizerTableau, states_equal_examples) {
    StabilizerTableau a(2);
    a.h(0);
    a.cx(0, 1);
    EXPECT_TRUE(states_equal(a, a));

    StabilizerTableau hh(1);
    hh.h(0);
    hh.h(0);
    EXPECT_TRUE(states_equal(hh, StabilizerTableau(1)));

    StabilizerTableau minus = a;
    minus.z(0);
    EXPECT_FALSE(states_equal(a, minus));
    EXPECT_THROW((void)states_equal(a, StabilizerTableau(3)), std::invalid_argument);
}

TEST(StabilizerTableau, states_equal_ignores_generator_choice) {
    // Same GHZ state reached by different gate orders.
    StabilizerTableau a(3);
    a.h(0);
    a.cx(0, 1);
    a.cx(1, 2);
    StabilizerTableau b(3);
    b.h(2);
    b.cx(2, 0);
    b.cx(0, 1);
    EXPECT_TRUE(states_equal(a, b));
}

TEST(StabilizerTableau, random_circuits_match_statevector) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        StabilizerTableau tab(n);
        StateVector sv(n);
        Rng sim = shot_rng(7, static_cast<std::uint64_t>(trial));
        const auto res = topoff::testing::run_lock_step(tab, sv, 40, rng, sim);
        ASSERT_TRUE(res.ok) << res.message;
        ASSERT_EQ(tab.validate(), "");
        ASSERT_TRUE(topoff::testing::expectations_agree(tab, sv, 30, rng));
    }
}

TEST(StabilizerTableau, renyi2_matches_statevector_purity) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        StabilizerTableau tab(n);
        StateVector sv(n);
        Rng sim(trial);
        ASSERT_TRUE(topoff::testing::run_lock_step(tab, sv, 30, rng, sim).ok);
        std::vector<std::size_t> subset;
        for (std::size_t q = 0; q < n; ++q) {
            if (rng() & 1) {
                subset.push_back(q);
            }
        }
        EXPECT_NEAR(tab.renyi2(subset), -std::log(sv.purity(subset)), 1e-9);
    }
}

TEST(StabilizerTableau, renyi2_complement_symmetry) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 20;
        StabilizerTableau tab(n);
        StateVector unused(1);
        for (int k = 0; k < 60; ++k) {
            const std::size_t a = rng() % n;
            std::size_t b = (a + 1 + rng() % (n - 1)) % n;
            switch (rng() % 3) {
                case 0: tab.h(a); break;
                case 1: tab.s(a); break;
                default: tab.cx(a, b);
            }
        }
        std::vector<std::size_t> a_set;
        std::vector<std::size_t> b_set;
        for (std::size_t q = 0; q < n; ++q) {
            ((rng() & 1) ? a_set : b_set).push_back(q);
        }
        EXPECT_DOUBLE_EQ(tab.renyi2(a_set), tab.renyi2(b_set));
    }
}

TEST(StabilizerTableau, reset_returns_to_zero) {
    Rng rng(4);
    StabilizerTableau s(2);
    s.h(0);
    s.cx(0, 1);
    s.reset(0, rng);
    EXPECT_EQ(s.expect(P("+ZI")), 1);
    EXPECT_EQ(s.validate(), "");
}
