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

#ifndef TOPOFF_CLIFFORD1Q_HPP
#define TOPOFF_CLIFFORD1Q_HPP

#include <array>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "topoff/tableau.hpp"

namespace topoff {

/// One element of the 24-element single-qubit Clifford group (modulo phase),
/// written as a shortest H/S word applied left to right.
struct Clifford1 {
    std::string gates;
    /// The Pauli effectively measured when this Clifford is followed by a Z measurement: C^† Z C.
    Pauli1 basis;
    /// Sign of C^† Z C; a -1 means bit 0 corresponds to the -1 eigenstate of `basis`.
    int sign;
};

namespace detail {

inline void apply_word(StabilizerTableau& t, std::size_t q, const std::string& word) {
    for (char g : word) {
        g == 'H' ? t.h(q) : t.s(q);
    }
}

inline std::pair<int, int> signed_letter(const PauliOperator& p) {
    return {static_cast<int>(p.get(0)), p.sign()};
}

inline std::vector<Clifford1> enumerate_clifford1() {
    std::vector<Clifford1> out;
    std::vector<std::array<int, 4>> seen;
    std::deque<std::string> queue{""};
    while (!queue.empty()) {
        std::string word = std::move(queue.front());
        queue.pop_front();
        // Images of X and Z (C X C^†, C Z C^†) identify the element.
        StabilizerTableau tx(1);
        tx.h(0);
        apply_word(tx, 0, word);
        StabilizerTableau tz(1);
        apply_word(tz, 0, word);
        const auto [xl, xs] = signed_letter(tx.stabilizer(0));
        const auto [zl, zs] = signed_letter(tz.stabilizer(0));
        const std::array<int, 4> key{xl, xs, zl, zs};
        bool known = false;
        for (const auto& k : seen) {
            known |= k == key;
        }
        if (known) {
            continue;
        }
        seen.push_back(key);
        // C^† Z C is the stabilizer of C^†|0>.
        StabilizerTableau inv(1);
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
            *it == 'H' ? inv.h(0) : inv.sdg(0);
        }
        const PauliOperator b = inv.stabilizer(0);
        out.push_back({word, b.get(0), b.sign()});
        queue.push_back(word + "H");
        queue.push_back(word + "S");
    }
    return out;
}

}  // namespace detail

inline const std::vector<Clifford1>& clifford1_table() {
    static const std::vector<Clifford1> table = detail::enumerate_clifford1();
    return table;
}

inline const Clifford1& clifford1(std::size_t index) {
    const auto& t = clifford1_table();
    if (index >= t.size()) {
        throw std::out_of_range("single-qubit Clifford index must be in 0..23");
    }
    return t[index];
}

/// Applies Clifford `index` to qubit q.
inline void apply_clifford1(StabilizerTableau& state, std::size_t q, std::size_t index) {
    detail::apply_word(state, q, clifford1(index).gates);
}

}  // namespace topoff

#endif  // TOPOFF_CLIFFORD1Q_HPP
