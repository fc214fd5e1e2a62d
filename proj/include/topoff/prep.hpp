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

// Ground-state preparation by one round of plaquette checks, a lookup-table
// decoder and conditioned Z corrections. Odd-parity syndromes are heralded.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "topoff/circuit.hpp"
#include "topoff/estimators.hpp"
#include "topoff/lattice.hpp"
#include "topoff/noise.hpp"
#include "topoff/rng.hpp"
#include "topoff/tableau.hpp"

namespace topoff {

enum class CheckMethod { Ancilla, AncillaFreeModified, AncillaFree, AllAncillaReuse, Inferred };
enum class DecoderKind { LookupQasm2, LookupOptimized, InferredParity };

inline const char* method_name(CheckMethod m) {
    switch (m) {
        case CheckMethod::Ancilla:
            return "ancilla";
        case CheckMethod::AncillaFreeModified:
            return "ancilla_free_modified";
        case CheckMethod::AncillaFree:
            return "ancilla_free";
        case CheckMethod::AllAncillaReuse:
            return "all_ancilla_reuse";
        case CheckMethod::Inferred:
            return "inferred";
    }
    return "?";
}

inline CheckMethod method_from_name(const std::string& s) {
    for (auto m : {CheckMethod::Ancilla, CheckMethod::AncillaFreeModified, CheckMethod::AncillaFree,
                   CheckMethod::AllAncillaReuse, CheckMethod::Inferred}) {
        if (s == method_name(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown plaquette method '" + s + "'");
}

inline const char* decoder_name(DecoderKind d) {
    switch (d) {
        case DecoderKind::LookupQasm2:
            return "lookup_qasm2";
        case DecoderKind::LookupOptimized:
            return "lookup_optimized";
        case DecoderKind::InferredParity:
            return "inferred_parity";
    }
    return "?";
}

inline DecoderKind decoder_from_name(const std::string& s) {
    for (auto d : {DecoderKind::LookupQasm2, DecoderKind::LookupOptimized, DecoderKind::InferredParity}) {
        if (s == decoder_name(d)) {
            return d;
        }
    }
    throw std::invalid_argument("unknown decoder '" + s + "'");
}

/// Plaquettes that the preparation has to project: everything that is not Z-type.
inline std::vector<int> check_labels(const Lattice& lat) {
    std::vector<int> out;
    for (const auto& p : lat.plaquettes) {
        if (p.kind != PlaquetteKind::Z) {
            out.push_back(p.label);
        }
    }
    return out;
}

struct PrepStrategy {
    std::map<int, CheckMethod> methods;
    DecoderKind decoder = DecoderKind::LookupOptimized;

    /// Empty string if consistent with the lattice, else the first problem found.
    std::string validate(const Lattice& lat) const {
        const auto labels = check_labels(lat);
        for (int l : labels) {
            if (!methods.count(l)) {
                return "no method for plaquette " + std::to_string(l);
            }
        }
        int inferred = 0;
        for (const auto& [l, m] : methods) {
            if (std::find(labels.begin(), labels.end(), l) == labels.end()) {
                return "plaquette " + std::to_string(l) + " is not a checked plaquette";
            }
            inferred += m == CheckMethod::Inferred;
        }
        if (inferred > 1) {
            return "at most one plaquette may be inferred";
        }
        if (decoder == DecoderKind::InferredParity && inferred == 0) {
            return "inferred_parity decoder needs an inferred plaquette";
        }
        return {};
    }

    std::optional<int> inferred() const {
        for (const auto& [l, m] : methods) {
            if (m == CheckMethod::Inferred) {
                return l;
            }
        }
        return std::nullopt;
    }

    nlohmann::json to_json() const {
        nlohmann::json pm = nlohmann::json::object();
        for (const auto& [l, m] : methods) {
            pm[std::to_string(l)] = method_name(m);
        }
        return {{"plaquette_methods", pm}, {"decoder", decoder_name(decoder)}};
    }
};

/// Torus: ancillas on 1, 3, 9, 11 and modified ancilla-free checks on 4, 6, 12, 14.
/// Defect lattice: ancillas on 1, 3, 4 and both defects, modified checks on 10, 11, 13.
inline PrepStrategy default_strategy(const Lattice& lat) {
    PrepStrategy s;
    const std::set<int> free_labels = lat.is_torus() ? std::set<int>{4, 6, 12, 14} : std::set<int>{10, 11, 13};
    for (int l : check_labels(lat)) {
        s.methods[l] = free_labels.count(l) ? CheckMethod::AncillaFreeModified : CheckMethod::Ancilla;
    }
    return s;
}

/// Every checked plaquette through a pool of four reused ancillas.
inline PrepStrategy all_ancilla_reuse_strategy(const Lattice& lat) {
    PrepStrategy s;
    for (int l : check_labels(lat)) {
        s.methods[l] = CheckMethod::AllAncillaReuse;
    }
    return s;
}

/// `{"plaquette_methods": {"1": "ancilla", ...} | "<method for all>", "decoder": "..."}`.
/// Missing plaquettes keep the lattice default.
inline PrepStrategy strategy_from_json(const nlohmann::json& j, const Lattice& lat) {
    PrepStrategy s = default_strategy(lat);
    if (!j.is_object()) {
        throw std::invalid_argument("strategy must be a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "plaquette_methods") {
            if (v.is_string()) {
                for (auto& [l, m] : s.methods) {
                    m = method_from_name(v.get<std::string>());
                }
            } else if (v.is_object()) {
                for (const auto& [lk, lv] : v.items()) {
                    std::size_t used = 0;
                    const int label = std::stoi(lk, &used);
                    if (used != lk.size()) {
                        throw std::invalid_argument("bad plaquette label '" + lk + "'");
                    }
                    s.methods[label] = method_from_name(lv.get<std::string>());
                }
            } else {
                throw std::invalid_argument("plaquette_methods must be an object or a string");
            }
        } else if (key == "decoder") {
            s.decoder = decoder_from_name(v.get<std::string>());
        } else if (key != "name" && key != "description") {
            throw std::invalid_argument("unknown strategy key '" + key + "'");
        }
    }
    if (const auto err = s.validate(lat); !err.empty()) {
        throw std::invalid_argument(err);
    }
    return s;
}

// ---- check fragments --------------------------------------------------------

/// Ancilla-based check of a Hermitian plaquette operator: |+> ancilla,
/// one controlled letter per support qubit, H, measure. Bit 1 <-> outcome -1.
inline void build_parity_check_ancilla(Circuit& c, const PauliOperator& op, std::size_t ancilla, std::uint32_t clbit,
                                       bool reset_first = false) {
    if (op.sign() != 1) {
        throw std::invalid_argument("ancilla check needs a +1-signed Pauli");
    }
    if (ancilla < op.num_qubits() && op.get(ancilla) != Pauli1::I) {
        throw std::invalid_argument("ancilla overlaps the plaquette support");
    }
    c.num_qubits = std::max(c.num_qubits, std::max(ancilla + 1, op.num_qubits()));
    c.num_clbits = std::max<std::size_t>(c.num_clbits, clbit + 1);
    if (reset_first) {
        c.reset(ancilla);
    }
    c.h(ancilla);
    for (std::size_t q : op.support()) {
        switch (op.get(q)) {
            case Pauli1::X:
                c.cx(ancilla, q);
                break;
            case Pauli1::Z:
                c.cz(ancilla, q);
                break;
            case Pauli1::Y:
                c.sdg(q);
                c.cx(ancilla, q);
                c.s(q);
                break;
            case Pauli1::I:
                break;
        }
    }
    c.h(ancilla);
    c.measure(ancilla, clbit);
}

namespace detail {

/// Single-qubit rotation U with U P U^dag = X, applied forwards or backwards.
inline void to_x_frame(Circuit& c, std::size_t q, Pauli1 letter, bool forward) {
    if (letter == Pauli1::Z) {
        c.h(q);
    } else if (letter == Pauli1::Y) {
        forward ? c.sdg(q) : c.s(q);
    }
}

}  // namespace detail

/// Ancilla-free check through data qubit `target`: fold the plaquette onto the
/// target with CX gates, measure it in X, re-prepare it and unfold. The
/// unmodified variant restores the measured sign with a conditional Z; the
/// modified variant leaves the plaquette at +1, i.e. realizes Z_t (I - P)/2 on
/// the -1 branch and displaces the excitation to the plaquette Z_t also flips.
inline void build_parity_check_ancilla_free(Circuit& c, const PauliOperator& op, std::size_t target, bool modified,
                                            std::uint32_t clbit) {
    if (op.sign() != 1) {
        throw std::invalid_argument("ancilla-free check needs a +1-signed Pauli");
    }
    if (target >= op.num_qubits() || op.get(target) == Pauli1::I) {
        throw std::invalid_argument("target qubit outside the plaquette");
    }
    c.num_qubits = std::max(c.num_qubits, op.num_qubits());
    c.num_clbits = std::max<std::size_t>(c.num_clbits, clbit + 1);
    const auto support = op.support();
    for (std::size_t q : support) {
        detail::to_x_frame(c, q, op.get(q), true);
    }
    for (std::size_t q : support) {
        if (q != target) {
            c.cx(target, q);
        }
    }
    c.h(target);
    c.measure(target, clbit);
    c.reset(target);
    c.h(target);
    if (!modified) {
        c.if_xor({clbit}, 1, Gate::Z, target);
    }
    for (std::size_t q : support) {
        if (q != target) {
            c.cx(target, q);
        }
    }
    for (std::size_t q : support) {
        detail::to_x_frame(c, q, op.get(q), false);
    }
}

/// The Pauli that the modified check applies on its -1 branch.
inline PauliOperator modified_kick(const PauliOperator& op, std::size_t target) {
    return PauliOperator::single(op.num_qubits(), target, op.get(target) == Pauli1::Z ? Pauli1::X : Pauli1::Z);
}

/// Lowest support qubit whose kick flips exactly one other plaquette, which
/// must be in `sinks` (plaquettes whose syndrome is read afterwards).
inline std::size_t choose_modified_target(const Lattice& lat, int label, const std::set<int>& sinks) {
    const auto& op = lat.plaquette(label).op;
    for (std::size_t q : op.support()) {
        auto flipped = lat.flipped_by(modified_kick(op, q));
        std::erase(flipped, label);
        if (flipped.size() == 1 && sinks.count(flipped[0])) {
            return q;
        }
    }
    throw std::invalid_argument("no valid target for modified check on plaquette " + std::to_string(label));
}

// ---- decoder ----------------------------------------------------------------

/// Minimum-weight Z strings between pairs of checked plaquettes and the
/// lookup table built from them.
class LookupDecoder {
   public:
    explicit LookupDecoder(const Lattice& lat) : lat_(&lat) {
        const auto all = lat.labels();
        for (std::size_t k = 0; k < all.size(); ++k) {
            index_[all[k]] = k;
        }
        const std::size_t n = lat.num_qubits();
        std::vector<std::uint64_t> flips(n, 0);
        for (std::size_t q = 0; q < n; ++q) {
            for (int l : lat.flipped_by(PauliOperator::single(n, q, Pauli1::Z))) {
                flips[q] |= std::uint64_t{1} << index_.at(l);
            }
        }
        const auto checked = check_labels(lat);
        std::size_t wanted = checked.size() * (checked.size() - 1) / 2;
        // Enumerate Z strings by weight, lexicographically; the first string hitting a pair wins.
        for (std::size_t w = 1; w <= std::min<std::size_t>(n, 8) && wanted > 0; ++w) {
            std::vector<std::size_t> pick(w);
            for (std::size_t k = 0; k < w; ++k) {
                pick[k] = k;
            }
            while (true) {
                std::uint64_t m = 0;
                for (std::size_t q : pick) {
                    m ^= flips[q];
                }
                if (std::popcount(m) == 2) {
                    const int a = all[std::countr_zero(m)];
                    const int b = all[63 - std::countl_zero(m)];
                    if (!strings_.count({a, b})) {
                        strings_[{a, b}] = pick;
                        wanted -= std::count(checked.begin(), checked.end(), a) && std::count(checked.begin(), checked.end(), b);
                    }
                }
                std::size_t k = w;
                while (k > 0 && pick[k - 1] == n - w + k - 1) {
                    --k;
                }
                if (k == 0) {
                    break;
                }
                ++pick[k - 1];
                for (std::size_t j = k; j < w; ++j) {
                    pick[j] = pick[j - 1] + 1;
                }
            }
        }
        if (wanted > 0) {
            throw std::logic_error("decoder: some plaquette pairs are not connected by short Z strings");
        }
    }

    /// Z string flipping exactly plaquettes a and b.
    const std::vector<std::size_t>& pair_string(int a, int b) const {
        if (a > b) {
            std::swap(a, b);
        }
        auto it = strings_.find({a, b});
        if (it == strings_.end()) {
            throw std::invalid_argument("no correction string for plaquettes " + std::to_string(a) + ", " +
                                        std::to_string(b));
        }
        return it->second;
    }

    /// Correction for a set of -1 plaquettes: pairing of least total weight,
    /// ties going to the pairing that matches the smallest label first.
    std::vector<std::size_t> decode(const std::vector<int>& minus) const {
        if (minus.size() % 2) {
            throw std::invalid_argument("odd syndrome: shot must be heralded, not decoded");
        }
        std::vector<int> s = minus;
        std::sort(s.begin(), s.end());
        std::vector<std::pair<int, int>> best;
        std::size_t best_w = SIZE_MAX;
        std::vector<std::pair<int, int>> cur;
        std::vector<bool> used(s.size(), false);
        auto rec = [&](auto&& self, std::size_t w) -> void {
            std::size_t i = 0;
            while (i < s.size() && used[i]) {
                ++i;
            }
            if (i == s.size()) {
                if (w < best_w) {
                    best_w = w;
                    best = cur;
                }
                return;
            }
            used[i] = true;
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                if (!used[j]) {
                    used[j] = true;
                    cur.emplace_back(s[i], s[j]);
                    self(self, w + pair_string(s[i], s[j]).size());
                    cur.pop_back();
                    used[j] = false;
                }
            }
            used[i] = false;
        };
        rec(rec, 0);
        std::vector<int> parity(lat_->num_qubits(), 0);
        for (const auto& [a, b] : best) {
            for (std::size_t q : pair_string(a, b)) {
                parity[q] ^= 1;
            }
        }
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < parity.size(); ++q) {
            if (parity[q]) {
                out.push_back(q);
            }
        }
        return out;
    }

   private:
    const Lattice* lat_;
    std::map<int, std::size_t> index_;
    std::map<std::pair<int, int>, std::vector<std::size_t>> strings_;
};

struct Syndrome {
    std::vector<int> labels;         // plaquettes read into the syndrome
    std::vector<std::uint8_t> bits;  // 1 = outcome -1
    bool heralded = false;

    std::vector<int> minus() const {
        std::vector<int> out;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (bits[k]) {
                out.push_back(labels[k]);
            }
        }
        return out;
    }
};

/// Z corrections (qubit ids) for a non-heralded syndrome.
inline std::vector<std::size_t> decode_lookup(const Syndrome& s, const Lattice& lat) {
    if (s.heralded || s.minus().size() % 2) {
        throw std::invalid_argument("heralded syndrome cannot be decoded");
    }
    return LookupDecoder(lat).decode(s.minus());
}

// ---- preparation program --------------------------------------------------------

struct PrepProgram {
    Circuit circuit;  // gate-level; compile_to_native() gives the device circuit
    std::size_t n_data = 0;
    std::size_t n_ancilla = 0;
    PrepStrategy strategy;
    std::vector<int> check_order;              // measured plaquettes, in circuit order
    std::map<int, std::uint32_t> clbit_of;     // measured plaquette -> clbit
    std::map<int, std::size_t> target_of;      // ancilla-free plaquette -> data qubit
    std::map<int, std::size_t> ancilla_of;     // ancilla-measured plaquette -> ancilla qubit
    std::vector<int> syndrome_labels;          // measured plaquettes that feed the decoder
    std::optional<int> inferred;

    std::size_t num_qubits() const { return n_data + n_ancilla; }

    /// Syndrome from recorded clbits. An inferred plaquette takes the parity of the others.
    Syndrome syndrome(const std::vector<std::uint8_t>& clbits) const {
        Syndrome s;
        int parity = 0;
        for (int l : syndrome_labels) {
            s.labels.push_back(l);
            s.bits.push_back(clbits.at(clbit_of.at(l)));
            parity ^= s.bits.back();
        }
        if (inferred) {
            s.labels.push_back(*inferred);
            s.bits.push_back(static_cast<std::uint8_t>(parity));
        } else {
            s.heralded = parity != 0;
        }
        return s;
    }
};

inline PrepProgram build_prep_program(const Lattice& lat, const PrepStrategy& strategy) {
    if (const auto err = strategy.validate(lat); !err.empty()) {
        throw std::invalid_argument(err);
    }
    PrepProgram p;
    p.strategy = strategy;
    p.n_data = lat.num_qubits();
    p.inferred = strategy.inferred();
    std::vector<int> free_checks, dedicated, pooled;
    std::set<int> sinks;
    for (const auto& [l, m] : strategy.methods) {
        switch (m) {
            case CheckMethod::AncillaFreeModified:
            case CheckMethod::AncillaFree:
                free_checks.push_back(l);
                break;
            case CheckMethod::Ancilla:
                dedicated.push_back(l);
                break;
            case CheckMethod::AllAncillaReuse:
                pooled.push_back(l);
                break;
            case CheckMethod::Inferred:
                break;
        }
        if (m != CheckMethod::AncillaFreeModified) {
            sinks.insert(l);
        }
    }
    const std::size_t pool = std::min<std::size_t>(pooled.size(), 4);
    p.n_ancilla = dedicated.size() + pool;
    p.circuit = Circuit(p.num_qubits(), 0);
    std::uint32_t next_clbit = 0;

    // Phase 1: ancilla-free checks. Phase 2: ancilla checks, which also collect
    // the excitations displaced by the modified checks.
    for (int l : free_checks) {
        const bool modified = strategy.methods.at(l) == CheckMethod::AncillaFreeModified;
        const auto& op = lat.plaquette(l).op;
        const std::size_t t = modified ? choose_modified_target(lat, l, sinks) : op.support().front();
        p.target_of[l] = t;
        p.clbit_of[l] = next_clbit;
        p.check_order.push_back(l);
        build_parity_check_ancilla_free(p.circuit, op.widened(p.num_qubits()), t, modified, next_clbit++);
    }
    std::size_t anc = p.n_data;
    for (int l : dedicated) {
        p.ancilla_of[l] = anc;
        p.clbit_of[l] = next_clbit;
        p.check_order.push_back(l);
        build_parity_check_ancilla(p.circuit, lat.plaquette(l).op.widened(p.num_qubits()), anc++, next_clbit++);
    }
    for (std::size_t k = 0; k < pooled.size(); ++k) {
        const int l = pooled[k];
        p.ancilla_of[l] = anc + k % pool;
        p.clbit_of[l] = next_clbit;
        p.check_order.push_back(l);
        build_parity_check_ancilla(p.circuit, lat.plaquette(l).op.widened(p.num_qubits()), anc + k % pool,
                                   next_clbit++, k >= pool);
    }
    for (int l : p.check_order) {
        if (strategy.methods.at(l) != CheckMethod::AncillaFreeModified) {
            p.syndrome_labels.push_back(l);
        }
    }
    std::sort(p.syndrome_labels.begin(), p.syndrome_labels.end());

    // Feed-forward corrections.
    const LookupDecoder dec(lat);
    std::vector<int> full = p.syndrome_labels;
    if (p.inferred) {
        full.push_back(*p.inferred);
    }
    std::sort(full.begin(), full.end());
    if (full.size() < 2) {
        return p;
    }
    if (strategy.decoder == DecoderKind::LookupQasm2) {
        std::vector<std::uint32_t> cl;
        for (int l : p.syndrome_labels) {
            cl.push_back(p.clbit_of.at(l));
        }
        for (std::uint64_t pat = 1; pat < (std::uint64_t{1} << cl.size()); ++pat) {
            std::vector<int> minus;
            for (std::size_t k = 0; k < cl.size(); ++k) {
                if ((pat >> k) & 1) {
                    minus.push_back(p.syndrome_labels[k]);
                }
            }
            if (minus.size() % 2) {
                if (!p.inferred) {
                    continue;  // heralded
                }
                minus.push_back(*p.inferred);
            }
            for (std::size_t q : dec.decode(minus)) {
                p.circuit.if_eq(cl, pat, Gate::Z, q);
            }
        }
    } else {
        // Linear decoder: every -1 plaquette is paired with a fixed sink.
        const int sink = p.inferred ? *p.inferred : full.back();
        std::map<std::size_t, std::vector<std::uint32_t>> by_qubit;
        for (int l : p.syndrome_labels) {
            if (l == sink) {
                continue;
            }
            for (std::size_t q : dec.pair_string(l, sink)) {
                by_qubit[q].push_back(p.clbit_of.at(l));
            }
        }
        for (auto& [q, cl] : by_qubit) {
            std::sort(cl.begin(), cl.end());
            p.circuit.if_xor(cl, 1, Gate::Z, q);
        }
    }
    return p;
}

/// Noiseless target: all plaquettes and both logicals at +1, on `width` qubits.
inline StabilizerTableau reference_ground_state(const Lattice& lat, std::size_t width = 0) {
    StabilizerTableau t(std::max(width, lat.num_qubits()));
    for (const auto& p : lat.plaquettes) {
        t.measure_forced(p.op.widened(t.num_qubits()), 1);
    }
    for (const auto& l : lat.logicals) {
        t.measure_forced(l.translations.front().widened(t.num_qubits()), 1);
    }
    return t;
}

/// Returns measured ancillas (qubits >= n_data) to |0>. They must be in Z eigenstates.
inline void release_ancillas(StabilizerTableau& t, std::size_t n_data) {
    for (std::size_t q = n_data; q < t.num_qubits(); ++q) {
        const int v = t.expect(PauliOperator::single(t.num_qubits(), q, Pauli1::Z));
        if (v == 0) {
            throw std::logic_error("ancilla " + std::to_string(q) + " is entangled with the data");
        }
        if (v < 0) {
            t.x(q);
        }
    }
}

/// Splits [0, n) into contiguous ranges, one per worker. Callers write results
/// by index, so the outcome does not depend on the worker count.
template <typename F>
void parallel_ranges(std::size_t n, std::size_t threads, F&& work) {
    const std::size_t nt = std::max<std::size_t>(1, std::min(threads, n));
    if (nt == 1) {
        work(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&work, n, nt, t] { work(n * t / nt, n * (t + 1) / nt); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

struct PrepShot {
    StabilizerTableau state;
    std::vector<std::uint8_t> clbits;
    Syndrome syndrome;
};

/// One shot of the (already compiled) preparation circuit.
inline PrepShot run_prep_shot(const PrepProgram& p, const Circuit& compiled, Rng& rng, const NoiseSpec* noise) {
    auto r = execute(compiled, rng, noise);
    Syndrome s = p.syndrome(r.clbits);
    return {std::move(r.state), std::move(r.clbits), std::move(s)};
}

struct PrepOptions {
    std::size_t threads = 1;
    bool keep_all = false;                    // report heralded shots too
    bool keep_states = false;                 // retain post-feed-forward states (before readout)
    std::optional<ReadoutMatrix> mitigation;  // readout inversion in the report
    std::optional<NoiseSpec> readout_noise;   // final-readout noise, if different from the circuit's
};

struct PrepRun {
    ExperimentReport report;
    std::vector<ShotRecord> records;
    std::vector<StabilizerTableau> states;  // only with keep_states, ancillas released
    NativeGateCounts counts;
};

/// Runs `shots` independent preparations; shot i uses shot_rng(seed, i) and is
/// read out destructively in plan setting i mod |plan|. Results do not depend on `threads`.
inline PrepRun prepare_ground_state(const Lattice& lat, const PrepStrategy& strategy, const NoiseSpec* noise,
                                    std::uint64_t seed, std::size_t shots, const PrepOptions& opt = {}) {
    const PrepProgram prog = build_prep_program(lat, strategy);
    const auto native = compile_to_native(prog.circuit);
    const Circuit& compiled = native.first;
    const NativeGateCounts counts = native.second;
    const auto plan = measurement_plan(lat);
    PrepRun run;
    run.counts = counts;
    run.records.resize(shots);
    std::vector<std::optional<StabilizerTableau>> states(opt.keep_states ? shots : 0);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = shot_rng(seed, i);
            auto shot = run_prep_shot(prog, compiled, rng, noise);
            if (opt.keep_states) {
                StabilizerTableau kept = shot.state;
                release_ancillas(kept, prog.n_data);
                states[i] = std::move(kept);
            }
            const auto setting = static_cast<std::uint32_t>(i % plan.size());
            const NoiseSpec* ro = opt.readout_noise ? &*opt.readout_noise : noise;
            run.records[i] = {setting, destructive_readout(shot.state, plan[setting], rng, ro),
                              shot.syndrome.heralded};
        }
    };
    parallel_ranges(shots, opt.threads, work);
    for (auto& s : states) {
        run.states.push_back(std::move(*s));
    }
    run.report = expectation_report(run.records, plan, lat, {opt.keep_all, opt.mitigation});
    run.report.metadata["lattice"] = lat.name;
    run.report.metadata["strategy"] = strategy.to_json();
    run.report.metadata["native_counts"] = {{"two_qubit", counts.n_2q}, {"one_qubit", counts.n_1q}, {"depth", counts.depth}};
    return run;
}

}  // namespace topoff
