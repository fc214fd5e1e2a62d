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

// Anyon dynamics on the defect lattice: Pauli moves with destructive or QND
// checkpoints, and a Hadamard-test braid.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topoff/circuit.hpp"
#include "topoff/estimators.hpp"
#include "topoff/lattice.hpp"
#include "topoff/noise.hpp"
#include "topoff/prep.hpp"
#include "topoff/rng.hpp"

namespace topoff {

struct PauliMove {
    Pauli1 pauli = Pauli1::X;
    std::size_t qubit = 0;

    std::string str() const { return std::string(1, pauli_char(pauli)) + std::to_string(qubit); }
};

struct Checkpoint {
    std::vector<int> labels;
    bool qnd = false;
    int repeats = 1;  // QND only: back-to-back measurements of each plaquette
};

struct DynamicsStep {
    std::vector<PauliMove> moves;
    std::optional<Checkpoint> checkpoint;
};

struct DynamicsScript {
    std::vector<DynamicsStep> steps;

    /// Empty if valid on the lattice with `n_ancilla` free ancillas.
    std::string validate(const Lattice& lat, std::size_t n_ancilla) const {
        for (const auto& st : steps) {
            for (const auto& m : st.moves) {
                if (m.qubit >= lat.num_qubits() || m.pauli == Pauli1::I) {
                    return "move " + m.str() + " is not a single-qubit Pauli on the lattice";
                }
            }
            if (st.checkpoint) {
                for (int l : st.checkpoint->labels) {
                    if (!lat.has_plaquette(l)) {
                        return "checkpoint names unknown plaquette " + std::to_string(l);
                    }
                }
                if (st.checkpoint->qnd && st.checkpoint->labels.size() > n_ancilla) {
                    return "ancilla shortage: QND checkpoint needs " + std::to_string(st.checkpoint->labels.size()) +
                           " ancillas, " + std::to_string(n_ancilla) + " available";
                }
                if (st.checkpoint->repeats < 1) {
                    return "checkpoint repeats must be positive";
                }
            }
        }
        return {};
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& st : steps) {
            nlohmann::json j;
            j["moves"] = nlohmann::json::array();
            for (const auto& m : st.moves) {
                j["moves"].push_back(m.str());
            }
            if (st.checkpoint) {
                j["checkpoint"] = {{"labels", st.checkpoint->labels},
                                   {"mode", st.checkpoint->qnd ? "qnd" : "destructive"},
                                   {"repeats", st.checkpoint->repeats}};
            }
            arr.push_back(j);
        }
        return {{"steps", arr}};
    }

    static DynamicsScript from_json(const nlohmann::json& j) {
        DynamicsScript s;
        for (const auto& js : j.at("steps")) {
            DynamicsStep st;
            for (const auto& m : js.at("moves")) {
                const auto text = m.get<std::string>();
                if (text.size() < 2) {
                    throw std::invalid_argument("bad move '" + text + "'");
                }
                std::size_t used = 0;
                const auto q = std::stoul(text.substr(1), &used);
                if (used + 1 != text.size()) {
                    throw std::invalid_argument("bad move '" + text + "'");
                }
                st.moves.push_back({pauli_from_char(text[0]), q});
            }
            if (js.contains("checkpoint")) {
                const auto& c = js.at("checkpoint");
                Checkpoint cp;
                cp.labels = c.at("labels").get<std::vector<int>>();
                const auto mode = c.value("mode", std::string("destructive"));
                if (mode != "qnd" && mode != "destructive") {
                    throw std::invalid_argument("checkpoint mode must be qnd or destructive");
                }
                cp.qnd = mode == "qnd";
                cp.repeats = c.value("repeats", 1);
                st.checkpoint = cp;
            }
            s.steps.push_back(std::move(st));
        }
        return s;
    }
};

/// X12, X13, Z6, Z5, each followed by a destructive readout of every plaquette.
inline DynamicsScript transmutation_script(const Lattice& lat) {
    DynamicsScript s;
    for (auto [p, q] : {std::pair{Pauli1::X, 12}, {Pauli1::X, 13}, {Pauli1::Z, 6}, {Pauli1::Z, 5}}) {
        s.steps.push_back({{{p, static_cast<std::size_t>(q)}}, Checkpoint{lat.labels(), false, 1}});
    }
    return s;
}

/// X12, X13, Z6, each followed by a QND check of plaquettes 1, 4, 6, 8, 12.
inline DynamicsScript qnd_script(int repeats = 1) {
    DynamicsScript s;
    for (auto [p, q] : {std::pair{Pauli1::X, 12}, {Pauli1::X, 13}, {Pauli1::Z, 6}}) {
        s.steps.push_back({{{p, static_cast<std::size_t>(q)}}, Checkpoint{{1, 4, 6, 8, 12}, true, repeats}});
    }
    return s;
}

/// Anyon runs keep heralded shots unless asked otherwise; discarding is
/// only applied to the preparation and entropy experiments.
inline PrepOptions anyon_default_options() {
    PrepOptions o;
    o.keep_all = true;
    return o;
}

/// Plaquette signs of the ground state after the given moves.
inline AnyonConfig expected_anyons(const Lattice& lat, const std::vector<PauliMove>& moves) {
    PauliOperator total(lat.num_qubits());
    for (const auto& m : moves) {
        total *= PauliOperator::single(lat.num_qubits(), m.qubit, m.pauli);
    }
    AnyonConfig out;
    for (int l : lat.labels()) {
        out[l] = 1;
    }
    for (int l : lat.flipped_by(total)) {
        out[l] = -1;
    }
    return out;
}

inline std::vector<int> minus_of(const AnyonConfig& c) {
    std::vector<int> out;
    for (const auto& [l, s] : c) {
        if (s < 0) {
            out.push_back(l);
        }
    }
    return out;
}

// ---- destructive transmutation ------------------------------------------------

struct TransmutationStep {
    std::vector<PauliMove> moves;  // cumulative
    AnyonConfig expected;
    ExperimentReport report;
};

/// Fresh preparations per step; step k applies the first k+1 moves and reads
/// every plaquette destructively with the four-setting plan.
inline std::vector<TransmutationStep> run_transmutation(const Lattice& lat, const NoiseSpec* noise, std::uint64_t seed,
                                                        std::size_t shots_per_step, const PrepOptions& opt = anyon_default_options(),
                                                        const DynamicsScript* script = nullptr) {
    const DynamicsScript script_ = script ? *script : transmutation_script(lat);
    const PrepProgram prog = build_prep_program(lat, default_strategy(lat));
    if (const auto err = script_.validate(lat, prog.n_ancilla); !err.empty()) {
        throw std::invalid_argument(err);
    }
    const auto plan = measurement_plan(lat);
    std::vector<TransmutationStep> out;
    std::vector<PauliMove> moves;
    for (std::size_t k = 0; k < script_.steps.size(); ++k) {
        for (const auto& m : script_.steps[k].moves) {
            moves.push_back(m);
        }
        Circuit c = prog.circuit;
        for (const auto& m : moves) {
            c.pauli(m.qubit, m.pauli);
        }
        const Circuit native = compile_to_native(c).first;
        const std::uint64_t step_seed = derive_seed(seed, k + 1);
        std::vector<ShotRecord> records(shots_per_step);
        parallel_ranges(shots_per_step, opt.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                Rng rng = shot_rng(step_seed, i);
                auto shot = run_prep_shot(prog, native, rng, noise);
                const auto setting = static_cast<std::uint32_t>(i % plan.size());
                records[i] = {setting, destructive_readout(shot.state, plan[setting], rng, noise),
                              shot.syndrome.heralded};
            }
        });
        TransmutationStep st;
        st.moves = moves;
        st.expected = expected_anyons(lat, moves);
        st.report = expectation_report(records, plan, lat, {opt.keep_all, opt.mitigation});
        out.push_back(std::move(st));
    }
    return out;
}

// ---- QND trace ------------------------------------------------------------------------

struct QndShot {
    std::vector<std::vector<int>> outcomes;  // [checkpoint][repeat * |labels| + k], +-1
    std::uint32_t setting = 0;               // final destructive readout
    std::uint64_t final_bits = 0;
    bool heralded = false;
};

struct QndTrace {
    DynamicsScript script;
    std::vector<AnyonConfig> expected;       // per checkpoint
    std::vector<QndShot> shots;
    std::vector<std::map<int, double>> means;  // per checkpoint, first repeat, kept shots
    ExperimentReport final_report;
    std::size_t preparations = 0;              // one per trajectory
    std::size_t destructive_preparations = 0;  // the same data read destructively
};

/// One preparation per trajectory: moves interleaved with QND checks on reset
/// ancillas, then a destructive readout of all plaquettes.
inline QndTrace run_qnd_trace(const Lattice& lat, const NoiseSpec* noise, std::uint64_t seed, std::size_t shots,
                              const PrepOptions& opt = anyon_default_options(), const DynamicsScript* script = nullptr) {
    QndTrace t;
    t.script = script ? *script : qnd_script();
    const PrepProgram prog = build_prep_program(lat, default_strategy(lat));
    if (const auto err = t.script.validate(lat, prog.n_ancilla); !err.empty()) {
        throw std::invalid_argument(err);
    }
    Circuit c = prog.circuit;
    std::vector<std::vector<std::uint32_t>> clbits;
    std::vector<PauliMove> moves;
    for (const auto& st : t.script.steps) {
        for (const auto& m : st.moves) {
            c.pauli(m.qubit, m.pauli);
            moves.push_back(m);
        }
        if (!st.checkpoint) {
            continue;
        }
        if (!st.checkpoint->qnd) {
            throw std::invalid_argument("QND trace supports QND checkpoints only");
        }
        t.expected.push_back(expected_anyons(lat, moves));
        std::vector<std::uint32_t> cb;
        for (int r = 0; r < st.checkpoint->repeats; ++r) {
            for (std::size_t k = 0; k < st.checkpoint->labels.size(); ++k) {
                const auto bit = static_cast<std::uint32_t>(c.num_clbits);
                build_parity_check_ancilla(c, lat.plaquette(st.checkpoint->labels[k]).op.widened(c.num_qubits),
                                           prog.n_data + k, bit, true);
                cb.push_back(bit);
            }
        }
        clbits.push_back(cb);
    }
    const Circuit native = compile_to_native(c).first;
    const auto plan = measurement_plan(lat);
    t.shots.resize(shots);
    parallel_ranges(shots, opt.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = shot_rng(seed, i);
            auto r = execute(native, rng, noise);
            QndShot& s = t.shots[i];
            s.heralded = prog.syndrome(r.clbits).heralded;
            for (const auto& cb : clbits) {
                std::vector<int> v;
                for (auto bit : cb) {
                    v.push_back(r.clbits[bit] ? -1 : 1);
                }
                s.outcomes.push_back(std::move(v));
            }
            s.setting = static_cast<std::uint32_t>(i % plan.size());
            s.final_bits = destructive_readout(r.state, plan[s.setting], rng, noise);
        }
    });
    std::vector<ShotRecord> records;
    std::size_t kept = 0;
    t.means.assign(clbits.size(), {});
    for (const auto& s : t.shots) {
        records.push_back({s.setting, s.final_bits, s.heralded});
        if (s.heralded && !opt.keep_all) {
            continue;
        }
        ++kept;
        std::size_t cp = 0;
        for (const auto& st : t.script.steps) {
            if (!st.checkpoint) {
                continue;
            }
            for (std::size_t k = 0; k < st.checkpoint->labels.size(); ++k) {
                t.means[cp][st.checkpoint->labels[k]] += s.outcomes[cp][k];
            }
            ++cp;
        }
    }
    for (auto& m : t.means) {
        for (auto& [l, v] : m) {
            v = kept ? v / static_cast<double>(kept) : 0.0;
        }
    }
    t.final_report = expectation_report(records, plan, lat, {opt.keep_all, opt.mitigation});
    t.preparations = shots;
    t.destructive_preparations = shots * clbits.size();
    return t;
}

// ---- braid interferometry ---------------------------------------------------------------

struct BraidResult {
    double mean = 0;  // <Z_anc> = Re<psi|U_braid|psi>
    double sem = 0;
    std::size_t shots_total = 0;
    std::size_t shots_kept = 0;
};

/// Hadamard test of the loop Z10 Z8 Z4 Z7 (four CZ from one ancilla). With the
/// fermion, Y10 creates the e-m composite before the loop and removes it after.
inline Circuit braid_circuit(const Lattice& lat, bool with_fermion, PrepProgram* prog_out = nullptr) {
    PrepProgram prog = build_prep_program(lat, default_strategy(lat));
    if (prog.n_ancilla == 0) {
        throw std::invalid_argument("braid needs a free ancilla");
    }
    Circuit c = prog.circuit;
    const std::size_t anc = prog.n_data;
    const auto bit = static_cast<std::uint32_t>(c.num_clbits);
    c.num_clbits += 1;
    c.reset(anc);
    c.h(anc);
    if (with_fermion) {
        c.y(10);
    }
    for (std::size_t q : {10, 8, 4, 7}) {
        c.cz(anc, q);
    }
    if (with_fermion) {
        c.y(10);
    }
    c.h(anc);
    c.measure(anc, bit);
    if (prog_out) {
        *prog_out = std::move(prog);
    }
    return c;
}

inline BraidResult run_braid_interferometry(const Lattice& lat, bool with_fermion, const NoiseSpec* noise,
                                            std::uint64_t seed, std::size_t shots,
                                            const PrepOptions& opt = anyon_default_options()) {
    if (lat.is_torus()) {
        throw std::invalid_argument("braid interferometry runs on the defect lattice");
    }
    PrepProgram prog;
    const Circuit c = braid_circuit(lat, with_fermion, &prog);
    const Circuit native = compile_to_native(c).first;
    const std::uint32_t bit = static_cast<std::uint32_t>(c.num_clbits - 1);
    std::vector<int> value(shots, 0);
    std::vector<std::uint8_t> heralded(shots, 0);
    parallel_ranges(shots, opt.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = shot_rng(seed, i);
            auto r = execute(native, rng, noise);
            heralded[i] = prog.syndrome(r.clbits).heralded;
            value[i] = r.clbits[bit] ? -1 : 1;
        }
    });
    std::optional<ReadoutMatrix> inv;
    if (opt.mitigation) {
        inv = invert(*opt.mitigation);
    }
    BraidResult res;
    res.shots_total = shots;
    double sum = 0, sq = 0;
    for (std::size_t i = 0; i < shots; ++i) {
        if (heralded[i] && !opt.keep_all) {
            continue;
        }
        const double v = detail::shot_value(value[i] < 0 ? 1 : 0, 1, 1, inv);
        ++res.shots_kept;
        sum += v;
        sq += v * v;
    }
    if (res.shots_kept > 0) {
        const double n = static_cast<double>(res.shots_kept);
        res.mean = sum / n;
        res.sem = res.shots_kept > 1 ? std::sqrt(std::max(0.0, sq / n - res.mean * res.mean) / (n - 1)) : 0.0;
    }
    return res;
}

}  // namespace topoff
