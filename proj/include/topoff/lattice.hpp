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

#ifndef TOPOFF_LATTICE_HPP
#define TOPOFF_LATTICE_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "topoff/gf2.hpp"
#include "topoff/pauli.hpp"
#include "topoff/tableau.hpp"

namespace topoff {

enum class PlaquetteKind { X, Z, Defect };

inline const char* kind_name(PlaquetteKind k) {
    switch (k) {
        case PlaquetteKind::X:
            return "X";
        case PlaquetteKind::Z:
            return "Z";
        default:
            return "defect";
    }
}

struct Plaquette {
    int label;  // row-major index of the upper-left qubit
    PlaquetteKind kind;
    PauliOperator op;
};

/// A logical string and its translations; translations[0] is the named representative.
struct LogicalString {
    std::string name;
    std::vector<PauliOperator> translations;
};

/// Plaquette label -> expected stabilizer sign.
using AnyonConfig = std::map<int, int>;

/// Torus or defect geometry. Immutable once built.
class Lattice {
   public:
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::pair<std::size_t, std::size_t>> removed_sites;
    std::vector<int> qubit_at_site;  // rows*cols entries, -1 for removed sites
    std::vector<Plaquette> plaquettes;  // sorted by label
    std::vector<LogicalString> logicals;

    std::size_t num_qubits() const { return num_qubits_; }
    bool is_torus() const { return removed_sites.empty(); }

    /// Qubit at (r, c) with periodic wraparound, or -1 if the site is removed.
    int qubit(long r, long c) const {
        const long R = static_cast<long>(rows);
        const long C = static_cast<long>(cols);
        r = ((r % R) + R) % R;
        c = ((c % C) + C) % C;
        return qubit_at_site[static_cast<std::size_t>(r * C + c)];
    }

    bool has_plaquette(int label) const { return find(label) != nullptr; }

    const Plaquette& plaquette(int label) const {
        const Plaquette* p = find(label);
        if (p == nullptr) {
            throw std::out_of_range("no plaquette with label " + std::to_string(label));
        }
        return *p;
    }

    std::vector<int> labels() const {
        std::vector<int> out;
        for (const auto& p : plaquettes) {
            out.push_back(p.label);
        }
        return out;
    }

    std::vector<int> labels(PlaquetteKind kind) const {
        std::vector<int> out;
        for (const auto& p : plaquettes) {
            if (p.kind == kind) {
                out.push_back(p.label);
            }
        }
        return out;
    }

    std::vector<PauliOperator> stabilizer_ops() const {
        std::vector<PauliOperator> out;
        for (const auto& p : plaquettes) {
            out.push_back(p.op);
        }
        return out;
    }

    const LogicalString& logical(const std::string& n) const {
        for (const auto& l : logicals) {
            if (l.name == n) {
                return l;
            }
        }
        throw std::out_of_range("no logical named " + n);
    }

    /// Labels of the plaquettes whose stabilizer anticommutes with p.
    std::vector<int> flipped_by(const PauliOperator& p) const {
        std::vector<int> out;
        for (const auto& pl : plaquettes) {
            if (!pl.op.commutes(p)) {
                out.push_back(pl.label);
            }
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["name"] = name;
        j["rows"] = rows;
        j["cols"] = cols;
        j["num_qubits"] = num_qubits_;
        j["removed_sites"] = nlohmann::json::array();
        for (auto [r, c] : removed_sites) {
            j["removed_sites"].push_back({r, c});
        }
        j["qubit_at_site"] = qubit_at_site;
        j["plaquettes"] = nlohmann::json::array();
        for (const auto& p : plaquettes) {
            j["plaquettes"].push_back({{"label", p.label}, {"type", kind_name(p.kind)}, {"pauli", p.op.sparse_str()}});
        }
        j["logicals"] = nlohmann::json::object();
        for (const auto& l : logicals) {
            auto& arr = j["logicals"][l.name];
            for (const auto& t : l.translations) {
                arr.push_back(t.sparse_str());
            }
        }
        return j;
    }

    /// Pairwise commutation of all stabilizers and logicals; empty string when consistent.
    std::string validate() const {
        for (std::size_t a = 0; a < plaquettes.size(); ++a) {
            for (std::size_t b = a + 1; b < plaquettes.size(); ++b) {
                if (!plaquettes[a].op.commutes(plaquettes[b].op)) {
                    return "plaquettes " + std::to_string(plaquettes[a].label) + " and " +
                           std::to_string(plaquettes[b].label) + " anticommute";
                }
            }
            for (const auto& l : logicals) {
                for (const auto& t : l.translations) {
                    if (!t.commutes(plaquettes[a].op)) {
                        return "logical " + l.name + " anticommutes with plaquette " +
                               std::to_string(plaquettes[a].label);
                    }
                }
            }
        }
        return "";
    }

    void finalize() {
        num_qubits_ = 0;
        for (int q : qubit_at_site) {
            num_qubits_ += q >= 0;
        }
        std::sort(plaquettes.begin(), plaquettes.end(),
                  [](const Plaquette& a, const Plaquette& b) { return a.label < b.label; });
    }

   private:
    const Plaquette* find(int label) const {
        for (const auto& p : plaquettes) {
            if (p.label == label) {
                return &p;
            }
        }
        return nullptr;
    }

    std::size_t num_qubits_ = 0;
};

namespace detail {

inline std::vector<std::size_t> block_sites(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) {
    return {r * cols + c, r * cols + (c + 1) % cols, ((r + 1) % rows) * cols + c,
            ((r + 1) % rows) * cols + (c + 1) % cols};
}

inline PauliOperator uniform_on(std::size_t n, Pauli1 letter, const std::vector<std::size_t>& qubits) {
    PauliOperator p(n);
    for (std::size_t q : qubits) {
        p.set(q, letter);
    }
    return p;
}

}  // namespace detail

/// Wen-plaquette toric code on a periodic rows x cols grid. Plaquette p (upper-left
/// qubit p) is X-type when row + col is odd.
inline Lattice build_torus(std::size_t rows = 4, std::size_t cols = 4) {
    if (rows < 2 || cols < 2 || rows % 2 || cols % 2) {
        throw std::invalid_argument("torus dimensions must be even and at least 2");
    }
    Lattice lat;
    lat.name = "torus" + std::to_string(rows) + "x" + std::to_string(cols);
    lat.rows = rows;
    lat.cols = cols;
    const std::size_t n = rows * cols;
    for (std::size_t q = 0; q < n; ++q) {
        lat.qubit_at_site.push_back(static_cast<int>(q));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const bool x_type = (r + c) % 2 == 1;
            lat.plaquettes.push_back({static_cast<int>(r * cols + c), x_type ? PlaquetteKind::X : PlaquetteKind::Z,
                                      detail::uniform_on(n, x_type ? Pauli1::X : Pauli1::Z,
                                                         detail::block_sites(r, c, rows, cols))});
        }
    }
    LogicalString hori{"Z_hori", {}};
    LogicalString vert{"Z_vert", {}};
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::size_t> qs;
        for (std::size_t c = 0; c < cols; ++c) {
            qs.push_back(r * cols + c);
        }
        hori.translations.push_back(detail::uniform_on(n, Pauli1::Z, qs));
    }
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<std::size_t> qs;
        for (std::size_t r = 0; r < rows; ++r) {
            qs.push_back(r * cols + c);
        }
        vert.translations.push_back(detail::uniform_on(n, Pauli1::Z, qs));
    }
    lat.logicals = {hori, vert};
    lat.finalize();
    return lat;
}

/// For each support, finds full-weight Paulis commuting with every stabilizer of
/// `partial` and with each other, and lying outside the regular stabilizer group. Candidates are scanned in lexicographic
/// (x bits, then z bits, qubit 0 first) order; the first commuting combination wins.
inline std::vector<PauliOperator> derive_defect_stabilizers(const Lattice& partial,
                                                            const std::vector<std::vector<std::size_t>>& supports) {
    const std::size_t n = partial.num_qubits();
    const auto regular = partial.stabilizer_ops();
    std::vector<std::vector<PauliOperator>> candidates(supports.size());
    for (std::size_t k = 0; k < supports.size(); ++k) {
        const auto& sup = supports[k];
        std::size_t combos = 1;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            combos *= 3;
        }
        for (std::size_t code = 0; code < combos; ++code) {
            PauliOperator p(n);
            std::size_t v = code;
            for (std::size_t q : sup) {
                p.set(q, static_cast<Pauli1>(1 + v % 3));
                v /= 3;
            }
            bool ok = std::all_of(regular.begin(), regular.end(), [&](const auto& s) { return s.commutes(p); });
            for (const auto& l : partial.logicals) {
                ok = ok && std::all_of(l.translations.begin(), l.translations.end(),
                                       [&](const auto& t) { return t.commutes(p); });
            }
            if (ok) {
                candidates[k].push_back(std::move(p));
            }
        }
        auto key = [n](const PauliOperator& p) {
            std::vector<bool> bitsv;
            for (std::size_t q = 0; q < n; ++q) {
                bitsv.push_back(p.x(q));
            }
            for (std::size_t q = 0; q < n; ++q) {
                bitsv.push_back(p.z(q));
            }
            return bitsv;
        };
        std::sort(candidates[k].begin(), candidates[k].end(),
                  [&](const auto& a, const auto& b) { return key(a) < key(b); });
        if (candidates[k].empty()) {
            throw std::runtime_error("no defect stabilizer commutes with the regular plaquettes");
        }
    }
    // Depth-first choice of a mutually commuting, independent combination.
    std::vector<PauliOperator> chosen;
    auto search = [&](auto&& self, std::size_t k) -> bool {
        if (k == supports.size()) {
            return true;
        }
        for (const auto& c : candidates[k]) {
            if (!std::all_of(chosen.begin(), chosen.end(), [&](const auto& o) { return o.commutes(c); })) {
                continue;
            }
            // Must be new relative to the regular plaquettes; the defects may still be
            // dependent on each other through the global relation.
            auto with = regular;
            with.push_back(c);
            if (gf2::pauli_rank(with) == gf2::pauli_rank(regular)) {
                continue;
            }
            chosen.push_back(c);
            if (self(self, k + 1)) {
                return true;
            }
            chosen.pop_back();
        }
        return false;
    };
    if (!search(search, 0)) {
        throw std::runtime_error("defect stabilizers cannot be chosen to commute with each other");
    }
    return chosen;
}

/// Sites of the two five-body defect plaquettes around the removed site (2, 2).
/// Each merges two of the four torus plaquettes that touched the removed site.
struct DefectGeometry {
    std::pair<std::size_t, std::size_t> removed{2, 2};
    // label (upper-left site index on the intact grid) and (row, col) sites
    std::vector<std::pair<int, std::vector<std::pair<std::size_t, std::size_t>>>> defects{
        {5, {{1, 1}, {1, 2}, {2, 1}, {3, 1}, {3, 2}}},
        {6, {{1, 2}, {1, 3}, {2, 3}, {3, 2}, {3, 3}}},
    };
};

/// 4x4 torus with the site (2, 2) removed: 15 qubits relabeled row-major, 12
/// regular plaquettes keeping the torus colouring and labels renumbered with
/// the qubits, and two five-body defect stabilizers labelled 5 and 6.
inline Lattice build_defect_lattice() {
    const DefectGeometry geo;
    const std::size_t rows = 4;
    const std::size_t cols = 4;
    Lattice lat;
    lat.name = "defect15";
    lat.rows = rows;
    lat.cols = cols;
    lat.removed_sites = {geo.removed};
    const std::size_t removed = geo.removed.first * cols + geo.removed.second;
    int next = 0;
    for (std::size_t s = 0; s < rows * cols; ++s) {
        lat.qubit_at_site.push_back(s == removed ? -1 : next++);
    }
    lat.finalize();
    const std::size_t n = lat.num_qubits();
    auto to_qubits = [&](const std::vector<std::size_t>& sites) {
        std::vector<std::size_t> qs;
        for (std::size_t s : sites) {
            qs.push_back(static_cast<std::size_t>(lat.qubit_at_site[s]));
        }
        return qs;
    };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto sites = detail::block_sites(r, c, rows, cols);
            if (std::find(sites.begin(), sites.end(), removed) != sites.end()) {
                continue;
            }
            const bool x_type = (r + c) % 2 == 1;
            lat.plaquettes.push_back({lat.qubit_at_site[r * cols + c], x_type ? PlaquetteKind::X : PlaquetteKind::Z,
                                      detail::uniform_on(n, x_type ? Pauli1::X : Pauli1::Z, to_qubits(sites))});
        }
    }
    lat.logicals = {{"Z_hori", {detail::uniform_on(n, Pauli1::Z, to_qubits({0, 1, 2, 3}))}},
                    {"Z_vert", {detail::uniform_on(n, Pauli1::Z, to_qubits({0, 4, 8, 12}))}}};
    std::vector<std::vector<std::size_t>> supports;
    for (const auto& [label, sites] : geo.defects) {
        std::vector<std::size_t> s;
        for (auto [r, c] : sites) {
            s.push_back(r * cols + c);
        }
        supports.push_back(to_qubits(s));
    }
    const auto defects = derive_defect_stabilizers(lat, supports);
    for (std::size_t k = 0; k < defects.size(); ++k) {
        lat.plaquettes.push_back({geo.defects[k].first, PlaquetteKind::Defect, defects[k]});
    }
    lat.finalize();
    return lat;
}

inline Lattice build_lattice(const std::string& name) {
    if (name == "torus4x4" || name == "torus") {
        return build_torus(4, 4);
    }
    if (name == "defect" || name == "defect15") {
        return build_defect_lattice();
    }
    throw std::invalid_argument("unknown lattice '" + name + "' (expected torus4x4 or defect15)");
}

/// Exact expectation of every logical translation, plus "<name>_avg" over translations.
/// The state may carry extra (ancilla) qubits after the lattice qubits.
inline std::map<std::string, double> logical_expectations(const StabilizerTableau& state, const Lattice& lat) {
    if (state.num_qubits() < lat.num_qubits()) {
        throw std::invalid_argument("state has fewer qubits than the lattice");
    }
    std::map<std::string, double> out;
    for (const auto& l : lat.logicals) {
        double sum = 0;
        for (std::size_t t = 0; t < l.translations.size(); ++t) {
            const double v = state.expect(l.translations[t].widened(state.num_qubits()));
            out[t == 0 ? l.name : l.name + "[" + std::to_string(t) + "]"] = v;
            sum += v;
        }
        out[l.name + "_avg"] = sum / static_cast<double>(l.translations.size());
    }
    return out;
}

/// Exact stabilizer signs (+1/-1, or 0 if undetermined) for every plaquette.
inline AnyonConfig stabilizer_signs(const StabilizerTableau& state, const Lattice& lat) {
    AnyonConfig out;
    for (const auto& p : lat.plaquettes) {
        out[p.label] = state.expect(p.op.widened(state.num_qubits()));
    }
    return out;
}

// ---- Measurement plans ---------------------------------------------------

/// One destructive measurement setting: every data qubit measured in `bases[q]`.
struct MeasurementSetting {
    std::string name;
    std::string bases;             // one of X, Y, Z per data qubit
    std::vector<int> labels;       // plaquettes evaluated from this setting
    std::vector<std::string> logicals;  // logical translations evaluated from this setting
};

namespace detail {

inline bool readable(const PauliOperator& p, const std::string& bases) {
    for (std::size_t q : p.support()) {
        if (bases[q] != pauli_char(p.get(q))) {
            return false;
        }
    }
    return true;
}

inline MeasurementSetting setting_for(const Lattice& lat, std::string name, const std::vector<int>& labels) {
    std::string bases(lat.num_qubits(), '?');
    for (int label : labels) {
        const auto& op = lat.plaquette(label).op;
        for (std::size_t q : op.support()) {
            const char c = pauli_char(op.get(q));
            if (bases[q] != '?' && bases[q] != c) {
                throw std::logic_error("measurement setting " + name + " needs two bases on qubit " +
                                       std::to_string(q));
            }
            bases[q] = c;
        }
    }
    std::replace(bases.begin(), bases.end(), '?', 'Z');
    return {std::move(name), bases, labels, {}};
}

}  // namespace detail

/// Torus: all-X and all-Z settings. Defect lattice: the four settings
/// (0,2,5,7,14), (3,5,10,11,13), (1,3,4,6,11), (0,6,8,12,14).
/// Each logical translation is attached to the first setting able to read it.
inline std::vector<MeasurementSetting> measurement_plan(const Lattice& lat) {
    std::vector<MeasurementSetting> plan;
    if (lat.is_torus()) {
        plan.push_back(detail::setting_for(lat, "X", lat.labels(PlaquetteKind::X)));
        plan.push_back(detail::setting_for(lat, "Z", lat.labels(PlaquetteKind::Z)));
    } else {
        const std::vector<std::vector<int>> groups{
            {0, 2, 5, 7, 14}, {3, 5, 10, 11, 13}, {1, 3, 4, 6, 11}, {0, 6, 8, 12, 14}};
        for (std::size_t k = 0; k < groups.size(); ++k) {
            plan.push_back(detail::setting_for(lat, "S" + std::to_string(k), groups[k]));
        }
    }
    for (const auto& l : lat.logicals) {
        for (std::size_t t = 0; t < l.translations.size(); ++t) {
            for (auto& s : plan) {
                if (detail::readable(l.translations[t], s.bases)) {
                    s.logicals.push_back(t == 0 ? l.name : l.name + "[" + std::to_string(t) + "]");
                    break;
                }
            }
        }
    }
    return plan;
}

/// Looks up a logical translation by the names used in measurement plans ("Z_hori", "Z_hori[2]").
inline const PauliOperator& logical_by_key(const Lattice& lat, const std::string& key) {
    const auto br = key.find('[');
    const auto& l = lat.logical(key.substr(0, br));
    const std::size_t t = br == std::string::npos ? 0 : std::stoul(key.substr(br + 1));
    return l.translations.at(t);
}

/// Labels never evaluated by any setting of the plan (should be empty).
inline std::vector<int> plan_gaps(const Lattice& lat, const std::vector<MeasurementSetting>& plan) {
    std::vector<int> gaps;
    for (int label : lat.labels()) {
        bool seen = false;
        for (const auto& s : plan) {
            seen |= std::find(s.labels.begin(), s.labels.end(), label) != s.labels.end();
        }
        if (!seen) {
            gaps.push_back(label);
        }
    }
    return gaps;
}

// ---- Entanglement regions ------------------------------------------------

/// A/B/C partition of a region for the topological entanglement entropy.
struct TeeRegion {
    std::string name;
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    std::vector<std::size_t> c;
};

/// Every 2x2 block (one per plaquette) in each of its four rotations: A is one
/// corner, B the next corner clockwise, C the remaining two qubits.
inline std::vector<TeeRegion> tee_regions_2x2(const Lattice& lat) {
    if (!lat.is_torus()) {
        throw std::invalid_argument("entanglement regions are defined on the torus");
    }
    std::vector<TeeRegion> out;
    for (std::size_t r = 0; r < lat.rows; ++r) {
        for (std::size_t c = 0; c < lat.cols; ++c) {
            const long R = static_cast<long>(r);
            const long C = static_cast<long>(c);
            // clockwise from the upper-left corner
            const std::size_t ring[4] = {static_cast<std::size_t>(lat.qubit(R, C)),
                                         static_cast<std::size_t>(lat.qubit(R, C + 1)),
                                         static_cast<std::size_t>(lat.qubit(R + 1, C + 1)),
                                         static_cast<std::size_t>(lat.qubit(R + 1, C))};
            for (std::size_t rot = 0; rot < 4; ++rot) {
                out.push_back({"2x2@" + std::to_string(r * lat.cols + c) + "/r" + std::to_string(rot),
                               {ring[rot]},
                               {ring[(rot + 1) % 4]},
                               {ring[(rot + 2) % 4], ring[(rot + 3) % 4]}});
            }
        }
    }
    return out;
}

/// Every 3-row x 2-column region (two vertically adjacent plaquettes): A is the
/// top row, B the left and C the right column of the two lower rows.
inline std::vector<TeeRegion> tee_regions_2x3(const Lattice& lat) {
    if (!lat.is_torus()) {
        throw std::invalid_argument("entanglement regions are defined on the torus");
    }
    std::vector<TeeRegion> out;
    for (std::size_t r = 0; r < lat.rows; ++r) {
        for (std::size_t c = 0; c < lat.cols; ++c) {
            const long R = static_cast<long>(r);
            const long C = static_cast<long>(c);
            auto q = [&](long dr, long dc) { return static_cast<std::size_t>(lat.qubit(R + dr, C + dc)); };
            out.push_back({"2x3@" + std::to_string(r * lat.cols + c),
                           {q(0, 0), q(0, 1)},
                           {q(1, 0), q(2, 0)},
                           {q(1, 1), q(2, 1)}});
        }
    }
    return out;
}

}  // namespace topoff

#endif  // TOPOFF_LATTICE_HPP
