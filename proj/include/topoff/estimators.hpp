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

#ifndef TOPOFF_ESTIMATORS_HPP
#define TOPOFF_ESTIMATORS_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topoff/clifford1q.hpp"
#include "topoff/gf2.hpp"
#include "topoff/lattice.hpp"
#include "topoff/noise.hpp"
#include "topoff/rng.hpp"
#include "topoff/tableau.hpp"

namespace topoff {

// ---- randomized-measurement datasets ---------------------------------------

/// One random local basis choice and the bitstrings recorded under it.
/// Bit q of each bitstring is qubit q's outcome (0 = +1 eigenvalue of the rotated Z).
struct RandomizedSetting {
    std::vector<std::uint8_t> cliffords;  // single-qubit Clifford index per qubit
    std::vector<std::uint64_t> bitstrings;
};

struct RandomizedMeasurementDataset {
    std::size_t n_qubits = 0;
    std::size_t n_m = 0;  // nominal shots per setting (heralded discards may leave fewer)
    std::vector<RandomizedSetting> settings;

    std::size_t n_u() const { return settings.size(); }

    void validate() const {
        if (n_qubits == 0 || n_qubits > 64) {
            throw std::invalid_argument("datasets support 1..64 qubits");
        }
        for (const auto& s : settings) {
            if (s.cliffords.size() != n_qubits) {
                throw std::invalid_argument("setting basis list length differs from qubit count");
            }
            for (auto b : s.bitstrings) {
                if (n_qubits < 64 && (b >> n_qubits) != 0) {
                    throw std::invalid_argument("bitstring longer than qubit count");
                }
            }
        }
    }

    /// Signed basis letter measured on qubit q of setting k, e.g. "+X" or "-Y".
    std::string basis_label(std::size_t k, std::size_t q) const {
        const auto& c = clifford1(settings[k].cliffords[q]);
        return std::string(c.sign > 0 ? "+" : "-") + pauli_char(c.basis);
    }

    /// One JSON record per shot: {"setting_id", "bases", "bitstring"}.
    void write_ndjson(std::ostream& out) const {
        for (std::size_t k = 0; k < settings.size(); ++k) {
            for (auto b : settings[k].bitstrings) {
                std::string bits(n_qubits, '0');
                for (std::size_t q = 0; q < n_qubits; ++q) {
                    bits[q] = ((b >> q) & 1) ? '1' : '0';
                }
                const nlohmann::json rec{{"setting_id", k}, {"bases", settings[k].cliffords}, {"bitstring", bits}};
                out << rec.dump() << '\n';
            }
        }
    }

    /// Inverse of write_ndjson. "bases" may also be a string of X/Y/Z letters.
    static RandomizedMeasurementDataset read_ndjson(std::istream& in) {
        RandomizedMeasurementDataset d;
        std::string line;
        std::size_t line_no = 0;
        std::map<std::size_t, std::size_t> counts;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            try {
                const auto rec = nlohmann::json::parse(line);
                const std::size_t id = rec.at("setting_id").get<std::size_t>();
                const std::string bits = rec.at("bitstring").get<std::string>();
                std::vector<std::uint8_t> bases;
                if (rec.at("bases").is_string()) {
                    for (char c : rec.at("bases").get<std::string>()) {
                        bases.push_back(clifford_for_basis(pauli_from_char(c)));
                    }
                } else {
                    bases = rec.at("bases").get<std::vector<std::uint8_t>>();
                }
                if (d.n_qubits == 0) {
                    d.n_qubits = bits.size();
                }
                if (bits.size() != d.n_qubits || bases.size() != d.n_qubits) {
                    throw std::invalid_argument("inconsistent record length");
                }
                if (id >= d.settings.size()) {
                    d.settings.resize(id + 1);
                }
                auto& s = d.settings[id];
                if (s.cliffords.empty()) {
                    s.cliffords = bases;
                } else if (s.cliffords != bases) {
                    throw std::invalid_argument("setting " + std::to_string(id) + " has conflicting bases");
                }
                std::uint64_t b = 0;
                for (std::size_t q = 0; q < bits.size(); ++q) {
                    if (bits[q] != '0' && bits[q] != '1') {
                        throw std::invalid_argument("bitstring must contain only 0/1");
                    }
                    b |= std::uint64_t(bits[q] == '1') << q;
                }
                s.bitstrings.push_back(b);
                ++counts[id];
            } catch (const std::exception& e) {
                throw std::invalid_argument("dataset line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        for (const auto& [id, c] : counts) {
            d.n_m = std::max(d.n_m, c);
        }
        d.validate();
        return d;
    }

    /// Clifford index whose measured basis is +P (identity word for Z).
    static std::uint8_t clifford_for_basis(Pauli1 p) {
        const auto& t = clifford1_table();
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k].basis == p && t[k].sign > 0) {
                return static_cast<std::uint8_t>(k);
            }
        }
        throw std::invalid_argument("no Clifford measures the identity");
    }
};

/// Measures every qubit of `state` in the basis selected by the Clifford indices
/// (rotate then read Z), applying readout noise when given. Returns the bitstring.
inline std::uint64_t measure_in_cliffords(StabilizerTableau& state, const std::vector<std::uint8_t>& cliffords, Rng& rng,
                                          const NoiseSpec* noise = nullptr) {
    std::uint64_t bits = 0;
    for (std::size_t q = 0; q < cliffords.size(); ++q) {
        apply_clifford1(state, q, cliffords[q]);
        bool b = state.measure_z(q, rng);
        if (noise != nullptr) {
            b = apply_readout_flip(*noise, b, rng);
        }
        bits |= std::uint64_t(b) << q;
    }
    return bits;
}

/// Collects n_u random settings of n_m shots. `prepare(rng)` returns a fresh
/// post-preparation state whose first n_qubits qubits are measured, or nullopt
/// for a heralded (discarded) shot. Shot (k, m) uses stream k * n_m + m.
inline RandomizedMeasurementDataset collect_randomized_dataset(
    std::size_t n_qubits, std::size_t n_u, std::size_t n_m, std::uint64_t seed,
    const std::function<std::optional<StabilizerTableau>(Rng&)>& prepare, const NoiseSpec* noise = nullptr) {
    RandomizedMeasurementDataset d;
    d.n_qubits = n_qubits;
    d.n_m = n_m;
    Rng basis_rng = shot_rng(derive_seed(seed, 0xBA5E), 0);
    for (std::size_t k = 0; k < n_u; ++k) {
        RandomizedSetting s;
        for (std::size_t q = 0; q < n_qubits; ++q) {
            s.cliffords.push_back(static_cast<std::uint8_t>(uniform_below(basis_rng, 24)));
        }
        for (std::size_t m = 0; m < n_m; ++m) {
            Rng rng = shot_rng(seed, k * n_m + m);
            auto state = prepare(rng);
            if (state) {
                s.bitstrings.push_back(measure_in_cliffords(*state, s.cliffords, rng, noise));
            }
        }
        d.settings.push_back(std::move(s));
    }
    return d;
}

// ---- purity and entropies ---------------------------------------------------

/// Purity estimate of one setting restricted to `subset`:
///   2^|A| sum_{s,s'} (-2)^(-D(s,s')) P(s) P(s'), with P(s)^2 replaced by the
///   unbiased P(P N - 1)/(N - 1).
inline double setting_purity(const RandomizedSetting& s, std::span<const std::size_t> subset) {
    const std::size_t k = subset.size();
    const std::size_t n = s.bitstrings.size();
    if (n < 2) {
        throw std::invalid_argument("purity estimate needs at least 2 shots per setting");
    }
    if (k > 20) {
        throw std::invalid_argument("subsystem too large for the purity estimator");
    }
    const std::size_t dim = std::size_t{1} << k;
    std::vector<double> p(dim, 0.0);
    for (auto b : s.bitstrings) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < k; ++j) {
            idx |= static_cast<std::size_t>((b >> subset[j]) & 1) << j;
        }
        p[idx] += 1.0;
    }
    for (auto& v : p) {
        v /= static_cast<double>(n);
    }
    // q = K^{(x)k} p with K = [[1, -1/2], [-1/2, 1]], applied one axis at a time.
    std::vector<double> q = p;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(i & bit)) {
                const double a = q[i];
                const double b = q[i | bit];
                q[i] = a - 0.5 * b;
                q[i | bit] = b - 0.5 * a;
            }
        }
    }
    const double nd = static_cast<double>(n);
    double sum = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        sum += p[i] * q[i] - p[i] * p[i] + p[i] * (p[i] * nd - 1) / (nd - 1);
    }
    return std::ldexp(sum, static_cast<int>(k));
}

/// Per-setting purity estimates (the bootstrap resamples these).
inline std::vector<double> setting_purities(const RandomizedMeasurementDataset& d, std::span<const std::size_t> subset) {
    for (std::size_t q : subset) {
        if (q >= d.n_qubits) {
            throw std::out_of_range("subset qubit outside the dataset");
        }
    }
    std::vector<double> out;
    for (const auto& s : d.settings) {
        out.push_back(setting_purity(s, subset));
    }
    return out;
}

inline double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double purity_estimate(const RandomizedMeasurementDataset& d, std::span<const std::size_t> subset) {
    if (subset.empty()) {
        return 1.0;
    }
    return mean_of(setting_purities(d, subset));
}

/// -ln(purity); +inf when statistical noise drives the purity estimate to <= 0.
inline double renyi2_from_purity(double purity) {
    return purity > 0 ? -std::log(purity) : std::numeric_limits<double>::infinity();
}

inline double renyi2_estimate(const RandomizedMeasurementDataset& d, std::span<const std::size_t> subset) {
    return renyi2_from_purity(purity_estimate(d, subset));
}

// ---- topological entanglement entropy -----------------------------------------

/// gamma = -(S_A + S_B + S_C - S_AB - S_AC - S_BC + S_ABC).
inline double tee(double s_a, double s_b, double s_c, double s_ab, double s_ac, double s_bc, double s_abc) {
    return -(s_a + s_b + s_c - s_ab - s_ac - s_bc + s_abc);
}

/// The seven subsystems A, B, C, AB, AC, BC, ABC of a region.
inline std::array<std::vector<std::size_t>, 7> tee_subsystems(const TeeRegion& r) {
    auto cat = [](std::vector<std::size_t> x, const std::vector<std::size_t>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    return {r.a, r.b, r.c, cat(r.a, r.b), cat(r.a, r.c), cat(r.b, r.c), cat(cat(r.a, r.b), r.c)};
}

inline double tee_from_entropies(const std::array<double, 7>& s) { return tee(s[0], s[1], s[2], s[3], s[4], s[5], s[6]); }

/// Exact gamma of a stabilizer state.
inline double tee_exact(const StabilizerTableau& state, const TeeRegion& r) {
    std::array<double, 7> s{};
    const auto subs = tee_subsystems(r);
    for (std::size_t k = 0; k < 7; ++k) {
        s[k] = state.renyi2(subs[k]);
    }
    return tee_from_entropies(s);
}

/// Estimated gamma from a randomized-measurement dataset, using only the settings in `use`
/// (all settings when empty).
inline double tee_estimate(const RandomizedMeasurementDataset& d, const TeeRegion& r,
                           const std::vector<std::size_t>& use = {}) {
    std::array<double, 7> s{};
    const auto subs = tee_subsystems(r);
    for (std::size_t k = 0; k < 7; ++k) {
        double sum = 0;
        std::size_t count = 0;
        auto add = [&](std::size_t idx) {
            sum += setting_purity(d.settings[idx], subs[k]);
            ++count;
        };
        if (use.empty()) {
            for (std::size_t i = 0; i < d.settings.size(); ++i) {
                add(i);
            }
        } else {
            for (auto i : use) {
                add(i);
            }
        }
        s[k] = renyi2_from_purity(sum / static_cast<double>(count));
    }
    return tee_from_entropies(s);
}

// ---- bootstrap -----------------------------------------------------------------

/// Standard deviation of `statistic` over resamples of the n unit indices
/// (drawn with replacement). The resampling unit is the randomized setting.
inline double bootstrap_error(std::size_t n_units, const std::function<double(const std::vector<std::size_t>&)>& statistic,
                              std::size_t n_resamples, std::uint64_t seed) {
    if (n_resamples < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 resamples");
    }
    if (n_units == 0) {
        throw std::invalid_argument("bootstrap over an empty dataset");
    }
    Rng rng = shot_rng(derive_seed(seed, 0xB007), 0);
    std::vector<double> values;
    values.reserve(n_resamples);
    std::vector<std::size_t> idx(n_units);
    for (std::size_t r = 0; r < n_resamples; ++r) {
        for (auto& i : idx) {
            i = uniform_below(rng, n_units);
        }
        values.push_back(statistic(idx));
    }
    const double m = mean_of(values);
    double var = 0;
    for (double v : values) {
        var += (v - m) * (v - m);
    }
    return std::sqrt(var / static_cast<double>(n_resamples - 1));
}

/// Bootstrap error of the mean of per-unit values.
inline double bootstrap_mean_error(const std::vector<double>& per_unit, std::size_t n_resamples, std::uint64_t seed) {
    return bootstrap_error(
        per_unit.size(),
        [&](const std::vector<std::size_t>& idx) {
            double s = 0;
            for (auto i : idx) {
                s += per_unit[i];
            }
            return s / static_cast<double>(idx.size());
        },
        n_resamples, seed);
}

// ---- SPAM mitigation ------------------------------------------------------------

/// Column-stochastic readout matrix A[observed][true].
using ReadoutMatrix = std::array<std::array<double, 2>, 2>;

inline ReadoutMatrix readout_matrix(const NoiseSpec& spec) {
    return {{{1 - spec.p01, spec.p10}, {spec.p01, 1 - spec.p10}}};
}

inline ReadoutMatrix invert(const ReadoutMatrix& a) {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (std::abs(det) < 1e-12) {
        throw std::invalid_argument("readout matrix is singular");
    }
    return {{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

/// Applies m^{(x)k} to a distribution over k-bit strings (index bit j = qubit j),
/// one axis at a time.
inline std::vector<double> apply_factorwise(std::vector<double> dist, const ReadoutMatrix& m) {
    const std::size_t dim = dist.size();
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("distribution length must be a power of two");
    }
    for (std::size_t bit = 1; bit < dim; bit <<= 1) {
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(i & bit)) {
                const double v0 = dist[i];
                const double v1 = dist[i | bit];
                dist[i] = m[0][0] * v0 + m[0][1] * v1;
                dist[i | bit] = m[1][0] * v0 + m[1][1] * v1;
            }
        }
    }
    return dist;
}

/// Recovers P_ideal from P_noise = A^{(x)n} P_ideal. Entries may come out slightly negative.
inline std::vector<double> spam_mitigate(const std::vector<double>& empirical, const ReadoutMatrix& a) {
    return apply_factorwise(empirical, invert(a));
}

// ---- shadow fidelity ----------------------------------------------------------

/// Classical-shadow estimate of <target|rho|target> from local Clifford snapshots.
/// Each snapshot contributes 2^-n sum over target stabilizers S readable in the
/// snapshot's bases of sign(S) 3^|S| (-1)^(outcome parity on S). Returns the mean
/// over snapshots and the per-setting means (for bootstrapping).
struct ShadowFidelity {
    double value = 0;
    std::vector<double> per_setting;
};

inline ShadowFidelity shadow_fidelity(const RandomizedMeasurementDataset& d, const StabilizerTableau& target) {
    const std::size_t n = d.n_qubits;
    if (target.num_qubits() != n) {
        throw std::invalid_argument("target qubit count differs from the dataset");
    }
    const auto gens = target.stabilizers();
    ShadowFidelity out;
    double total = 0;
    std::size_t shots = 0;
    for (const auto& s : d.settings) {
        // Group elements readable in these bases: the letter on every qubit is I or the basis.
        gf2::BitMatrix m(n, n);
        std::vector<Pauli1> basis(n);
        std::vector<int> bsign(n);
        for (std::size_t q = 0; q < n; ++q) {
            basis[q] = clifford1(s.cliffords[q]).basis;
            bsign[q] = clifford1(s.cliffords[q]).sign;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t q = 0; q < n; ++q) {
                const auto letter = gens[i].get(q);
                const bool anti = letter != Pauli1::I && letter != basis[q];
                m.set(i, q, anti);
            }
        }
        const auto null = gf2::left_nullspace(m);
        struct Term {
            double weight;
            std::uint64_t mask;
        };
        std::vector<Term> terms;
        const std::size_t dim = null.size();
        if (dim > 24) {
            throw std::invalid_argument("shadow fidelity: readable subgroup too large");
        }
        std::vector<PauliOperator> basis_elems;
        for (const auto& v : null) {
            PauliOperator el(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (bits::get(v, i)) {
                    el *= gens[i];
                }
            }
            basis_elems.push_back(std::move(el));
        }
        // Walk the subgroup in Gray-code order, one multiplication per element.
        PauliOperator el(n);
        const double norm = std::ldexp(1.0, -static_cast<int>(n));
        for (std::uint64_t step = 0; step < (std::uint64_t{1} << dim); ++step) {
            if (step > 0) {
                el *= basis_elems[static_cast<std::size_t>(std::countr_zero(step))];
            }
            std::uint64_t mask = 0;
            int sign = el.sign();
            double w = norm;
            for (std::size_t q : el.support()) {
                mask |= std::uint64_t{1} << q;
                w *= 3;
                sign *= bsign[q];
            }
            terms.push_back({sign * w, mask});
        }
        double setting_sum = 0;
        for (auto b : s.bitstrings) {
            double f = 0;
            for (const auto& t : terms) {
                f += (std::popcount(b & t.mask) & 1) ? -t.weight : t.weight;
            }
            setting_sum += f;
        }
        total += setting_sum;
        shots += s.bitstrings.size();
        out.per_setting.push_back(s.bitstrings.empty() ? 0.0 : setting_sum / static_cast<double>(s.bitstrings.size()));
    }
    out.value = shots ? total / static_cast<double>(shots) : 0.0;
    return out;
}

// ---- destructive expectation reports ---------------------------------------------

/// One destructive readout: the setting used and the data bits (bit q = qubit q).
struct ShotRecord {
    std::uint32_t setting = 0;
    std::uint64_t bits = 0;
    bool heralded = false;  // odd syndrome parity: discarded unless keep_all
};

struct ObservableStat {
    double mean = 0;
    double sem = 0;
    std::size_t shots = 0;
};

struct ExperimentReport {
    std::map<int, ObservableStat> stabilizers;
    std::map<std::string, ObservableStat> logicals;  // includes "<name>_avg"
    std::size_t shots_total = 0;
    std::size_t shots_kept = 0;
    double discard_fraction = 0;
    double energy_density = 0;  // -(mean of all stabilizer means)
    double mean_x = 0;          // mean over X-type plaquettes
    double mean_z = 0;          // mean over Z-type plaquettes
    double mean_defect = 0;     // mean over defect plaquettes (0 if none)
    bool mitigated = false;
    nlohmann::json metadata = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["shots_total"] = shots_total;
        j["shots_kept"] = shots_kept;
        j["discard_fraction"] = discard_fraction;
        j["energy_density"] = energy_density;
        j["mean_A"] = mean_x;
        j["mean_B"] = mean_z;
        j["mean_defect"] = mean_defect;
        j["mitigated"] = mitigated;
        auto stat = [](const ObservableStat& s) { return nlohmann::json{{"mean", s.mean}, {"sem", s.sem}, {"shots", s.shots}}; };
        j["stabilizers"] = nlohmann::json::object();
        for (const auto& [label, s] : stabilizers) {
            j["stabilizers"][std::to_string(label)] = stat(s);
        }
        j["logicals"] = nlohmann::json::object();
        for (const auto& [name, s] : logicals) {
            j["logicals"][name] = stat(s);
        }
        j["metadata"] = metadata;
        return j;
    }
};

struct ReportOptions {
    bool keep_all = false;                   // include heralded shots
    std::optional<ReadoutMatrix> mitigation;  // readout inversion applied per observable
};

namespace detail {

/// Accumulates per-shot values of one observable.
struct Accumulator {
    double sum = 0;
    double sum2 = 0;
    std::size_t n = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    ObservableStat stat() const {
        ObservableStat s;
        s.shots = n;
        if (n == 0) {
            return s;
        }
        s.mean = sum / static_cast<double>(n);
        if (n > 1) {
            const double var = std::max(0.0, (sum2 - static_cast<double>(n) * s.mean * s.mean) / static_cast<double>(n - 1));
            s.sem = std::sqrt(var / static_cast<double>(n));
        }
        return s;
    }
};

/// Per-shot estimator of a signed product observable over `mask`. Without
/// mitigation: sign * (-1)^parity. With mitigation: sign * prod_q u[b_q] where
/// u = (1, -1) A^{-1}; its average equals the expectation under spam_mitigate.
inline double shot_value(std::uint64_t bits, std::uint64_t mask, int sign, const std::optional<ReadoutMatrix>& inv) {
    if (!inv) {
        return (std::popcount(bits & mask) & 1) ? -sign : sign;
    }
    const double u0 = (*inv)[0][0] - (*inv)[1][0];
    const double u1 = (*inv)[0][1] - (*inv)[1][1];
    double v = sign;
    for (std::uint64_t m = mask; m; m &= m - 1) {
        const int q = std::countr_zero(m);
        v *= ((bits >> q) & 1) ? u1 : u0;
    }
    return v;
}

inline std::uint64_t support_mask(const PauliOperator& p) {
    std::uint64_t m = 0;
    for (std::size_t q : p.support()) {
        m |= std::uint64_t{1} << q;
    }
    return m;
}

}  // namespace detail

/// Stabilizer and logical means from destructive single-basis shots. Each record
/// contributes to the observables its setting can read; plaquettes appearing in
/// two settings pool both contributions.
inline ExperimentReport expectation_report(const std::vector<ShotRecord>& records,
                                           const std::vector<MeasurementSetting>& plan, const Lattice& lat,
                                           const ReportOptions& opt = {}) {
    if (const auto gaps = plan_gaps(lat, plan); !gaps.empty()) {
        throw std::invalid_argument("measurement plan leaves plaquette " + std::to_string(gaps.front()) + " unmeasured");
    }
    if (lat.num_qubits() > 64) {
        throw std::invalid_argument("reports support up to 64 data qubits");
    }
    std::optional<ReadoutMatrix> inv;
    if (opt.mitigation) {
        inv = invert(*opt.mitigation);
    }
    std::map<int, detail::Accumulator> stab;
    std::map<std::string, detail::Accumulator> logi;
    ExperimentReport rep;
    rep.shots_total = records.size();
    for (const auto& r : records) {
        if (r.heralded && !opt.keep_all) {
            continue;
        }
        ++rep.shots_kept;
        if (r.setting >= plan.size()) {
            throw std::out_of_range("record refers to an unknown setting");
        }
        const auto& s = plan[r.setting];
        for (int label : s.labels) {
            const auto& op = lat.plaquette(label).op;
            stab[label].add(detail::shot_value(r.bits, detail::support_mask(op), op.sign(), inv));
        }
        for (const auto& key : s.logicals) {
            const auto& op = logical_by_key(lat, key);
            logi[key].add(detail::shot_value(r.bits, detail::support_mask(op), op.sign(), inv));
        }
    }
    rep.discard_fraction =
        rep.shots_total ? 1.0 - static_cast<double>(rep.shots_kept) / static_cast<double>(rep.shots_total) : 0.0;
    double all = 0;
    std::size_t observed = 0;
    std::map<PlaquetteKind, std::pair<double, int>> by_kind;
    for (const auto& p : lat.plaquettes) {
        const auto st = stab[p.label].stat();
        rep.stabilizers[p.label] = st;
        if (st.shots == 0) {
            continue;  // never in a kept shot's readout basis; averages cover observed terms only
        }
        ++observed;
        all += st.mean;
        by_kind[p.kind].first += st.mean;
        by_kind[p.kind].second += 1;
    }
    auto avg = [&](PlaquetteKind k) { return by_kind[k].second ? by_kind[k].first / by_kind[k].second : 0.0; };
    rep.mean_x = avg(PlaquetteKind::X);
    rep.mean_z = avg(PlaquetteKind::Z);
    rep.mean_defect = avg(PlaquetteKind::Defect);
    rep.energy_density = observed ? -all / static_cast<double>(observed) : 0.0;
    for (const auto& l : lat.logicals) {
        detail::Accumulator pooled;
        double mean_sum = 0;
        for (std::size_t t = 0; t < l.translations.size(); ++t) {
            const std::string key = t == 0 ? l.name : l.name + "[" + std::to_string(t) + "]";
            const auto st = logi[key].stat();
            rep.logicals[key] = st;
            mean_sum += st.mean;
            pooled.sum += logi[key].sum;
            pooled.sum2 += logi[key].sum2;
            pooled.n += logi[key].n;
        }
        auto avg_stat = pooled.stat();
        avg_stat.mean = mean_sum / static_cast<double>(l.translations.size());
        rep.logicals[l.name + "_avg"] = avg_stat;
    }
    rep.mitigated = opt.mitigation.has_value();
    return rep;
}

/// Reads a post-preparation state destructively in a setting's bases (first
/// lat-qubits of the state), with optional gate and readout noise.
inline std::uint64_t destructive_readout(StabilizerTableau& state, const MeasurementSetting& s, Rng& rng,
                                         const NoiseSpec* noise = nullptr) {
    std::uint64_t bits = 0;
    for (std::size_t q = 0; q < s.bases.size(); ++q) {
        const char b = s.bases[q];
        if (b == 'X') {
            state.h(q);
        } else if (b == 'Y') {
            state.sdg(q);
            state.h(q);
        }
        if (noise != nullptr && b != 'Z') {
            if (auto e = sample_gate_error(*noise, 1, rng)) {
                const auto letter = e->get(0);
                letter == Pauli1::X ? state.x(q) : letter == Pauli1::Y ? state.y(q) : state.z(q);
            }
        }
        bool bit = state.measure_z(q, rng);
        if (noise != nullptr) {
            bit = apply_readout_flip(*noise, bit, rng);
        }
        bits |= std::uint64_t(bit) << q;
    }
    return bits;
}

}  // namespace topoff

#endif  // TOPOFF_ESTIMATORS_HPP
