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

// Command-line front end. Exit codes: 0 success, 2 configuration error, 1 runtime error.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topoff/topoff.hpp"

#ifndef TOPOFF_DEFAULT_CONFIG_DIR
#define TOPOFF_DEFAULT_CONFIG_DIR "."
#endif

namespace topoff::cli {

inline constexpr int kSchema = 1;
inline constexpr const char* kVersion = "0.1.0";

/// Bad flags, unreadable or invalid input files: exit code 2.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;
using nlohmann::json;

inline fs::path config_dir() {
    if (const char* env = std::getenv("TOPOFF_CONFIG_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return TOPOFF_DEFAULT_CONFIG_DIR;
}

/// A path as given, else relative to the config dir, else with ".json" appended there.
inline fs::path resolve_file(const std::string& name) {
    if (fs::is_regular_file(name)) {
        return name;
    }
    for (const fs::path& p : {config_dir() / name, config_dir() / (name + ".json")}) {
        if (fs::is_regular_file(p)) {
            return p;
        }
    }
    throw ConfigError("cannot find '" + name + "' (config dir " + config_dir().string() + ")");
}

inline json read_json_file(const std::string& name) {
    const fs::path p = resolve_file(name);
    std::ifstream in(p);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

inline std::optional<NoiseSpec> load_noise(const std::string& name) {
    if (name == "none") {
        return std::nullopt;
    }
    try {
        return NoiseSpec::from_json(read_json_file(name));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

inline Lattice load_lattice(const std::string& name) {
    try {
        return build_lattice(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline PrepStrategy load_strategy(const std::string& path, const Lattice& lat) {
    if (path.empty()) {
        return default_strategy(lat);
    }
    try {
        return strategy_from_json(read_json_file(path), lat);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Opens `path` for writing, or returns `fallback` when the path is empty.
class Sink {
   public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw ConfigError("cannot write '" + path + "'");
            }
            out_ = &file_;
        }
    }
    std::ostream& operator*() { return *out_; }

   private:
    std::ofstream file_;
    std::ostream* out_;
};

inline std::string bit_string(std::uint64_t bits, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t q = 0; q < n; ++q) {
        if ((bits >> q) & 1) {
            s[q] = '1';
        }
    }
    return s;
}

inline std::uint64_t parse_bit_string(const std::string& s) {
    if (s.size() > 64) {
        throw ConfigError("bitstring longer than 64 bits");
    }
    std::uint64_t v = 0;
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (s[q] == '1') {
            v |= std::uint64_t{1} << q;
        } else if (s[q] != '0') {
            throw ConfigError("bitstring '" + s + "' has characters other than 0/1");
        }
    }
    return v;
}

inline void write_records(std::ostream& out, const std::vector<ShotRecord>& records, std::size_t n) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << json{{"shot", i},
                    {"setting", records[i].setting},
                    {"bits", bit_string(records[i].bits, n)},
                    {"heralded", records[i].heralded}}
                   .dump()
            << '\n';
    }
}

inline std::vector<ShotRecord> read_records(const std::string& path) {
    std::ifstream in(resolve_file(path));
    std::vector<ShotRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            out.push_back({j.at("setting").get<std::uint32_t>(), parse_bit_string(j.at("bits").get<std::string>()),
                           j.value("heralded", false)});
        } catch (const json::exception& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<std::size_t> parse_subset(const std::string& text, std::size_t n) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size() || v >= n) {
            throw ConfigError("bad qubit '" + tok + "' in subset '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("empty subset");
    }
    return out;
}

struct Common {
    std::string lattice = "torus4x4";
    std::string noise = "none";
    std::uint64_t seed = 0;
    std::size_t shots = 1000;
    std::size_t threads = 1;
    std::string out;
    std::string csv;
    std::string strategy;
    bool canonical = false;
    bool keep_all = false;
};

inline void add_common(CLI::App* app, Common& c, bool stochastic) {
    app->add_option("--lattice", c.lattice, "torus4x4 | defect")->capture_default_str();
    app->add_option("--noise", c.noise, "noise spec JSON (path or name in the config dir), or 'none'")
        ->capture_default_str();
    if (stochastic) {
        app->add_option("--seed", c.seed, "RNG seed (required)")->required();
        app->add_option("--shots", c.shots, "shots")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--threads", c.threads, "shot-parallel workers; results do not depend on it")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_option("--strategy", c.strategy, "preparation strategy JSON");
    }
    app->add_option("--out", c.out, "JSON report path (default stdout)");
    app->add_option("--csv", c.csv, "plot-ready CSV path");
    app->add_flag("--canonical", c.canonical, "omit the timestamp so reports are byte-identical");
}

/// Report envelope shared by every subcommand.
inline json envelope(const std::string& command, const Common& c, const std::optional<NoiseSpec>& noise, json result,
                     bool stochastic = true) {
    json j;
    j["schema"] = kSchema;
    j["tool"] = std::string("topoff ") + kVersion;
    j["command"] = command;
    json cfg;
    cfg["lattice"] = c.lattice;
    cfg["noise"] = noise ? noise->to_json() : json(nullptr);
    if (stochastic) {
        cfg["seed"] = c.seed;
        cfg["shots"] = c.shots;
    }
    j["config"] = cfg;
    j["result"] = std::move(result);
    if (!c.canonical) {
        j["timestamp"] = utc_timestamp();
    }
    return j;
}

inline void emit(const json& j, const Common& c, std::ostream& out) {
    Sink s(c.out, out);
    *s << j.dump(2) << '\n';
}

inline PrepOptions prep_options(const Common& c, bool keep_all) {
    PrepOptions o;
    o.threads = c.threads;
    o.keep_all = keep_all;
    return o;
}

inline const NoiseSpec* ptr(const std::optional<NoiseSpec>& n) { return n ? &*n : nullptr; }

// ---- subcommands ---------------------------------------------------------------

inline int cmd_prepare(const Common& c, bool mitigate, const std::string& records_out, const std::string& circuit_out,
                       bool native, bool qasm2, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    const auto noise = load_noise(c.noise);
    const PrepStrategy strategy = load_strategy(c.strategy, lat);
    PrepOptions opt = prep_options(c, c.keep_all);
    if (mitigate) {
        opt.mitigation = readout_matrix(noise.value_or(NoiseSpec::none()));
    }
    const auto run = prepare_ground_state(lat, strategy, ptr(noise), c.seed, c.shots, opt);
    if (!records_out.empty()) {
        Sink s(records_out, out);
        write_records(*s, run.records, lat.num_qubits());
    }
    if (!circuit_out.empty()) {
        Circuit circ = build_prep_program(lat, strategy).circuit;
        if (native) {
            circ = compile_to_native(circ).first;
        }
        if (qasm2) {
            circ = expand_parity_conditions(circ);
        }
        Sink s(circuit_out, out);
        *s << serialize(circ);
    }
    json result = run.report.to_json();
    emit(envelope("prepare", c, noise, result), c, out);
    if (!c.csv.empty()) {
        Sink s(c.csv, out);
        *s << "label,kind,mean,sem,shots\n";
        for (const auto& [l, st] : run.report.stabilizers) {
            *s << l << ',' << kind_name(lat.plaquette(l).kind) << ',' << st.mean << ',' << st.sem << ',' << st.shots
               << '\n';
        }
    }
    return 0;
}

inline RandomizedMeasurementDataset entropy_dataset(const Common& c, const Lattice& lat,
                                                    const std::optional<NoiseSpec>& noise, std::size_t nu,
                                                    std::size_t nm, const std::string& dataset_in,
                                                    const std::string& dataset_out, std::ostream& out) {
    RandomizedMeasurementDataset d;
    if (!dataset_in.empty()) {
        std::ifstream in(resolve_file(dataset_in));
        try {
            d = RandomizedMeasurementDataset::read_ndjson(in);
        } catch (const std::exception& e) {
            throw ConfigError(dataset_in + ": " + e.what());
        }
    } else {
        const auto prog = build_prep_program(lat, load_strategy(c.strategy, lat));
        const auto native = compile_to_native(prog.circuit).first;
        const bool keep_all = c.keep_all;
        d = collect_randomized_dataset(
            lat.num_qubits(), nu, nm, c.seed,
            [&](Rng& rng) -> std::optional<StabilizerTableau> {
                auto shot = run_prep_shot(prog, native, rng, ptr(noise));
                if (shot.syndrome.heralded && !keep_all) {
                    return std::nullopt;
                }
                return std::move(shot.state);
            },
            ptr(noise));
    }
    if (!dataset_out.empty()) {
        Sink s(dataset_out, out);
        d.write_ndjson(*s);
    }
    return d;
}

inline int cmd_entropy(const Common& c, std::size_t nu, std::size_t nm, const std::vector<std::string>& subsets,
                       std::size_t resamples, const std::string& dataset_in, const std::string& dataset_out,
                       std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    const auto noise = load_noise(c.noise);
    const auto d = entropy_dataset(c, lat, noise, nu, nm, dataset_in, dataset_out, out);
    const auto exact_state = reference_ground_state(lat);
    json rows = json::array();
    std::vector<std::string> texts = subsets.empty() ? std::vector<std::string>{"0,1,4,5"} : subsets;
    for (const auto& text : texts) {
        const auto sub = parse_subset(text, d.n_qubits);
        const auto per = setting_purities(d, sub);
        const double purity = mean_of(per);
        const double err = bootstrap_mean_error(per, resamples, c.seed);
        rows.push_back({{"subset", sub},
                        {"purity", purity},
                        {"purity_err", err},
                        {"renyi2", renyi2_from_purity(purity)},
                        {"renyi2_err", purity > 0 ? json(err / purity) : json(nullptr)},
                        {"renyi2_exact_ideal", exact_state.renyi2(sub)}});
    }
    json result{{"n_u", d.n_u()}, {"n_m", d.n_m}, {"subsets", rows}};
    emit(envelope("entropy", c, noise, result), c, out);
    if (!c.csv.empty()) {
        Sink s(c.csv, out);
        *s << "subset,purity,purity_err,renyi2,renyi2_exact_ideal\n";
        for (const auto& r : rows) {
            std::string sub;
            for (const auto& q : r["subset"]) {
                sub += (sub.empty() ? "" : " ") + std::to_string(q.get<std::size_t>());
            }
            *s << sub << ',' << r["purity"].get<double>() << ',' << r["purity_err"].get<double>() << ','
               << r["renyi2"].get<double>() << ',' << r["renyi2_exact_ideal"].get<double>() << '\n';
        }
    }
    return 0;
}

inline int cmd_tee(const Common& c, std::size_t nu, std::size_t nm, const std::string& shape, bool all_regions,
                   std::size_t index, std::size_t resamples, const std::string& dataset_in,
                   const std::string& dataset_out, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    if (!lat.is_torus()) {
        throw ConfigError("tee regions are defined on the torus");
    }
    const auto noise = load_noise(c.noise);
    std::vector<TeeRegion> regions;
    for (const auto& [name, list] : {std::pair{"2x2", tee_regions_2x2(lat)}, {"2x3", tee_regions_2x3(lat)}}) {
        if (shape != "all" && shape != name) {
            continue;
        }
        if (all_regions) {
            regions.insert(regions.end(), list.begin(), list.end());
        } else {
            if (index >= list.size()) {
                throw ConfigError("region index out of range for " + std::string(name));
            }
            regions.push_back(list[index]);
        }
    }
    if (regions.empty()) {
        throw ConfigError("unknown region shape '" + shape + "' (2x2, 2x3 or all)");
    }
    const auto d = entropy_dataset(c, lat, noise, nu, nm, dataset_in, dataset_out, out);
    const auto gs = reference_ground_state(lat);
    json rows = json::array();
    for (const auto& r : regions) {
        const double g = tee_estimate(d, r);
        const double err = bootstrap_error(
            d.n_u(), [&](const std::vector<std::size_t>& idx) { return tee_estimate(d, r, idx); }, resamples,
            c.seed);
        rows.push_back({{"region", r.name},
                        {"gamma", g},
                        {"gamma_over_ln2", g / std::log(2.0)},
                        {"err_over_ln2", err / std::log(2.0)},
                        {"exact_over_ln2", tee_exact(gs, r) / std::log(2.0)}});
    }
    emit(envelope("tee", c, noise, {{"n_u", d.n_u()}, {"n_m", d.n_m}, {"regions", rows}}), c, out);
    if (!c.csv.empty()) {
        Sink s(c.csv, out);
        *s << "region,gamma_over_ln2,err_over_ln2,exact_over_ln2\n";
        for (const auto& r : rows) {
            *s << r["region"].get<std::string>() << ',' << r["gamma_over_ln2"].get<double>() << ','
               << r["err_over_ln2"].get<double>() << ',' << r["exact_over_ln2"].get<double>() << '\n';
        }
    }
    return 0;
}

inline int cmd_transmute(const Common& c, bool discard, const std::string& script_path, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    if (lat.is_torus()) {
        throw ConfigError("transmutation runs on the defect lattice");
    }
    const auto noise = load_noise(c.noise);
    std::optional<DynamicsScript> script;
    if (!script_path.empty()) {
        try {
            script = DynamicsScript::from_json(read_json_file(script_path));
        } catch (const std::exception& e) {
            throw ConfigError(script_path + ": " + e.what());
        }
    }
    PrepOptions opt = prep_options(c, !discard);
    std::vector<TransmutationStep> steps;
    try {
        steps = run_transmutation(lat, ptr(noise), c.seed, c.shots, opt, script ? &*script : nullptr);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    json arr = json::array();
    for (const auto& st : steps) {
        json moves = json::array();
        for (const auto& m : st.moves) {
            moves.push_back(m.str());
        }
        arr.push_back({{"moves", moves}, {"expected_minus", minus_of(st.expected)}, {"report", st.report.to_json()}});
    }
    emit(envelope("transmute", c, noise, {{"shots_per_step", c.shots}, {"steps", arr}}), c, out);
    if (!c.csv.empty()) {
        Sink s(c.csv, out);
        *s << "step,move,label,expected,mean,sem\n";
        for (std::size_t k = 0; k < steps.size(); ++k) {
            for (const auto& [l, st] : steps[k].report.stabilizers) {
                *s << k + 1 << ',' << steps[k].moves.back().str() << ',' << l << ',' << steps[k].expected.at(l) << ','
                   << st.mean << ',' << st.sem << '\n';
            }
        }
    }
    return 0;
}

inline int cmd_qnd(const Common& c, int repeats, bool discard, const std::string& traj_path, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    if (lat.is_torus()) {
        throw ConfigError("the QND trace runs on the defect lattice");
    }
    const auto noise = load_noise(c.noise);
    const auto script = qnd_script(repeats);
    const auto t = run_qnd_trace(lat, ptr(noise), c.seed, c.shots, prep_options(c, !discard), &script);
    if (!traj_path.empty()) {
        Sink s(traj_path, out);
        for (std::size_t i = 0; i < t.shots.size(); ++i) {
            const auto& sh = t.shots[i];
            *s << json{{"shot", i},
                       {"heralded", sh.heralded},
                       {"checkpoints", sh.outcomes},
                       {"setting", sh.setting},
                       {"final_bits", bit_string(sh.final_bits, lat.num_qubits())}}
                      .dump()
               << '\n';
        }
    }
    json cps = json::array();
    for (std::size_t k = 0; k < t.means.size(); ++k) {
        json means = json::object();
        for (const auto& [l, v] : t.means[k]) {
            means[std::to_string(l)] = v;
        }
        json expected = json::object();
        for (const auto& [l, v] : t.means[k]) {
            expected[std::to_string(l)] = t.expected[k].at(l);
        }
        cps.push_back({{"expected", expected}, {"means", means}});
    }
    json result{{"script", t.script.to_json()},
                {"checkpoints", cps},
                {"final", t.final_report.to_json()},
                {"preparations", t.preparations},
                {"destructive_preparations", t.destructive_preparations}};
    emit(envelope("qnd", c, noise, result), c, out);
    return 0;
}

inline int cmd_braid(const Common& c, const std::string& which, bool discard, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    if (lat.is_torus()) {
        throw ConfigError("braiding runs on the defect lattice");
    }
    const auto noise = load_noise(c.noise);
    json result = json::object();
    for (const auto& [name, with] : {std::pair{"with_fermion", true}, {"without_fermion", false}}) {
        if (which != "both" && which != (with ? "with" : "without")) {
            continue;
        }
        // Independent streams for the two experiments.
        const auto r = run_braid_interferometry(lat, with, ptr(noise), derive_seed(c.seed, with ? 1 : 2), c.shots,
                                                prep_options(c, !discard));
        result[name] = {{"mean", r.mean}, {"sem", r.sem}, {"shots_total", r.shots_total}, {"shots_kept", r.shots_kept}};
    }
    emit(envelope("braid", c, noise, result), c, out);
    return 0;
}

inline int cmd_budget(const Common& c, double n2q, double n1q, double depth, double qubits, double spam_events,
                      bool noise_given, std::ostream& out) {
    NoiseSpec spec = NoiseSpec::h1_1();
    if (noise_given) {
        spec = load_noise(c.noise).value_or(NoiseSpec::none());
    } else if (auto f = config_dir() / "h1-1.json"; fs::is_regular_file(f)) {
        spec = *load_noise(f.string());
    }
    const double d = error_budget(n2q, n1q, depth, qubits, spam_events, spec);
    json result{{"damping", d},
                {"inputs", {{"n2q", n2q}, {"n1q", n1q}, {"depth", depth}, {"qubits", qubits}, {"spam_events", spam_events}}}};
    json j;
    j["schema"] = kSchema;
    j["tool"] = std::string("topoff ") + kVersion;
    j["command"] = "budget";
    j["config"] = {{"noise", spec.to_json()}};
    j["result"] = result;
    if (!c.canonical) {
        j["timestamp"] = utc_timestamp();
    }
    emit(j, c, out);
    return 0;
}

inline int cmd_sweep(const Common& c, const std::string& param, double from, double to, std::size_t steps,
                     std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    const auto noise = load_noise(c.noise);
    const PrepStrategy strategy = load_strategy(c.strategy, lat);
    NoiseSpec base = noise.value_or(NoiseSpec::none());
    try {
        base.set(param, from);
        base.set(param, to);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    json rows = json::array();
    std::ostringstream csv;
    csv << "param,value,energy_density,mean_A,mean_B,mean_defect,discard_fraction,shots_kept\n";
    for (std::size_t k = 0; k < steps; ++k) {
        const double v = steps == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(steps - 1);
        NoiseSpec spec = base;
        spec.set(param, v);
        const auto run = prepare_ground_state(lat, strategy, &spec, c.seed, c.shots, prep_options(c, c.keep_all));
        const auto& r = run.report;
        rows.push_back({{"value", v}, {"energy_density", r.energy_density}, {"discard_fraction", r.discard_fraction}});
        csv << param << ',' << v << ',' << r.energy_density << ',' << r.mean_x << ',' << r.mean_z << ','
            << r.mean_defect << ',' << r.discard_fraction << ',' << r.shots_kept << '\n';
    }
    if (!c.csv.empty() || c.out.empty()) {
        Sink s(c.csv, out);
        *s << csv.str();
    }
    if (!c.out.empty()) {
        emit(envelope("sweep", c, noise, {{"param", param}, {"points", rows}}), c, out);
    }
    return 0;
}

inline int cmd_mitigate(const Common& c, const std::string& records_path, std::ostream& out) {
    const Lattice lat = load_lattice(c.lattice);
    const auto noise = load_noise(c.noise);
    if (!noise) {
        throw ConfigError("mitigation needs a noise spec with readout rates");
    }
    const auto plan = measurement_plan(lat);
    std::vector<ShotRecord> records;
    if (!records_path.empty()) {
        records = read_records(records_path);
        for (const auto& r : records) {
            if (r.setting >= plan.size()) {
                throw ConfigError("record setting out of range for " + lat.name);
            }
        }
    } else {
        records = prepare_ground_state(lat, load_strategy(c.strategy, lat), ptr(noise), c.seed, c.shots,
                                       prep_options(c, c.keep_all))
                      .records;
    }
    const auto raw = expectation_report(records, plan, lat, {c.keep_all, std::nullopt});
    const auto mit = expectation_report(records, plan, lat, {c.keep_all, readout_matrix(*noise)});
    json result{{"raw", raw.to_json()},
                {"mitigated", mit.to_json()},
                {"energy_change", mit.energy_density - raw.energy_density}};
    emit(envelope("mitigate", c, noise, result, records_path.empty()), c, out);
    return 0;
}

/// Entry point. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"topoff: toric-code preparation with feed-forward, entropies and anyon dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("topoff ") + kVersion);

    Common c;
    bool mitigate_flag = false, native = false, qasm2 = false, all_regions = false, discard = false;
    std::string records_out, circuit_out, dataset_in, dataset_out, shape = "all", records_in, script_path, traj,
        which = "both", param;
    std::size_t nu = 72, nm = 256, resamples = 200, index = 0, steps = 11;
    std::vector<std::string> subsets;
    int repeats = 1;
    double n2q = 0, n1q = 0, depth = 0, qubits = 0, spam_events = 0, from = 0, to = 0;

    auto* prepare = app.add_subcommand("prepare", "prepare the ground state and report stabilizers");
    add_common(prepare, c, true);
    prepare->add_flag("--keep-all", c.keep_all, "keep heralded shots in the report");
    prepare->add_flag("--mitigate", mitigate_flag, "invert the readout matrix in the report");
    prepare->add_option("--records-out", records_out, "per-shot records (NDJSON)");
    prepare->add_option("--emit-circuit", circuit_out, "write the preparation circuit (text format)");
    prepare->add_flag("--native", native, "emit the native-gate circuit");
    prepare->add_flag("--qasm2-conditions", qasm2, "expand parity conditions into register equality tests");

    auto add_dataset = [&](CLI::App* a) {
        a->add_option("--nu", nu, "random settings")->capture_default_str()->check(CLI::PositiveNumber);
        a->add_option("--nm", nm, "shots per setting")->capture_default_str()->check(CLI::Range(2, 1 << 30));
        a->add_option("--bootstrap", resamples, "bootstrap resamples")->capture_default_str()->check(CLI::Range(100, 100000));
        a->add_option("--dataset-in", dataset_in, "read a randomized-measurement dataset (NDJSON) instead of simulating");
        a->add_option("--dataset-out", dataset_out, "write the dataset (NDJSON)");
        a->add_flag("--keep-all", c.keep_all, "keep heralded shots");
    };
    auto* entropy = app.add_subcommand("entropy", "second Renyi entropies from randomized measurements");
    add_common(entropy, c, true);
    add_dataset(entropy);
    entropy->add_option("--subset", subsets, "comma-separated qubits, repeatable (default 0,1,4,5)");

    auto* tee = app.add_subcommand("tee", "topological entanglement entropy from randomized measurements");
    add_common(tee, c, true);
    add_dataset(tee);
    tee->add_option("--shape", shape, "2x2 | 2x3 | all")->capture_default_str();
    tee->add_option("--region-index", index, "region within each shape")->capture_default_str();
    tee->add_flag("--all-regions", all_regions, "every region of the chosen shapes");

    auto* transmute = app.add_subcommand("transmute", "anyon transmutation with destructive readout per step");
    add_common(transmute, c, true);
    transmute->add_flag("--discard-heralded", discard, "drop odd-syndrome shots");
    transmute->add_option("--script", script_path, "dynamics script JSON");

    auto* qnd = app.add_subcommand("qnd", "single-shot anyon trajectories with QND checkpoints");
    add_common(qnd, c, true);
    qnd->add_option("--repeats", repeats, "back-to-back checks per checkpoint")->capture_default_str()->check(CLI::PositiveNumber);
    qnd->add_flag("--discard-heralded", discard, "drop odd-syndrome shots");
    qnd->add_option("--trajectories", traj, "per-shot trajectories (NDJSON)");

    auto* braid = app.add_subcommand("braid", "Hadamard-test braiding interferometry");
    add_common(braid, c, true);
    braid->add_option("--fermion", which, "with | without | both")->capture_default_str()->check(CLI::IsMember({"with", "without", "both"}));
    braid->add_flag("--discard-heralded", discard, "drop odd-syndrome shots");

    auto* budget = app.add_subcommand("budget", "closed-form error budget");
    add_common(budget, c, false);
    budget->add_option("--n2q", n2q, "two-qubit gates")->required()->check(CLI::NonNegativeNumber);
    budget->add_option("--n1q", n1q, "one-qubit gates")->required()->check(CLI::NonNegativeNumber);
    budget->add_option("--depth", depth, "depth")->required()->check(CLI::NonNegativeNumber);
    budget->add_option("--qubits", qubits, "qubits")->required()->check(CLI::NonNegativeNumber);
    budget->add_option("--spam-events", spam_events, "SPAM events")->required()->check(CLI::NonNegativeNumber);

    auto* sweep = app.add_subcommand("sweep", "energy density versus one noise parameter (CSV)");
    add_common(sweep, c, true);
    sweep->add_option("--param", param, "noise field: p1 p2 z_bias p01 p10 mem spam")->required();
    sweep->add_option("--from", from, "first value")->required();
    sweep->add_option("--to", to, "last value")->required();
    sweep->add_option("--steps", steps, "points")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_flag("--keep-all", c.keep_all, "keep heralded shots");

    auto* mitigate = app.add_subcommand("mitigate", "readout-error mitigation of stabilizer reports");
    add_common(mitigate, c, false);
    mitigate->add_option("--records", records_in, "records from prepare --records-out (else simulate)");
    mitigate->add_option("--seed", c.seed, "RNG seed (required without --records)");
    mitigate->add_option("--shots", c.shots, "shots")->capture_default_str()->check(CLI::PositiveNumber);
    mitigate->add_option("--threads", c.threads, "workers")->capture_default_str()->check(CLI::PositiveNumber);
    mitigate->add_option("--strategy", c.strategy, "preparation strategy JSON");
    mitigate->add_flag("--keep-all", c.keep_all, "keep heralded shots");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "topoff " << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }
    try {
        for (auto* a : {transmute, qnd, braid}) {
            if (a->parsed() && a->count("--lattice") == 0) {
                c.lattice = "defect";  // anyon experiments live on the defect lattice
            }
        }
        if (mitigate->parsed() && records_in.empty() && mitigate->count("--seed") == 0) {
            throw ConfigError("mitigate needs --seed unless --records is given");
        }
        if (prepare->parsed()) {
            return cmd_prepare(c, mitigate_flag, records_out, circuit_out, native, qasm2, out);
        }
        if (entropy->parsed()) {
            return cmd_entropy(c, nu, nm, subsets, resamples, dataset_in, dataset_out, out);
        }
        if (tee->parsed()) {
            return cmd_tee(c, nu, nm, shape, all_regions, index, resamples, dataset_in, dataset_out, out);
        }
        if (transmute->parsed()) {
            return cmd_transmute(c, discard, script_path, out);
        }
        if (qnd->parsed()) {
            return cmd_qnd(c, repeats, discard, traj, out);
        }
        if (braid->parsed()) {
            return cmd_braid(c, which, discard, out);
        }
        if (budget->parsed()) {
            return cmd_budget(c, n2q, n1q, depth, qubits, spam_events, budget->count("--noise") > 0, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(c, param, from, to, steps, out);
        }
        if (mitigate->parsed()) {
            return cmd_mitigate(c, records_in, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace topoff::cli
