// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The fcarray Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fcarray/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "fcarray/parallel.hpp"

#ifndef FCARRAY_VERSION
#define FCARRAY_VERSION "0.0.0"
#endif

namespace fca {

using nlohmann::json;

std::string version() { return FCARRAY_VERSION; }

const std::vector<std::string>& rate_schemes() {
    static const std::vector<std::string> s{"fc-optimized", "fixed-coupler", "active-only", "fully-active"};
    return s;
}

const std::vector<std::string>& estimation_schemes() {
    static const std::vector<std::string> s{"centralized", "distributed", "exhaustive"};
    return s;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw Error(Errc::config, path + ": " + why);
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Scenario& s) {
    json j;
    j["layout"] = {{"M", s.layout.M},   {"N", s.layout.N},         {"d_y", s.layout.d_y},
                   {"A", s.layout.A},   {"d_min", s.layout.d_min}, {"f_c", s.layout.f_c}};
    j["dipole"] = {{"self_impedance", complex_json(s.self_impedance)},
                   {"load_impedance", complex_json(s.load_impedance)}};
    j["channel"] = {{"K", s.K}, {"L", s.L}};
    j["rate"] = {{"p_max_dbm", s.p_max_dbm}, {"snr_db", s.snr_db}, {"power_dbm", s.power_dbm},
                 {"users", s.users},         {"region", s.region}, {"couplers", s.couplers}};
    j["optimizer"] = {{"eta0_scale", s.eta0_scale},         {"backtrack_factor", s.backtrack_factor},
                      {"max_backtracks", s.max_backtracks}, {"alpha_rule", s.alpha_rule},
                      {"alpha_constant", s.alpha_constant}, {"eps_stop", s.eps_stop},
                      {"T_max", s.T_max},                   {"fd_step", s.fd_step}};
    j["estimation"] = {{"V", s.V},           {"tau", s.tau},           {"G", s.G},
                       {"eta", s.eta},       {"eps_n", s.eps_n},       {"D", s.D},
                       {"snr_db", s.est_snr_db}, {"snr_grid", s.snr_grid}, {"tau_grid", s.tau_grid},
                       {"eval_placements", s.eval_placements}};
    j["heatmap"] = {{"antenna", s.heatmap_antenna}, {"resolution", s.heatmap_resolution}};
    j["seeds"] = {{"first", s.first_seed}, {"rate_trials", s.rate_trials}, {"nmse_trials", s.nmse_trials}};
    j["schemes"] = s.schemes;
    j["workers"] = s.workers;
    return j;
}

template <class T>
void read(const json& j, const std::string& section, const std::string& key, T& out) {
    const std::string path = section.empty() ? key : section + "." + key;
    const json& v = section.empty() ? j.at(key) : j.at(section).at(key);
    try {
        out = v.get<T>();
    } catch (const json::exception&) {
        bad(path, "has the wrong type");
    }
}

cplx read_complex(const json& j, const std::string& key) {
    std::vector<double> v;
    read(j, "dipole", key, v);
    if (v.size() != 2) bad("dipole." + key, "expects [re, im]");
    return {v[0], v[1]};
}

Scenario from_json(const json& j) {
    Scenario s;
    read(j, "layout", "M", s.layout.M);
    read(j, "layout", "N", s.layout.N);
    read(j, "layout", "d_y", s.layout.d_y);
    read(j, "layout", "A", s.layout.A);
    read(j, "layout", "d_min", s.layout.d_min);
    read(j, "layout", "f_c", s.layout.f_c);
    s.self_impedance = read_complex(j, "self_impedance");
    s.load_impedance = read_complex(j, "load_impedance");
    read(j, "channel", "K", s.K);
    read(j, "channel", "L", s.L);
    read(j, "rate", "p_max_dbm", s.p_max_dbm);
    read(j, "rate", "snr_db", s.snr_db);
    read(j, "rate", "power_dbm", s.power_dbm);
    read(j, "rate", "users", s.users);
    read(j, "rate", "region", s.region);
    read(j, "rate", "couplers", s.couplers);
    read(j, "optimizer", "eta0_scale", s.eta0_scale);
    read(j, "optimizer", "backtrack_factor", s.backtrack_factor);
    read(j, "optimizer", "max_backtracks", s.max_backtracks);
    read(j, "optimizer", "alpha_rule", s.alpha_rule);
    read(j, "optimizer", "alpha_constant", s.alpha_constant);
    read(j, "optimizer", "eps_stop", s.eps_stop);
    read(j, "optimizer", "T_max", s.T_max);
    read(j, "optimizer", "fd_step", s.fd_step);
    read(j, "estimation", "V", s.V);
    read(j, "estimation", "tau", s.tau);
    read(j, "estimation", "G", s.G);
    read(j, "estimation", "eta", s.eta);
    read(j, "estimation", "eps_n", s.eps_n);
    read(j, "estimation", "D", s.D);
    read(j, "estimation", "snr_db", s.est_snr_db);
    read(j, "estimation", "snr_grid", s.snr_grid);
    read(j, "estimation", "tau_grid", s.tau_grid);
    read(j, "estimation", "eval_placements", s.eval_placements);
    read(j, "heatmap", "antenna", s.heatmap_antenna);
    read(j, "heatmap", "resolution", s.heatmap_resolution);
    read(j, "seeds", "first", s.first_seed);
    read(j, "seeds", "rate_trials", s.rate_trials);
    read(j, "seeds", "nmse_trials", s.nmse_trials);
    read(j, "", "schemes", s.schemes);
    read(j, "", "workers", s.workers);
    return s;
}

bool same_kind(const json& def, const json& v) {
    if (def.is_number_integer()) {
        if (v.is_number_integer()) return true;
        return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
    }
    if (def.is_number()) return v.is_number();
    return def.type() == v.type();
}

// Copies user values into the defaults, refusing keys the defaults lack.
void merge_checked(json& def, const json& user, const std::string& prefix) {
    if (!user.is_object()) bad(prefix.empty() ? "<root>" : prefix, "expects an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!def.contains(it.key())) bad(path, "unknown field");
        json& slot = def[it.key()];
        if (slot.is_object()) {
            merge_checked(slot, it.value(), path);
        } else if (!same_kind(slot, it.value())) {
            bad(path, "has the wrong type");
        } else if (slot.is_number_integer() && it.value().is_number_float()) {
            slot = static_cast<long long>(it.value().get<double>());
        } else {
            slot = it.value();
        }
    }
}

void apply_override(json& cfg, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) bad(item, "override must look like a.b=value");
    const std::string path = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    // Build {"a": {"b": value}} and merge it like a file.
    json patch = value;
    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string k; std::getline(ss, k, '.');) keys.push_back(k);
    for (auto k = keys.rbegin(); k != keys.rend(); ++k) patch = json{{*k, patch}};
    merge_checked(cfg, patch, "");
}

Scenario finish(json cfg, const json* user, const std::vector<std::string>& overrides) {
    if (user) merge_checked(cfg, *user, "");
    for (const auto& o : overrides) apply_override(cfg, o);
    Scenario s = from_json(cfg);
    s.validate();
    return s;
}

}  // namespace

void Scenario::validate() const {
    try {
        layout.validate();
    } catch (const Error& e) {
        bad("layout", e.what());
    }
    if (K < 1) bad("channel.K", "must be >= 1");
    if (L < 1) bad("channel.L", "must be >= 1");
    if (!(load_impedance.real() >= 0.0)) bad("dipole.load_impedance", "real part must be >= 0");
    if (power_dbm.empty()) bad("rate.power_dbm", "must not be empty");
    if (users.empty() || *std::min_element(users.begin(), users.end()) < 1) bad("rate.users", "needs values >= 1");
    if (region.empty() || *std::min_element(region.begin(), region.end()) <= 0.0) bad("rate.region", "needs values > 0");
    if (couplers.empty() || *std::min_element(couplers.begin(), couplers.end()) < 0) bad("rate.couplers", "needs values >= 0");
    if (!(eta0_scale > 0.0)) bad("optimizer.eta0_scale", "must be > 0");
    if (alpha_rule != "diminishing" && alpha_rule != "constant") bad("optimizer.alpha_rule", "must be diminishing or constant");
    if (!(fd_step > 0.0)) bad("optimizer.fd_step", "must be > 0");
    try {
        sca_config().validate();
    } catch (const Error& e) {
        bad("optimizer", e.what());
    }
    if (V < 1) bad("estimation.V", "must be >= 1");
    if (tau < K) bad("estimation.tau", "must be >= channel.K");
    if (G < 2) bad("estimation.G", "must be >= 2");
    if (!(eta > 0.0)) bad("estimation.eta", "must be > 0");
    if (!(eps_n >= 0.0)) bad("estimation.eps_n", "must be >= 0");
    if (D < 1 || static_cast<int>(std::lround(std::sqrt(D))) * static_cast<int>(std::lround(std::sqrt(D))) != D)
        bad("estimation.D", "must be a perfect square");
    if (snr_grid.empty()) bad("estimation.snr_grid", "must not be empty");
    if (tau_grid.empty() || *std::min_element(tau_grid.begin(), tau_grid.end()) < K)
        bad("estimation.tau_grid", "needs values >= channel.K");
    if (eval_placements < 1) bad("estimation.eval_placements", "must be >= 1");
    if (heatmap_antenna < 0 || heatmap_antenna >= layout.M) bad("heatmap.antenna", "out of range");
    if (heatmap_resolution < 2) bad("heatmap.resolution", "must be >= 2");
    if (rate_trials < 1) bad("seeds.rate_trials", "must be >= 1");
    if (nmse_trials < 1) bad("seeds.nmse_trials", "must be >= 1");
    if (schemes.empty()) bad("schemes", "must not be empty");
    for (const auto& s : schemes) {
        const auto& r = rate_schemes();
        const auto& e = estimation_schemes();
        if (std::find(r.begin(), r.end(), s) == r.end() && std::find(e.begin(), e.end(), s) == e.end())
            bad("schemes", "unknown scheme '" + s + "'");
    }
    if (workers < 1) bad("workers", "must be >= 1");
}

DipoleModel Scenario::dipole() const {
    DipoleModel d = half_wave_dipole(layout);
    d.self_impedance = self_impedance;
    d.load_impedance = load_impedance;
    return d;
}

SCAConfig Scenario::sca_config() const {
    SCAConfig c = default_sca_config(layout);
    const double lambda = layout.lambda();
    c.eta0 = eta0_scale / (lambda * lambda);
    c.backtrack_factor = backtrack_factor;
    c.max_backtracks = max_backtracks;
    c.alpha_rule = alpha_rule == "constant" ? StepRule::constant : StepRule::diminishing;
    c.alpha_constant = alpha_constant;
    c.eps_stop = eps_stop;
    c.T_max = T_max;
    c.fd_step = fd_step * lambda;
    c.workers = 1;
    return c;
}

double Scenario::p_max() const { return dbm_to_watt(p_max_dbm); }

double Scenario::sigma2() const { return p_max() / (K * db_to_linear(snr_db)); }

bool Scenario::has_scheme(const std::string& s) const {
    return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

Scenario scenario_from_json(const std::string& text, const std::vector<std::string>& overrides) {
    json user;
    try {
        user = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::config, std::string("config is not valid JSON: ") + e.what());
    }
    return finish(to_json(Scenario{}), &user, overrides);
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    if (path.empty()) return finish(to_json(Scenario{}), nullptr, overrides);
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str(), overrides);
}

std::string scenario_json(const Scenario& s) { return to_json(s).dump(2); }

SweepAxis parse_axis(const std::string& name) {
    for (SweepAxis a : {SweepAxis::power, SweepAxis::users, SweepAxis::region, SweepAxis::snr, SweepAxis::pilot})
        if (name == to_string(a)) return a;
    throw Error(Errc::config, "unknown sweep axis '" + name + "'");
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::power: return "power";
        case SweepAxis::users: return "users";
        case SweepAxis::region: return "region";
        case SweepAxis::snr: return "snr";
        case SweepAxis::pilot: return "pilot";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::vector<double> axis_values(const Scenario& s, SweepAxis axis) {
    switch (axis) {
        case SweepAxis::power: return s.power_dbm;
        case SweepAxis::users: return {s.users.begin(), s.users.end()};
        case SweepAxis::region: return s.region;
        case SweepAxis::snr: return s.snr_grid;
        case SweepAxis::pilot: return {s.tau_grid.begin(), s.tau_grid.end()};
    }
    return {};
}

void rate_rows(const Scenario& s, const ArrayLayout& layout, int K, double p_max, std::uint64_t seed,
               double value, const std::string& suffix, std::vector<ResultRow>& out) {
    Scenario local = s;  // the region sweep changes A and N
    local.layout = layout;
    const DipoleModel dipole = local.dipole();
    const MultipathSpec spec = sample_channels(derive_seed(seed, 0), K, s.L);
    const double sigma2 = s.sigma2();
    const CouplerPlacement start = uniform_placement(layout);
    SystemModel model{layout, dipole, spec, p_max, sigma2};

    for (const auto& scheme : rate_schemes()) {
        if (!s.has_scheme(scheme)) continue;
        const std::string name = scheme + suffix;
        if (scheme == "fc-optimized") {
            const SCAResult r = optimize(start, local.sca_config(), model);
            out.push_back({seed, value, name, "sum_rate", r.state.sum_rate});
            out.push_back({seed, value, name, "iterations", static_cast<double>(r.trace.iterations.size())});
            out.push_back({seed, value, name, "comm_scalars", static_cast<double>(r.trace.comm.total())});
        } else if (scheme == "fixed-coupler") {
            out.push_back({seed, value, name, "sum_rate", objective(start, model)});
        } else if (scheme == "active-only") {
            out.push_back({seed, value, name, "sum_rate", active_only_rate(spec, layout, dipole, p_max, sigma2)});
        } else if (scheme == "fully-active") {
            out.push_back({seed, value, name, "sum_rate",
                           fully_active_rate(spec, start, layout, dipole, p_max, sigma2).sum_rate});
        }
    }
}

void estimation_rows(const Scenario& s, int tau, double snr_db, std::uint64_t seed, double value,
                     std::vector<ResultRow>& out) {
    const ArrayLayout& layout = s.layout;
    const DipoleModel dipole = s.dipole();
    const double noise = 1.0 / db_to_linear(snr_db);
    const MultipathSpec spec = sample_channels(derive_seed(seed, 0), s.K, s.L);
    const PilotSession session = make_session(layout, dipole, s.K, s.V, tau, noise, derive_seed(seed, 1));
    const Observations obs = simulate_rx(session, spec, derive_seed(seed, 2));
    const AngularGrid grid(s.G);
    const std::vector<int> paths(s.K, s.L);

    std::mt19937_64 rng(derive_seed(seed, 3));
    std::vector<CouplerPlacement> test;
    for (int i = 0; i < s.eval_placements; ++i) test.push_back(random_feasible_placement(layout, rng));

    for (const auto& scheme : estimation_schemes()) {
        if (!s.has_scheme(scheme)) continue;
        if (scheme == "centralized") {
            const EstimationResult r = centralized_estimate(session, obs, grid, paths);
            out.push_back({seed, value, scheme, "nmse", nmse(r, spec, test)});
            out.push_back({seed, value, scheme, "comm_scalars", static_cast<double>(r.ledger.total())});
        } else if (scheme == "distributed") {
            const EstimationResult r = distributed_estimate(session, obs, grid, paths, {s.eta, s.eps_n});
            out.push_back({seed, value, scheme, "nmse", nmse(r, spec, test)});
            out.push_back({seed, value, scheme, "comm_scalars", static_cast<double>(r.ledger.total())});
        } else if (scheme == "exhaustive") {
            const ExhaustiveBaseline b(layout, dipole, spec, uniform_placement(layout), s.D, tau, noise,
                                       derive_seed(seed, 4));
            out.push_back({seed, value, scheme, "nmse", nmse(b, spec, test)});
            out.push_back({seed, value, scheme, "measurements", static_cast<double>(b.ledger().measurements)});
        }
    }
}

}  // namespace

std::vector<ResultRow> run_point(const Scenario& s, SweepAxis axis, std::uint64_t seed, double value) {
    std::vector<ResultRow> out;
    switch (axis) {
        case SweepAxis::power:
            rate_rows(s, s.layout, s.K, dbm_to_watt(value), seed, value, "", out);
            break;
        case SweepAxis::users:
            rate_rows(s, s.layout, static_cast<int>(value), s.p_max(), seed, value, "", out);
            break;
        case SweepAxis::region:
            for (int N : s.couplers) {
                ArrayLayout layout = s.layout;
                layout.A = value;
                layout.N = N;
                rate_rows(s, layout, s.K, s.p_max(), seed, value, ":N=" + std::to_string(N), out);
            }
            break;
        case SweepAxis::snr:
            estimation_rows(s, s.tau, value, seed, value, out);
            break;
        case SweepAxis::pilot:
            estimation_rows(s, static_cast<int>(value), s.est_snr_db, seed, value, out);
            break;
    }
    return out;
}

ResultTable run_sweep(const Scenario& s, SweepAxis axis) {
    s.validate();
    const bool rate = axis == SweepAxis::power || axis == SweepAxis::users || axis == SweepAxis::region;
    const int trials = rate ? s.rate_trials : s.nmse_trials;
    const std::vector<double> values = axis_values(s, axis);
    const int points = trials * static_cast<int>(values.size());

    std::vector<std::vector<ResultRow>> parts(points);
    parallel_for(points, s.workers, [&](int i) {
        const double value = values[i / trials];
        const std::uint64_t seed = s.first_seed + static_cast<std::uint64_t>(i % trials);
        parts[i] = run_point(s, axis, seed, value);
    });

    ResultTable table;
    table.axis = axis;
    for (auto& p : parts) table.rows.insert(table.rows.end(), p.begin(), p.end());
    return table;
}

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const ResultTable& table) {
    os << "seed,axis,value,scheme,metric,result\n";
    for (const auto& r : table.rows)
        os << r.seed << ',' << to_string(table.axis) << ',' << num(r.value) << ',' << r.scheme << ','
           << r.metric << ',' << num(r.result) << '\n';
}

namespace {

struct AntennaGain {
    double ratio;  ///< sum_k |G(k, m)|^2 / b_m
    double rz;     ///< Re{z_self}
};

AntennaGain antenna_gain(const MultipathSpec& spec, int m, const Vec& p_m, const ArrayLayout& layout,
                         const DipoleModel& dipole) {
    const ImpedanceBlock block = build_block(p_m, layout.active_position(m), dipole);
    const MechanicalWeights w = mech_weights(block);
    const CVec col = effective_column(spec, m, p_m, layout, w);
    return {col.squaredNorm() / power_weight(block, w), block.z_self.real()};
}

}  // namespace

double antenna_gain_db(const MultipathSpec& spec, int m, const Vec& p_m, const ArrayLayout& layout,
                       const DipoleModel& dipole) {
    const AntennaGain g = antenna_gain(spec, m, p_m, layout, dipole);
    return linear_to_db(g.ratio * g.rz);
}

double array_gain_db(const MultipathSpec& spec, const CouplerPlacement& placement,
                     const ArrayLayout& layout, const DipoleModel& dipole) {
    double sum = 0.0;
    double rz = 0.0;
    for (int m = 0; m < layout.M; ++m) {
        const AntennaGain g = antenna_gain(spec, m, placement.antenna(m), layout, dipole);
        sum += g.ratio;
        rz = g.rz;
    }
    return linear_to_db(sum * rz);
}

Heatmap heatmap(const Scenario& s, std::uint64_t seed) {
    s.validate();
    if (s.layout.N != 1) throw Error(Errc::config, "layout.N: heatmap needs exactly one coupler per antenna");
    const ArrayLayout& layout = s.layout;
    const DipoleModel dipole = s.dipole();
    const MultipathSpec spec = sample_channels(derive_seed(seed, 0), s.K, s.L);
    const int a = s.heatmap_antenna;
    const int res = s.heatmap_resolution;
    const double lambda = layout.lambda();
    const Vec2 q = layout.active_position(a);

    Heatmap map;
    map.resolution = res;
    map.cells.resize(static_cast<size_t>(res) * res);
    parallel_for(res, s.workers, [&](int iy) {
        const double y = -0.5 * layout.A + layout.A * iy / (res - 1);
        for (int ix = 0; ix < res; ++ix) {
            const double x = -0.5 * layout.A + layout.A * ix / (res - 1);
            Vec p(2);
            p << q.x() + x * lambda, q.y() + y * lambda;
            HeatmapCell& c = map.cells[static_cast<size_t>(iy) * res + ix];
            c.x = x;
            c.y = y;
            c.gain_db = is_feasible_local(p, a, layout).feasible
                            ? antenna_gain_db(spec, a, p, layout, dipole)
                            : std::numeric_limits<double>::quiet_NaN();
        }
    });

    SCAConfig cfg = s.sca_config();
    cfg.snapshots = true;
    const CouplerPlacement start = uniform_placement(layout);
    const SystemModel model{layout, dipole, spec, s.p_max(), s.sigma2()};
    const SCAResult r = optimize(start, cfg, model);

    auto point = [&](int t, const CouplerPlacement& p, double rate) {
        const Vec pa = p.antenna(a);
        map.trajectory.push_back({t, (pa(0) - q.x()) / lambda, (pa(1) - q.y()) / lambda,
                                  antenna_gain_db(spec, a, pa, layout, dipole),
                                  array_gain_db(spec, p, layout, dipole), rate});
    };
    point(0, start, r.trace.initial_rate);
    for (const auto& it : r.trace.iterations)
        if (it.placement) point(it.t + 1, *it.placement, it.rate);
    return map;
}

void write_heatmap_csv(std::ostream& os, const Heatmap& map) {
    os << "x_wl,y_wl,gain_db\n";
    for (const auto& c : map.cells) os << num(c.x) << ',' << num(c.y) << ',' << num(c.gain_db) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Heatmap& map) {
    os << "t,x_wl,y_wl,antenna_gain_db,array_gain_db,sum_rate\n";
    for (const auto& p : map.trajectory)
        os << p.t << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.antenna_gain_db) << ','
           << num(p.array_gain_db) << ',' << num(p.rate) << '\n';
}

std::string placement_json(const CouplerPlacement& placement, const ArrayLayout& layout) {
    json j;
    j["layout"] = {{"M", layout.M}, {"N", layout.N},         {"d_y", layout.d_y},
                   {"A", layout.A}, {"d_min", layout.d_min}, {"f_c", layout.f_c}};
    json ants = json::array();
    for (int m = 0; m < placement.antennas(); ++m) {
        json c = json::array();
        for (int n = 0; n < placement.couplers(); ++n) {
            const Vec2 p = placement.point(m, n);
            c.push_back({p.x(), p.y()});
        }
        ants.push_back(c);
    }
    j["couplers_m"] = ants;
    return j.dump(2);
}

CouplerPlacement placement_from_json(const std::string& text, const ArrayLayout& layout) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("couplers_m")) throw Error(Errc::config, "placement: not a placement file");
    const json& ants = j["couplers_m"];
    if (static_cast<int>(ants.size()) != layout.M) throw Error(Errc::config, "placement: antenna count differs from layout.M");
    CouplerPlacement p(layout.M, layout.N);
    for (int m = 0; m < layout.M; ++m) {
        if (static_cast<int>(ants[m].size()) != layout.N) throw Error(Errc::config, "placement: coupler count differs from layout.N");
        for (int n = 0; n < layout.N; ++n)
            p.set_point(m, n, Vec2(ants[m][n].at(0).get<double>(), ants[m][n].at(1).get<double>()));
    }
    return p;
}

void write_trace_csv(std::ostream& os, const SCATrace& trace) {
    os << "t,sum_rate,accepted,backtracks,eta,alpha,broadcast,upload\n";
    os << "0," << num(trace.initial_rate) << ",1,0,0,0,0,0\n";
    for (const auto& it : trace.iterations)
        os << it.t + 1 << ',' << num(it.rate) << ',' << (it.accepted ? 1 : 0) << ',' << it.backtracks << ','
           << num(it.eta) << ',' << num(it.alpha) << ',' << it.comm.broadcast << ',' << it.comm.upload << '\n';
}

}  // namespace fca
