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

// fcsim: command-line front end for the experiment harness.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fcarray/experiment.hpp"
#include "fcarray/runtime.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fca;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out = "out";
    std::vector<std::string> set;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "scenario JSON file");
    app->add_option("--seed", c.seed, "first seed (seeds.first)");
    app->add_option("--workers", c.workers, "worker threads");
    app->add_option("--out", c.out, "output directory")->capture_default_str();
    app->add_option("--set", c.set, "override a field, e.g. --set layout.M=8");
}

Scenario scenario_of(const Common& c) {
    std::vector<std::string> over = c.set;
    if (c.seed) over.push_back("seeds.first=" + std::to_string(*c.seed));
    if (c.workers) over.push_back("workers=" + std::to_string(*c.workers));
    return load_scenario(c.config, over);
}

fs::path out_dir(const Common& c) {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw Error(Errc::config, "--out: cannot create " + c.out + ": " + ec.message());
    return fs::path(c.out);
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw Error(Errc::config, "cannot write " + p.string());
    return f;
}

void write_manifest(const fs::path& dir, const std::string& command, const Scenario& s,
                    const std::vector<std::string>& files, double seconds, json extra = json::object()) {
    json m;
    m["software"] = {{"name", "fcarray"}, {"version", version()}};
    m["command"] = command;
    m["scenario"] = json::parse(scenario_json(s));
    m["derived"] = {{"lambda_m", s.layout.lambda()},
                    {"p_max_w", s.p_max()},
                    {"rate_sigma2", s.sigma2()},
                    {"rate_snr_definition", "P_max g0 / (K sigma^2) with g0 = 1, at rate.p_max_dbm and channel.K"},
                    {"estimation_snr_definition", "1 / sigma_m^2 with unit pilot power and g0 = 1"},
                    {"eta0_per_m2", s.sca_config().eta0},
                    {"fd_step_m", s.sca_config().fd_step},
                    {"trial_counts_note", "desk scale: 50 rate trials and 200 NMSE trials by default"}};
    m["files"] = files;
    m["runtime_seconds"] = seconds;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    auto f = open_out(dir / "manifest.json");
    f << m.dump(2) << '\n';
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json ledger_json(const CostLedger& c) {
    json j = json::array();
    for (const auto& [key, n] : c.totals)
        j.push_back({{"kind", to_string(key.first)}, {"direction", to_string(key.second)}, {"scalars", n}});
    return j;
}

int cmd_optimize(const Common& c, bool messages) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = scenario_of(c);
    const fs::path dir = out_dir(c);
    const MultipathSpec spec = sample_channels(derive_seed(s.first_seed, 0), s.K, s.L);
    const SystemModel model{s.layout, s.dipole(), spec, s.p_max(), s.sigma2()};
    SCAConfig cfg = s.sca_config();
    cfg.workers = s.workers;
    const CouplerPlacement start = uniform_placement(s.layout);

    std::vector<std::string> files{"placement.json", "trace.csv"};
    SCAResult r;
    json extra;
    if (messages) {
        const Algorithm1Run run = run_algorithm1(start, cfg, model, true);
        r = run.result;
        auto f = open_out(dir / "messages.ndjson");
        write_ndjson(f, run.log);
        files.push_back("messages.ndjson");
        extra["ledger"] = ledger_json(run.ledger);
        extra["rounds"] = run.ledger.rounds;
    } else {
        r = optimize(start, cfg, model);
    }
    {
        auto f = open_out(dir / "placement.json");
        f << placement_json(r.placement, s.layout) << '\n';
    }
    {
        auto f = open_out(dir / "trace.csv");
        write_trace_csv(f, r.trace);
    }
    extra["initial_rate"] = r.trace.initial_rate;
    extra["final_rate"] = r.state.sum_rate;
    extra["iterations"] = r.trace.iterations.size();
    extra["stop_reason"] = r.trace.stop_reason;
    extra["comm_scalars"] = {{"broadcast", r.trace.comm.broadcast}, {"upload", r.trace.comm.upload}};
    write_manifest(dir, "optimize", s, files, since(t0), extra);
    std::cout << "rate " << r.trace.initial_rate << " -> " << r.state.sum_rate << " bits/s/Hz after "
              << r.trace.iterations.size() << " iterations (" << r.trace.stop_reason << ")\n";
    return 0;
}

json user_json(const EstimationResult& r) {
    json users = json::array();
    for (const auto& u : r.users) {
        json g = json::array();
        for (Eigen::Index l = 0; l < u.gains.size(); ++l) g.push_back({u.gains(l).real(), u.gains(l).imag()});
        users.push_back({{"support", u.support},
                         {"angles_rad", std::vector<double>(u.angles.data(), u.angles.data() + u.angles.size())},
                         {"gains", g}});
    }
    return users;
}

int cmd_estimate(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = scenario_of(c);
    const fs::path dir = out_dir(c);
    const std::uint64_t seed = s.first_seed;
    const double noise = 1.0 / db_to_linear(s.est_snr_db);
    const MultipathSpec spec = sample_channels(derive_seed(seed, 0), s.K, s.L);
    const PilotSession session = make_session(s.layout, s.dipole(), s.K, s.V, s.tau, noise, derive_seed(seed, 1));
    const Observations obs = simulate_rx(session, spec, derive_seed(seed, 2));
    const AngularGrid grid(s.G);
    const std::vector<int> paths(s.K, s.L);
    std::mt19937_64 rng(derive_seed(seed, 3));
    std::vector<CouplerPlacement> test;
    for (int i = 0; i < s.eval_placements; ++i) test.push_back(random_feasible_placement(s.layout, rng));

    json res;
    std::vector<std::string> files{"estimate.json"};
    if (s.has_scheme("centralized")) {
        const Algorithm3Run run = run_algorithm2(session, obs, grid, paths, true);
        res["centralized"] = {{"users", user_json(run.result)}, {"nmse", nmse(run.result, spec, test)},
                              {"ledger", ledger_json(run.ledger)}, {"rounds", run.ledger.rounds}};
    }
    if (s.has_scheme("distributed")) {
        const Algorithm3Run run = run_algorithm3(session, obs, grid, paths, {s.eta, s.eps_n}, -1.0, true);
        res["distributed"] = {{"users", user_json(run.result)}, {"nmse", nmse(run.result, spec, test)},
                              {"ledger", ledger_json(run.ledger)}, {"rounds", run.ledger.rounds},
                              {"fallback", run.result.ledger.fallback}};
        auto f = open_out(dir / "messages.ndjson");
        write_ndjson(f, run.log);
        files.push_back("messages.ndjson");
    }
    if (s.has_scheme("exhaustive")) {
        const ExhaustiveBaseline b(s.layout, s.dipole(), spec, uniform_placement(s.layout), s.D, s.tau, noise,
                                   derive_seed(seed, 4));
        res["exhaustive"] = {{"nmse", nmse(b, spec, test)}, {"measurements", b.ledger().measurements}};
    }
    {
        auto f = open_out(dir / "estimate.json");
        f << res.dump(2) << '\n';
    }
    write_manifest(dir, "estimate", s, files, since(t0));
    for (auto it = res.begin(); it != res.end(); ++it)
        std::cout << it.key() << " nmse " << it.value()["nmse"].get<double>() << '\n';
    return 0;
}

int cmd_sweep(const Common& c, const std::string& axis_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepAxis axis = parse_axis(axis_name);
    const Scenario s = scenario_of(c);
    const fs::path dir = out_dir(c);
    const ResultTable table = run_sweep(s, axis);
    const std::string name = std::string("sweep_") + to_string(axis) + ".csv";
    {
        auto f = open_out(dir / name);
        write_csv(f, table);
    }
    write_manifest(dir, std::string("sweep ") + to_string(axis), s, {name}, since(t0),
                   {{"rows", table.rows.size()}});
    std::cout << table.rows.size() << " rows written to " << (dir / name).string() << '\n';
    return 0;
}

int cmd_heatmap(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = scenario_of(c);
    const fs::path dir = out_dir(c);
    const Heatmap map = heatmap(s, s.first_seed);
    {
        auto f = open_out(dir / "heatmap.csv");
        write_heatmap_csv(f, map);
    }
    {
        auto f = open_out(dir / "trajectory.csv");
        write_trajectory_csv(f, map);
    }
    write_manifest(dir, "heatmap", s, {"heatmap.csv", "trajectory.csv"}, since(t0),
                   {{"gain_definition", "sum_k |G(k,m)|^2 Re{z_self} / b_m of the mapped antenna, dB"}});
    const auto& tr = map.trajectory;
    std::cout << "antenna gain " << tr.front().antenna_gain_db << " dB -> " << tr.back().antenna_gain_db
              << " dB; array gain " << tr.front().array_gain_db << " dB -> " << tr.back().array_gain_db << " dB\n";
    return 0;
}

void print_ledger(const CostLedger& c, std::ostream& os) {
    os << "kind,direction,scalars\n";
    for (const auto& [key, n] : c.totals) os << to_string(key.first) << ',' << to_string(key.second) << ',' << n << '\n';
    os << "total,both," << c.total() << "\nrounds,," << c.rounds << '\n';
}

int cmd_ledger(const Common& c, const std::string& log_path) {
    if (!log_path.empty()) {
        std::ifstream in(log_path);
        if (!in) throw Error(Errc::config, "cannot open " + log_path);
        print_ledger(CostLedger::replay(read_ndjson(in)), std::cout);
        return 0;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = scenario_of(c);
    const fs::path dir = out_dir(c);
    const MultipathSpec spec = sample_channels(derive_seed(s.first_seed, 0), s.K, s.L);
    const SystemModel model{s.layout, s.dipole(), spec, s.p_max(), s.sigma2()};
    const Algorithm1Run a1 = run_algorithm1(uniform_placement(s.layout), s.sca_config(), model, true);

    int retries = 0, rejections = 0;
    for (const auto& it : a1.result.trace.iterations) {
        retries += it.backtracks;
        rejections += it.accepted ? 0 : 1;
    }
    const SCALedger closed = communication_count(s.layout.M, s.layout.N,
                                                 static_cast<int>(a1.result.trace.iterations.size()), retries, rejections);
    {
        auto f = open_out(dir / "ledger_algorithm1.csv");
        print_ledger(a1.ledger, f);
    }
    {
        auto f = open_out(dir / "messages_algorithm1.ndjson");
        write_ndjson(f, a1.log);
    }
    std::cout << "algorithm 1: logged " << a1.ledger.total(Direction::cpu_to_lpu) << " down / "
              << a1.ledger.total(Direction::lpu_to_cpu) << " up; closed form " << closed.broadcast << " / "
              << closed.upload << "\n";
    write_manifest(dir, "ledger", s, {"ledger_algorithm1.csv", "messages_algorithm1.ndjson"}, since(t0),
                   {{"closed_form", {{"broadcast", closed.broadcast}, {"upload", closed.upload}}},
                    {"logged", {{"broadcast", a1.ledger.total(Direction::cpu_to_lpu)},
                                {"upload", a1.ledger.total(Direction::lpu_to_cpu)}}}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flexible-coupler array simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    Common c;
    bool messages = false;
    std::string axis, log_path;

    auto* opt = app.add_subcommand("optimize", "optimize coupler positions for one channel draw");
    add_common(opt, c);
    opt->add_flag("--messages", messages, "run through the message-passing runtime and keep the log");
    auto* est = app.add_subcommand("estimate", "estimate one channel draw with every configured estimator");
    add_common(est, c);
    auto* sw = app.add_subcommand("sweep", "Monte-Carlo sweep over one axis");
    sw->add_option("axis", axis, "power | users | region | snr | pilot")->required();
    add_common(sw, c);
    auto* hm = app.add_subcommand("heatmap", "gain map of one coupler region with the optimizer path");
    add_common(hm, c);
    auto* lg = app.add_subcommand("ledger", "communication ledger of the distributed optimizer");
    add_common(lg, c);
    lg->add_option("--log", log_path, "replay an NDJSON message log instead of running");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*opt) return cmd_optimize(c, messages);
        if (*est) return cmd_estimate(c);
        if (*sw) return cmd_sweep(c, axis);
        if (*hm) return cmd_heatmap(c);
        if (*lg) return cmd_ledger(c, log_path);
    } catch (const Error& e) {
        std::cerr << "fcsim: " << e.what() << '\n';
        return e.code() == Errc::config ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "fcsim: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
