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

#include "fcarray/runtime.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

#include "fcarray/parallel.hpp"

namespace fca {

const char* to_string(Direction d) {
    return d == Direction::cpu_to_lpu ? "cpu_to_lpu" : "lpu_to_cpu";
}

const char* to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::gradient: return "gradient";
        case PayloadKind::positions: return "positions";
        case PayloadKind::step_control: return "step_control";
        case PayloadKind::pilot_block: return "pilot_block";
        case PayloadKind::proxy_list: return "proxy_list";
        case PayloadKind::proxy_request: return "proxy_request";
        case PayloadKind::support: return "support";
        case PayloadKind::suff_stats: return "suff_stats";
        case PayloadKind::gains: return "gains";
    }
    return "unknown";
}

namespace {

template <class E>
E parse_enum(const std::string& s, std::initializer_list<E> all) {
    for (E e : all)
        if (s == to_string(e)) return e;
    throw Error(Errc::config, "unknown message field value '" + s + "'");
}

}  // namespace

void CostLedger::charge(const Message& msg) {
    totals[{msg.kind, msg.direction}] += msg.scalar_count();
}

long long CostLedger::total(Direction d) const {
    long long sum = 0;
    for (const auto& [key, n] : totals)
        if (key.second == d) sum += n;
    return sum;
}

long long CostLedger::total(PayloadKind k, Direction d) const {
    const auto it = totals.find({k, d});
    return it == totals.end() ? 0 : it->second;
}

CostLedger CostLedger::replay(const MessageLog& log) {
    CostLedger c;
    std::set<int> rounds;
    for (const auto& msg : log) {
        c.charge(msg);
        rounds.insert(msg.round);
    }
    c.rounds = static_cast<int>(rounds.size());
    return c;
}

void write_ndjson(std::ostream& os, const MessageLog& log) {
    for (const auto& msg : log) {
        nlohmann::json j;
        j["round"] = msg.round;
        j["direction"] = to_string(msg.direction);
        j["antenna"] = msg.antenna;
        j["kind"] = to_string(msg.kind);
        j["user"] = msg.user;
        j["scalars"] = msg.scalar_count();
        j["reals"] = msg.reals;
        nlohmann::json cx = nlohmann::json::array();
        for (const cplx& z : msg.complexes) cx.push_back({z.real(), z.imag()});
        j["complexes"] = cx;
        j["indices"] = msg.indices;
        os << j.dump() << '\n';
    }
}

MessageLog read_ndjson(std::istream& is) {
    MessageLog log;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        Message msg;
        msg.round = j.at("round").get<int>();
        msg.direction = parse_enum(j.at("direction").get<std::string>(),
                                   {Direction::cpu_to_lpu, Direction::lpu_to_cpu});
        msg.antenna = j.at("antenna").get<int>();
        msg.kind = parse_enum(j.at("kind").get<std::string>(),
                              {PayloadKind::gradient, PayloadKind::positions, PayloadKind::step_control,
                               PayloadKind::pilot_block, PayloadKind::proxy_list, PayloadKind::proxy_request,
                               PayloadKind::support, PayloadKind::suff_stats, PayloadKind::gains});
        msg.user = j.at("user").get<int>();
        msg.reals = j.at("reals").get<std::vector<double>>();
        for (const auto& z : j.at("complexes")) msg.complexes.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        msg.indices = j.at("indices").get<std::vector<int>>();
        if (msg.scalar_count() != j.at("scalars").get<long long>())
            throw Error(Errc::config, "message scalar count does not match its payload");
        log.push_back(std::move(msg));
    }
    return log;
}

void Network::send(Message msg) {
    if (audit_) {
        auto& last = last_round_[{msg.antenna, msg.direction, msg.kind, msg.user}];
        if (msg.round <= last)
            throw Error(Errc::information_leak, "message delivered out of round order on antenna " +
                                                    std::to_string(msg.antenna));
        last = msg.round;
    }
    ledger_.charge(msg);
    if (msg.round != last_seen_) {
        last_seen_ = msg.round;
        ++ledger_.rounds;
    }
    log_.push_back(std::move(msg));
}

void Inbox::accept(const Message& msg, int current_round) const {
    if (!audit_) return;
    if (msg.antenna != antenna_)
        throw Error(Errc::information_leak, "antenna " + std::to_string(antenna_) +
                                                " read a message addressed to antenna " +
                                                std::to_string(msg.antenna));
    if (msg.direction != Direction::cpu_to_lpu)
        throw Error(Errc::information_leak, "antenna " + std::to_string(antenna_) + " read an uplink message");
    if (msg.round != current_round)
        throw Error(Errc::information_leak, "antenna " + std::to_string(antenna_) + " read a stale message");
}

namespace {

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }
std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Antenna side of Algorithm 1. Holds p_m, the last gradient and a tentative
// proposal; everything else arrives by message.
class ScaAntenna {
public:
    ScaAntenna(int m, const ArrayLayout& layout, const SCAConfig& cfg, Vec p, bool audit)
        : m_(m), layout_(layout), cfg_(cfg), p_(std::move(p)), inbox_(m, audit) {}

    void on_gradient(const Message& msg, int round) {
        inbox_.accept(msg, round);
        if (pending_) p_ = *pending_;
        pending_.reset();
        g_ = to_vec(msg.reals);
        eta_ = cfg_.eta0;
        ++t_;
    }

    // eta > 0 retries with that inverse step; 0 drops the proposal.
    void on_step_control(const Message& msg, int round) {
        inbox_.accept(msg, round);
        if (msg.reals.at(0) > 0.0) {
            eta_ = msg.reals[0];
        } else {
            pending_.reset();
        }
    }

    Proposal step() {
        Proposal prop = antenna_proposal(p_, m_, layout_, g_, eta_, cfg_.alpha(t_));
        pending_ = prop.position;
        return prop;
    }

private:
    int m_;
    ArrayLayout layout_;
    SCAConfig cfg_;
    Vec p_;
    Vec g_;
    double eta_ = 0.0;
    int t_ = -1;
    std::optional<Vec> pending_;
    Inbox inbox_;
};

class MessageBank final : public AntennaBank {
public:
    MessageBank(const CouplerPlacement& initial, const ArrayLayout& layout, const SCAConfig& cfg,
                Network& net)
        : layout_(layout), workers_(cfg.workers), net_(net) {
        for (int m = 0; m < layout.M; ++m) antennas_.emplace_back(m, layout, cfg, initial.antenna(m), net.audit());
    }

    void deliver_gradients(int, const std::vector<Vec>& grads) override {
        const int round = net_.next_round();
        for (int m = 0; m < layout_.M; ++m) {
            net_.send({round, Direction::cpu_to_lpu, m, PayloadKind::gradient, -1, to_std(grads[m]), {}, {}});
            antennas_[m].on_gradient(net_.log().back(), round);
        }
    }

    std::vector<Proposal> propose(int, int attempt, double eta, double) override {
        const int M = layout_.M;
        if (attempt > 0) control(eta);
        std::vector<Proposal> local(M);
        parallel_for(M, workers_, [&](int m) { local[m] = antennas_[m].step(); });

        std::vector<Proposal> out(M);
        for (int m = 0; m < M; ++m) {
            net_.send({net_.round(), Direction::lpu_to_cpu, m, PayloadKind::positions, -1,
                       to_std(local[m].position), {}, {}});
            out[m].position = to_vec(net_.log().back().reals);
            out[m].sweeps = local[m].sweeps;
        }
        return out;
    }

    void reject(int) override { control(0.0); }

private:
    void control(double eta) {
        const int round = net_.next_round();
        for (int m = 0; m < layout_.M; ++m) {
            net_.send({round, Direction::cpu_to_lpu, m, PayloadKind::step_control, -1, {eta}, {}, {}});
            antennas_[m].on_step_control(net_.log().back(), round);
        }
    }

    ArrayLayout layout_;
    int workers_;
    Network& net_;
    std::vector<ScaAntenna> antennas_;
};

}  // namespace

Algorithm1Run run_algorithm1(const CouplerPlacement& initial, const SCAConfig& config,
                             const SystemModel& model, bool audit) {
    Network net(audit);
    MessageBank bank(initial, model.layout, config, net);
    Algorithm1Run run;
    run.result = optimize(initial, config, model, bank);
    run.log = net.log();
    run.ledger = net.ledger();
    return run;
}

namespace {

// Antenna side of Algorithm 3. Owns its received pilot rows and block
// placements; learns supports and gains only through messages.
class EstAntenna {
public:
    EstAntenna(int m, const PilotSession& session, const Observations& obs, const AngularGrid& grid,
               const ProxyConfig& cfg, bool audit)
        : m_(m), cfg_(cfg), inbox_(m, audit) {
        const auto& L = session.layout;
        const int V = session.V;
        sigma_eff2_ = session.noise_variance(m) / session.tau;
        std::vector<Vec> p;
        std::vector<MechanicalWeights> w;
        ghat_.resize(session.K(), V);
        for (int v = 0; v < V; ++v) {
            p.push_back(session.placements[v].antenna(m));
            w.push_back(mech_weights(build_block(p.back(), L.active_position(m), session.dipole)));
            ghat_.col(v) = pilot_correlate(obs.Y[v].row(m).transpose(), session.S);
        }
        A_ = local_dictionary(p, w, m, L, grid);
    }

    Message proxies(int k, int round) {
        if (static_cast<int>(proxy_.size()) <= k) proxy_.resize(k + 1);
        proxy_[k] = local_proxy(A_, ghat_.row(k).transpose(), sigma_eff2_, cfg_);
        return pack(upload_of(proxy_[k]), k, round);
    }

    Message on_request(const Message& msg, int round) {
        inbox_.accept(msg, round);
        return pack(top_proxies(proxy_.at(msg.user), msg.indices.at(0)), msg.user, round);
    }

    Message on_support(const Message& msg, int round) {
        inbox_.accept(msg, round);
        const SufficientStats st = sufficient_stats(A_, ghat_.row(msg.user).transpose(), msg.indices);
        Message out{round, Direction::lpu_to_cpu, m_, PayloadKind::suff_stats, msg.user, {}, {}, {}};
        out.complexes.assign(st.R.data(), st.R.data() + st.R.size());
        out.complexes.insert(out.complexes.end(), st.q.data(), st.q.data() + st.q.size());
        return out;
    }

    void on_gains(const Message& msg, int round) { inbox_.accept(msg, round); }

private:
    Message pack(const ProxyUpload& u, int k, int round) const {
        return {round, Direction::lpu_to_cpu, m_, PayloadKind::proxy_list, k, u.value, {}, u.index};
    }

    int m_;
    ProxyConfig cfg_;
    Inbox inbox_;
    double sigma_eff2_ = 0.0;
    CMat ghat_;
    CMat A_;
    std::vector<LocalProxy> proxy_;
};

}  // namespace

Algorithm3Run run_algorithm3(const PilotSession& session, const Observations& obs,
                             const AngularGrid& grid, const std::vector<int>& paths,
                             const ProxyConfig& cfg, double eps_k, bool audit) {
    const int M = session.layout.M;
    const int K = session.K();
    const int G = grid.size();
    if (static_cast<int>(paths.size()) != K) throw Error(Errc::dimension_mismatch, "one path count per user required");
    if (static_cast<int>(obs.Y.size()) != session.V) throw Error(Errc::dimension_mismatch, "one observation per block required");

    Network net(audit);
    std::vector<EstAntenna> ants;
    for (int m = 0; m < M; ++m) ants.emplace_back(m, session, obs, grid, cfg, audit);

    Algorithm3Run run;
    run.result.layout = session.layout;
    run.result.dipole = session.dipole;
    run.result.users.resize(K);

    auto upload_from = [](const Message& msg) { return ProxyUpload{msg.indices, msg.reals}; };

    // Thresholded proxies.
    std::vector<std::vector<ProxyUpload>> uploads(K);
    int round = net.next_round();
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            net.send(ants[m].proxies(k, round));
            uploads[k].push_back(upload_from(net.log().back()));
        }

    // Fallback for users whose pooled lists are too short.
    std::vector<int> short_users;
    for (int k = 0; k < K; ++k)
        if (distinct_indices(uploads[k]) < paths[k]) short_users.push_back(k);
    if (!short_users.empty()) {
        round = net.next_round();
        for (int k : short_users)
            for (int m = 0; m < M; ++m) {
                net.send({round, Direction::cpu_to_lpu, m, PayloadKind::proxy_request, k, {}, {}, {paths[k]}});
                net.send(ants[m].on_request(net.log().back(), round));
                uploads[k][m] = upload_from(net.log().back());
            }
    }

    // Support broadcast and sufficient statistics.
    round = net.next_round();
    std::vector<std::vector<SufficientStats>> stats(K);
    for (int k = 0; k < K; ++k) {
        const std::vector<int> support = fuse_and_select(uploads[k], G, paths[k]);
        const int L = paths[k];
        for (int m = 0; m < M; ++m) {
            net.send({round, Direction::cpu_to_lpu, m, PayloadKind::support, k, {}, {}, support});
            net.send(ants[m].on_support(net.log().back(), round));
            const auto& cx = net.log().back().complexes;
            SufficientStats st;
            st.R = Eigen::Map<const CMat>(cx.data(), L, L);
            st.q = Eigen::Map<const CVec>(cx.data() + L * L, L);
            stats[k].push_back(std::move(st));
        }
        run.result.users[k].support = support;
    }

    // Gains.
    round = net.next_round();
    for (int k = 0; k < K; ++k) {
        CMat R = stats[k][0].R;
        for (int m = 1; m < M; ++m) R += stats[k][m].R;
        const double eps = eps_k < 0.0 ? default_loading(R) : eps_k;
        const CVec alpha = distributed_gains(stats[k], eps);
        for (int m = 0; m < M; ++m) {
            net.send({round, Direction::cpu_to_lpu, m, PayloadKind::gains, k, {}, {alpha.data(), alpha.data() + alpha.size()}, {}});
            ants[m].on_gains(net.log().back(), round);
        }
        auto& u = run.result.users[k];
        u.gains = alpha;
        u.angles.resize(static_cast<Eigen::Index>(u.support.size()));
        for (size_t l = 0; l < u.support.size(); ++l) u.angles(static_cast<Eigen::Index>(l)) = grid[u.support[l]];
    }

    run.log = net.log();
    run.ledger = net.ledger();
    run.result.ledger.uplink = run.ledger.total(Direction::lpu_to_cpu);
    run.result.ledger.downlink = run.ledger.total(Direction::cpu_to_lpu);
    run.result.ledger.rounds = run.ledger.rounds;
    run.result.ledger.fallback = !short_users.empty();
    return run;
}

Algorithm3Run run_algorithm2(const PilotSession& session, const Observations& obs,
                             const AngularGrid& grid, const std::vector<int>& paths, bool audit) {
    const int M = session.layout.M;
    Network net(audit);
    Observations at_cpu;
    for (int v = 0; v < session.V; ++v) {
        const int round = net.next_round();
        CMat Y(M, session.tau);
        for (int m = 0; m < M; ++m) {
            const CVec row = obs.Y.at(v).row(m).transpose();
            net.send({round, Direction::lpu_to_cpu, m, PayloadKind::pilot_block, -1, {}, {row.data(), row.data() + row.size()}, {}});
            const auto& cx = net.log().back().complexes;
            Y.row(m) = Eigen::Map<const CVec>(cx.data(), static_cast<Eigen::Index>(cx.size())).transpose();
        }
        at_cpu.Y.push_back(std::move(Y));
    }
    Algorithm3Run run;
    run.result = centralized_estimate(session, at_cpu, grid, paths);
    run.log = net.log();
    run.ledger = net.ledger();
    return run;
}

}  // namespace fca
