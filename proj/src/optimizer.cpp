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

#include "fcarray/optimizer.hpp"

#include <cmath>
#include <limits>

#include "fcarray/parallel.hpp"

namespace fca {

SystemModel make_system(const ArrayLayout& layout, const MultipathSpec& spec, double p_max,
                        double sigma2) {
    return {layout, half_wave_dipole(layout), spec, p_max, sigma2};
}

double objective(const CouplerPlacement& placement, const SystemModel& model) {
    return evaluate_fc(model.spec, placement, model.layout, model.dipole, model.p_max, model.sigma2)
        .state.sum_rate;
}

RateEvaluator::RateEvaluator(const SystemModel& model, const CouplerPlacement& base)
    : model_(&model) {
    const auto ev = evaluate_fc(model.spec, base, model.layout, model.dipole, model.p_max, model.sigma2);
    G_ = ev.state.G;
    B_ = ev.state.B;
    rate_ = ev.state.sum_rate;
}

double RateEvaluator::rate_with(int m, const Vec& p_m) const {
    const auto& L = model_->layout;
    const ImpedanceBlock block = build_block(p_m, L.active_position(m), model_->dipole);
    const MechanicalWeights w = mech_weights(block);
    CMat G = G_;
    Vec B = B_;
    G.col(m) = effective_column(model_->spec, m, p_m, L, w);
    B(m) = power_weight(block, w);
    return mmse_precoder(G, B, model_->p_max, model_->sigma2).sum_rate;
}

double SCAConfig::alpha(int t) const {
    return alpha_rule == StepRule::diminishing ? 2.0 / (t + 2.0) : alpha_constant;
}

void SCAConfig::validate() const {
    if (!(eta0 > 0.0)) throw Error(Errc::config, "optimizer.eta0 must be > 0");
    if (!(backtrack_factor > 1.0)) throw Error(Errc::config, "optimizer.backtrack_factor must be > 1");
    if (max_backtracks < 0) throw Error(Errc::config, "optimizer.max_backtracks must be >= 0");
    if (alpha_rule == StepRule::constant && !(alpha_constant > 0.0 && alpha_constant <= 1.0))
        throw Error(Errc::config, "optimizer.alpha_constant must lie in (0, 1]");
    if (!(eps_stop > 0.0)) throw Error(Errc::config, "optimizer.eps_stop must be > 0");
    if (T_max < 1) throw Error(Errc::config, "optimizer.T_max must be >= 1");
    if (!(fd_step > 0.0)) throw Error(Errc::config, "optimizer.fd_step must be > 0");
    if (workers < 1) throw Error(Errc::config, "workers must be >= 1");
}

SCAConfig default_sca_config(const ArrayLayout& layout) {
    SCAConfig c;
    c.eta0 = 10.0 / (layout.lambda() * layout.lambda());
    c.fd_step = 1e-4 * layout.lambda();
    return c;
}

namespace {

// One coordinate of g_m. Probes are checked against the true constraints of
// antenna m before the objective is touched.
double partial(const RateEvaluator& eval, const Vec& p_m, int m, int i, const ArrayLayout& layout,
               double h, bool strict) {
    Vec fwd = p_m;
    Vec bwd = p_m;
    fwd(i) += h;
    bwd(i) -= h;
    const bool fwd_ok = is_feasible_local(fwd, m, layout).feasible;
    const bool bwd_ok = is_feasible_local(bwd, m, layout).feasible;
    if (fwd_ok && bwd_ok) return (eval.rate_with(m, fwd) - eval.rate_with(m, bwd)) / (2.0 * h);
    if (fwd_ok) return (eval.rate_with(m, fwd) - eval.rate()) / h;
    if (bwd_ok) return (eval.rate() - eval.rate_with(m, bwd)) / h;
    if (!strict) return 0.0;  // pinned: no feasible motion along this axis
    throw Error(Errc::margin_too_small, "both probes of antenna " + std::to_string(m) +
                                            " coordinate " + std::to_string(i) + " are infeasible");
}

}  // namespace

Vec gradient(const CouplerPlacement& placement, int m, const SystemModel& model, double fd_step) {
    if (m < 0 || m >= model.layout.M) throw Error(Errc::dimension_mismatch, "antenna index out of range");
    const RateEvaluator eval(model, placement);
    const Vec& p_m = placement.antenna(m);
    Vec g(p_m.size());
    for (Eigen::Index i = 0; i < p_m.size(); ++i)
        g(i) = partial(eval, p_m, m, static_cast<int>(i), model.layout, fd_step, true);
    return g;
}

std::vector<Vec> gradients(const CouplerPlacement& placement, const SystemModel& model,
                           double fd_step, int workers) {
    const int M = model.layout.M;
    const int dim = 2 * model.layout.N;
    std::vector<Vec> g(M, Vec::Zero(dim));
    if (dim == 0) return g;
    const RateEvaluator eval(model, placement);
    std::vector<double> flat(static_cast<size_t>(M) * dim);
    parallel_for(M * dim, workers, [&](int j) {
        const int m = j / dim;
        flat[j] = partial(eval, placement.antenna(m), m, j % dim, model.layout, fd_step, false);
    });
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < dim; ++i) g[m](i) = flat[static_cast<size_t>(m) * dim + i];
    return g;
}

Projection local_step(const Vec& p_m, const Vec& grad, double eta, const LinearizedFeasibleSet& set) {
    return project_onto_set(p_m + grad / eta, set);
}

Vec relax(const Vec& p_m, const Vec& candidate, double alpha) {
    return p_m + alpha * (candidate - p_m);
}

Proposal antenna_proposal(const Vec& p_m, int m, const ArrayLayout& layout, const Vec& grad,
                          double eta, double alpha) {
    const LinearizedFeasibleSet set = linearize_spacing(p_m, m, layout);
    const Projection proj = local_step(p_m, grad, eta, set);
    return {relax(p_m, proj.point, alpha), proj.sweeps};
}

SCALedger communication_count(int M, int N, int iterations, int retries, int rejections) {
    SCALedger c;
    if (N == 0) return c;
    const long long per = 2LL * N * M;
    c.broadcast = per * iterations + static_cast<long long>(M) * (retries + rejections);
    c.upload = per * (iterations + retries);
    return c;
}

std::vector<double> SCATrace::rates() const {
    std::vector<double> r{initial_rate};
    for (const auto& it : iterations) r.push_back(it.rate);
    return r;
}

namespace {

class DirectBank final : public AntennaBank {
public:
    DirectBank(const CouplerPlacement& initial, const ArrayLayout& layout, int workers)
        : layout_(layout), workers_(workers) {
        for (int m = 0; m < layout.M; ++m) p_.push_back(initial.antenna(m));
    }

    void deliver_gradients(int, const std::vector<Vec>& grads) override {
        if (!pending_.empty()) {
            for (int m = 0; m < layout_.M; ++m) p_[m] = pending_[m].position;
            pending_.clear();
        }
        g_ = grads;
    }

    std::vector<Proposal> propose(int, int, double eta, double alpha) override {
        std::vector<Proposal> out(layout_.M);
        parallel_for(layout_.M, workers_, [&](int m) {
            out[m] = antenna_proposal(p_[m], m, layout_, g_[m], eta, alpha);
        });
        pending_ = out;
        return out;
    }

    void reject(int) override { pending_.clear(); }

private:
    ArrayLayout layout_;
    int workers_;
    std::vector<Vec> p_;
    std::vector<Vec> g_;
    std::vector<Proposal> pending_;
};

}  // namespace

SCAResult optimize(const CouplerPlacement& initial, const SCAConfig& config,
                   const SystemModel& model) {
    DirectBank bank(initial, model.layout, config.workers);
    return optimize(initial, config, model, bank);
}

SCAResult optimize(const CouplerPlacement& initial, const SCAConfig& config,
                   const SystemModel& model, AntennaBank& bank) {
    config.validate();
    const auto& L = model.layout;
    if (!is_feasible(initial, L))
        throw Error(Errc::infeasible_layout, "initial placement is infeasible");

    SCAResult res;
    res.placement = initial;
    double rate = objective(initial, model);
    res.trace.initial_rate = rate;
    const long long grad_scalars = 2LL * L.N * L.M;

    for (int t = 0; t < config.T_max; ++t) {
        SCAIteration it;
        it.t = t;
        it.alpha = config.alpha(t);

        const std::vector<Vec> g = gradients(res.placement, model, config.fd_step, config.workers);
        it.grad_norms.resize(L.M);
        for (int m = 0; m < L.M; ++m) it.grad_norms(m) = g[m].norm();
        bank.deliver_gradients(t, g);
        it.comm.broadcast += grad_scalars;

        double eta = config.eta0;
        CouplerPlacement next(L.M, L.N);
        double next_rate = -std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt <= config.max_backtracks; ++attempt) {
            if (attempt > 0) {
                eta *= config.backtrack_factor;
                if (L.N > 0) it.comm.broadcast += L.M;
            }
            const std::vector<Proposal> props = bank.propose(t, attempt, eta, it.alpha);
            it.comm.upload += grad_scalars;
            it.projection_sweeps.assign(L.M, 0);
            for (int m = 0; m < L.M; ++m) {
                next.antenna(m) = props[m].position;
                it.projection_sweeps[m] = props[m].sweeps;
            }
            it.backtracks = attempt;
            it.eta = eta;
            next_rate = objective(next, model);
            if (next_rate >= rate) {
                it.accepted = true;
                break;
            }
        }

        double change = 0.0;
        if (it.accepted) {
            change = std::abs(next_rate - rate) / (rate > 0.0 ? rate : 1.0);
            res.placement = next;
            rate = next_rate;
        } else {
            bank.reject(t);
            if (L.N > 0) it.comm.broadcast += L.M;
        }
        it.rate = rate;
        if (config.snapshots) it.placement = res.placement;
        res.trace.comm += it.comm;
        res.trace.iterations.push_back(std::move(it));

        if (!res.trace.iterations.back().accepted) {
            res.trace.stop_reason = "no_ascent";
            break;
        }
        if (change <= config.eps_stop) {
            res.trace.stop_reason = "converged";
            break;
        }
    }
    if (res.trace.stop_reason.empty()) res.trace.stop_reason = "max_iterations";

    res.state = evaluate_fc(model.spec, res.placement, L, model.dipole, model.p_max, model.sigma2).state;
    return res;
}

}  // namespace fca
