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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcarray/channel.hpp"
#include "fcarray/geometry.hpp"
#include "fcarray/impedance.hpp"
#include "fcarray/precoding.hpp"

namespace fca {

/// Everything the sum rate depends on apart from the coupler positions.
struct SystemModel {
    ArrayLayout layout;
    DipoleModel dipole;
    MultipathSpec spec;
    double p_max = 1.0;   ///< watts
    double sigma2 = 1.0;  ///< common noise variance
};

/// Dipoles default to half-wave on the layout's carrier.
SystemModel make_system(const ArrayLayout& layout, const MultipathSpec& spec, double p_max,
                        double sigma2);

/// R_MMSE(p): impedance blocks, mechanical weights, effective channel, power
/// weights, MMSE precoder and sum rate.
double objective(const CouplerPlacement& placement, const SystemModel& model);

/// Caches the per-antenna column of G and b_m at a base placement so that
/// moving a single antenna costs one block rebuild plus a K x K solve.
/// rate_with() returns exactly what objective() returns on the modified
/// placement.
class RateEvaluator {
public:
    RateEvaluator(const SystemModel& model, const CouplerPlacement& base);

    double rate() const { return rate_; }
    double rate_with(int m, const Vec& p_m) const;

private:
    const SystemModel* model_;
    CMat G_;
    Vec B_;
    double rate_ = 0.0;
};

enum class StepRule { diminishing, constant };

struct SCAConfig {
    double eta0 = 0.0;             ///< initial inverse step, 1/m^2
    double backtrack_factor = 2.0;
    int max_backtracks = 5;
    StepRule alpha_rule = StepRule::diminishing;
    double alpha_constant = 1.0;   ///< used by StepRule::constant
    double eps_stop = 1e-4;        ///< relative rate change; may be +inf
    int T_max = 200;
    double fd_step = 0.0;          ///< meters
    int workers = 1;
    bool snapshots = false;        ///< keep the placement of every iteration

    /// 2/(t+2) for the diminishing rule, t counted from 0.
    double alpha(int t) const;
    void validate() const;
};

/// eta0 = 10/lambda^2, fd_step = 1e-4 lambda, everything else as declared.
SCAConfig default_sca_config(const ArrayLayout& layout);

/// Central differences of the objective with respect to p_m. A coordinate
/// whose forward or backward probe leaves the feasible set falls back to the
/// one-sided difference; Errc::margin_too_small when both probes do.
Vec gradient(const CouplerPlacement& placement, int m, const SystemModel& model, double fd_step);

/// All antennas at once, parallel over (antenna, coordinate). Unlike
/// gradient(), a coordinate pinned on both sides contributes 0 instead of
/// raising, since iterates of Algorithm 1 may sit on the boundary.
std::vector<Vec> gradients(const CouplerPlacement& placement, const SystemModel& model,
                           double fd_step, int workers = 1);

/// Projected ascent step of one antenna: project(p_m + grad / eta) onto the
/// linearized set.
Projection local_step(const Vec& p_m, const Vec& grad, double eta, const LinearizedFeasibleSet& set);

/// p + alpha (candidate - p).
Vec relax(const Vec& p_m, const Vec& candidate, double alpha);

/// Real scalars exchanged by Algorithm 1.
struct SCALedger {
    long long broadcast = 0;  ///< CPU to antennas
    long long upload = 0;     ///< antennas to CPU
    long long total() const { return broadcast + upload; }
    SCALedger& operator+=(const SCALedger& o) {
        broadcast += o.broadcast;
        upload += o.upload;
        return *this;
    }
    bool operator==(const SCALedger&) const = default;
};

/// Per iteration 2NM gradient scalars down and 2NM position scalars up.
/// A backtracking retry adds one step-control scalar per antenna down and
/// another 2NM positions up; a rejected iteration adds one step-control
/// scalar per antenna down.
SCALedger communication_count(int M, int N, int iterations, int retries = 0, int rejections = 0);

struct SCAIteration {
    int t = 0;
    double rate = 0.0;          ///< R^(t+1), equal to R^(t) when skipped
    bool accepted = false;
    int backtracks = 0;
    double eta = 0.0;           ///< inverse step of the last attempt
    double alpha = 0.0;
    Vec grad_norms;             ///< per antenna
    std::vector<int> projection_sweeps;  ///< per antenna, last attempt
    SCALedger comm;
    std::optional<CouplerPlacement> placement;
};

struct SCATrace {
    double initial_rate = 0.0;
    std::vector<SCAIteration> iterations;
    std::string stop_reason;  ///< "converged", "no_ascent" or "max_iterations"
    SCALedger comm;

    std::vector<double> rates() const;  ///< R^(0), R^(1), ...
};

/// What antenna m reports after a step: its relaxed position and the Dykstra
/// sweep count of the projection behind it.
struct Proposal {
    Vec position;
    int sweeps = 0;
};

/// The whole local computation of antenna m: linearize at p_m, take the
/// projected step and relax. Needs nothing beyond p_m, g_m and the layout.
Proposal antenna_proposal(const Vec& p_m, int m, const ArrayLayout& layout, const Vec& grad,
                          double eta, double alpha);

struct SCAResult {
    CouplerPlacement placement;
    PrecodingState state;
    SCATrace trace;
};

/// Hooks through which Algorithm 1 reaches the antennas. The direct
/// implementation calls local_step in process; the runtime module routes the
/// same calls through messages.
class AntennaBank {
public:
    virtual ~AntennaBank() = default;
    /// Delivers g_m to antenna m at the start of iteration t.
    virtual void deliver_gradients(int t, const std::vector<Vec>& grads) = 0;
    /// Every antenna relaxes towards its projected step; attempt > 0 is a
    /// retry with a larger eta. Proposals stay tentative until the next
    /// gradient delivery, which commits them.
    virtual std::vector<Proposal> propose(int t, int attempt, double eta, double alpha) = 0;
    /// All attempts of iteration t failed; antennas drop their proposals.
    virtual void reject(int t) = 0;
};

/// Algorithm 1. Gradients at the CPU, simultaneous projected steps at the
/// antennas, relaxation, then MMSE refresh. A step that lowers the rate is
/// retried with eta scaled by backtrack_factor; when every retry fails the
/// iteration is skipped and the run stops.
SCAResult optimize(const CouplerPlacement& initial, const SCAConfig& config,
                   const SystemModel& model);

/// Same loop over a caller-supplied bank.
SCAResult optimize(const CouplerPlacement& initial, const SCAConfig& config,
                   const SystemModel& model, AntennaBank& bank);

}  // namespace fca
