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

#include <vector>

#include "fcarray/channel.hpp"
#include "fcarray/common.hpp"
#include "fcarray/geometry.hpp"
#include "fcarray/impedance.hpp"

namespace fca {

/// Mechanical beamforming vector of one FC antenna: w solves
/// (Z_hat + X) w = z_bar, and the coupler currents are -w times the active
/// current.
struct MechanicalWeights {
    CVec w;
    double condition = 1.0;

    /// [1; -w]
    CVec extended() const;
};

/// Largest condition number of Z_hat + X accepted by mech_weights.
inline constexpr double kMaxCondition = 1e12;

MechanicalWeights mech_weights(const ImpedanceBlock& block);
std::vector<MechanicalWeights> mech_weights(const std::vector<ImpedanceBlock>& blocks);

/// b_m(phi; p_m) = [a_y(phi)]_m - w_m^T a_C(phi; p_m): the far-field response
/// of antenna m seen through its couplers.
cplx coupled_response(double phi, int m, const Vec& p_m, const ArrayLayout& layout,
                      const MechanicalWeights& weights);

/// K x M effective channel. Row k is h_k^T W~(p), so y = G U s + n; entry
/// (k, m) is h_A,k[m] - w_m^T h_C,k,m.
CMat effective_channel(const MultipathSpec& spec, const CouplerPlacement& placement,
                       const ArrayLayout& layout, const std::vector<MechanicalWeights>& weights);

/// Column m of the effective channel: the K scalars h_A,k[m] - w_m^T h_C,k,m
/// computed from antenna m's local placement only.
CVec effective_column(const MultipathSpec& spec, int m, const Vec& p_m, const ArrayLayout& layout,
                      const MechanicalWeights& weights);

/// b_m = w~^H Re{Z_m} w~ for one antenna. Throws Errc::non_positive_power.
double power_weight(const ImpedanceBlock& block, const MechanicalWeights& weights);

/// Diagonal of B(p): b_m = w~_m^H Re{Z_m} w~_m. Throws Errc::non_positive_power
/// when some b_m <= 0.
Vec power_matrix(const std::vector<ImpedanceBlock>& blocks,
                 const std::vector<MechanicalWeights>& weights);

struct PrecodingState {
    CMat G;        ///< K x M effective channel
    Vec B;         ///< power weights b_m
    CMat U;        ///< M x K digital precoder
    CMat F;        ///< whitened precoder B^{1/2} U
    double alpha = 0.0;  ///< regularizer K sigma^2 / P_max
    double beta = 0.0;   ///< power loading factor
    Vec sinr;
    double sum_rate = 0.0;  ///< bits/s/Hz
};

/// Regularized zero-forcing on the whitened channel G B^{-1/2}, loaded so
/// that tr(U^H diag(B) U) = P_max.
PrecodingState mmse_precoder(const CMat& G, const Vec& B, double p_max, double sigma2);

struct RateResult {
    Vec sinr;
    double sum_rate = 0.0;
};

/// gamma_k = |G_k u_k|^2 / (sum_{j != k} |G_k u_j|^2 + sigma2).
RateResult sinr_and_rate(const CMat& G, const CMat& U, double sigma2);

struct FullyActiveResult {
    CMat H;     ///< K x M(N+1) port channel, ports ordered [actives; couplers]
    CMat R;     ///< Re{Z} over the same ports
    CMat U;     ///< port precoder
    double power = 0.0;  ///< tr(U^H Re{Z} U)
    Vec sinr;
    double sum_rate = 0.0;
};

/// Every element driven by its own RF chain, MMSE-precoded under the
/// radiated-power metric tr(U^H Re{Z} U) <= P_max.
FullyActiveResult fully_active_rate(const MultipathSpec& spec, const CouplerPlacement& placement,
                                    const ArrayLayout& layout, const DipoleModel& model,
                                    double p_max, double sigma2);

/// Full FC pipeline at one placement: impedance blocks, mechanical weights,
/// effective channel, power weights and the MMSE precoder.
struct FcEvaluation {
    std::vector<ImpedanceBlock> blocks;
    std::vector<MechanicalWeights> weights;
    PrecodingState state;
};

FcEvaluation evaluate_fc(const MultipathSpec& spec, const CouplerPlacement& placement,
                         const ArrayLayout& layout, const DipoleModel& model, double p_max,
                         double sigma2);

/// The M active elements alone (no couplers).
double active_only_rate(const MultipathSpec& spec, const ArrayLayout& layout,
                        const DipoleModel& model, double p_max, double sigma2);

}  // namespace fca
