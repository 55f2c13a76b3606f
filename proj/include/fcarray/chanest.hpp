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

#include <cstdint>
#include <random>
#include <vector>

#include "fcarray/channel.hpp"
#include "fcarray/geometry.hpp"
#include "fcarray/impedance.hpp"
#include "fcarray/precoding.hpp"

namespace fca {

/// K x tau pilots taken from the tau-point harmonic family, row r being
/// exp(j 2pi r t / tau). The seed picks which K of the tau rows are used, so
/// S S^H = tau I holds for every seed. Throws Errc::tau_too_short if tau < K.
CMat make_pilots(int K, int tau, std::uint64_t seed);

/// G angles spaced uniformly on [-pi/2, pi/2], endpoints included.
class AngularGrid {
public:
    explicit AngularGrid(int G = 256);
    int size() const { return static_cast<int>(phi_.size()); }
    double operator[](int j) const { return phi_(j); }
    const Vec& angles() const { return phi_; }
    double spacing() const { return phi_(1) - phi_(0); }

private:
    Vec phi_;
};

/// Training protocol state: pilots, V blocks of tau slots, the coupler
/// placement of every block and the mechanical weights it induces.
struct PilotSession {
    ArrayLayout layout;
    DipoleModel dipole;
    CMat S;
    int V = 0;
    int tau = 0;
    std::vector<CouplerPlacement> placements;             ///< one per block
    std::vector<std::vector<MechanicalWeights>> weights;  ///< [v][m]
    Vec noise_variance;                                   ///< sigma_m^2 per antenna

    int K() const { return static_cast<int>(S.rows()); }
};

/// Pilots from make_pilots(K, tau, seed); block placements drawn by rejection
/// sampling from an engine seeded with the same seed.
PilotSession make_session(const ArrayLayout& layout, const DipoleModel& dipole, int K, int V,
                          int tau, double noise_variance, std::uint64_t seed);

/// Same, with caller-chosen block placements.
PilotSession make_session(const ArrayLayout& layout, const DipoleModel& dipole, const CMat& S,
                          std::vector<CouplerPlacement> placements, const Vec& noise_variance);

/// Received pilots of every block: Y[v] is M x tau, row m being y_m^[v].
struct Observations {
    std::vector<CMat> Y;
};

/// y_m^[v] = w~_m^T H_m S + n_m for all m at block v; noise i.i.d.
/// CN(0, sigma_m^2) drawn row by row from rng.
CMat simulate_rx(const PilotSession& session, const MultipathSpec& spec, int v, std::mt19937_64& rng);

/// All V blocks from a single engine seeded with seed.
Observations simulate_rx(const PilotSession& session, const MultipathSpec& spec, std::uint64_t seed);

/// (1/tau) y S^H for one antenna row: the K effective-channel estimates.
CVec pilot_correlate(const CVec& y_row, const CMat& S);

/// Stacked sparse-recovery dictionaries. Row v M + m of A holds
/// b_m(phi_j; p_m^[v]) (block-major, antenna-minor); local[m] is the V x G
/// matrix with rows indexed by v.
struct Dictionary {
    CMat A;
    std::vector<CMat> local;
};

Dictionary build_dictionary(const PilotSession& session, const AngularGrid& grid);

/// A_m from antenna m's own block placements and weights; identical to
/// build_dictionary(...).local[m].
CMat local_dictionary(const std::vector<Vec>& p_m_blocks,
                      const std::vector<MechanicalWeights>& w_m_blocks, int m,
                      const ArrayLayout& layout, const AngularGrid& grid);

/// Tolerance on the diagonal of the triangular factor, relative to the norm
/// of the column it belongs to.
inline constexpr double kRankTolerance = 1e-10;

struct OmpResult {
    std::vector<int> support;            ///< in selection order
    std::vector<double> residual_norms;  ///< |y| first, then after each selection
    CVec gains;                          ///< LS fit on the support
};

/// Exactly L greedy selections of the column with the largest normalized
/// correlation |a_j^H r| / |a_j|, ties to the lowest index, with an
/// orthogonal refit after each one. Throws Errc::rank_deficient_support.
OmpResult omp(const CVec& y, const CMat& A, int L);

/// (A_k^H A_k)^{-1} A_k^H y over the support columns, solved through the
/// Cholesky factor of the Gram matrix.
CVec ls_gains(const CVec& y, const CMat& A, const std::vector<int>& support);

/// Per-antenna pilot-correlated observations: yhat[m] is K x V, entry (k, v)
/// being ghat_{m,k}^[v].
std::vector<CMat> correlate_all(const Observations& obs, const CMat& S);

/// Stacked yhat_k (length M V, block-major) from the per-antenna estimates.
CVec stack_user(const std::vector<CMat>& ghat, int k);

/// Communication of one estimation run, in real-scalar units (a complex
/// value counts 2, a grid index 1).
struct EstimationLedger {
    long long uplink = 0;
    long long downlink = 0;
    long long measurements = 0;  ///< exhaustive baseline: measured channel values per user per block
    int rounds = 0;
    bool fallback = false;       ///< distributed fusion needed the extra top-L round
    long long total() const { return uplink + downlink; }
};

struct UserEstimate {
    std::vector<int> support;
    Vec angles;
    CVec gains;
};

struct EstimationResult {
    ArrayLayout layout;
    DipoleModel dipole;
    std::vector<UserEstimate> users;
    EstimationLedger ledger;
};

/// Algorithm 2: stack, OMP with L_k selections, grid mapping and LS gains.
/// The ledger charges the raw pilot uploads, M V tau complex values, one round
/// per block.
EstimationResult centralized_estimate(const PilotSession& session, const Observations& obs,
                                      const AngularGrid& grid, const std::vector<int>& paths);

struct ProxyConfig {
    double eta = 4.0;       ///< threshold in units of the effective noise
    double eps_n = 1e-12;
};

struct LocalProxy {
    Vec rho;                 ///< length G
    std::vector<int> kept;   ///< indices with rho >= eta sigma_eff^2, ascending
};

/// Matched-filter energy rho(j) = |a_m(phi_j)^H y|^2 / (|a_m(phi_j)|^2 + eps_n)
/// and its noise-calibrated hard threshold.
LocalProxy local_proxy(const CMat& A_m, const CVec& y_mk, double sigma_eff2, const ProxyConfig& cfg);

/// One antenna's upload: index-value pairs.
struct ProxyUpload {
    std::vector<int> index;
    std::vector<double> value;
};

ProxyUpload upload_of(const LocalProxy& proxy);

/// The L unthresholded largest proxies (descending, ties to the lower index).
ProxyUpload top_proxies(const LocalProxy& proxy, int L);

/// Aggregated score s(j) = sum_m rho_m(j) over uploads containing j, then the
/// L best grid points in descending score, ties to the lowest index.
std::vector<int> fuse_and_select(const std::vector<ProxyUpload>& uploads, int G, int L);

/// Number of distinct indices across the uploads.
int distinct_indices(const std::vector<ProxyUpload>& uploads);

/// R_{m,k} = A^H A and q_{m,k} = A^H y on the support columns of A_m.
struct SufficientStats {
    CMat R;
    CVec q;
};

SufficientStats sufficient_stats(const CMat& A_m, const CVec& y_mk, const std::vector<int>& support);

/// Loading used by distributed_gains: 1e-8 tr(R) / L.
double default_loading(const CMat& R);

/// Sums the per-antenna statistics in antenna order and solves
/// (R + eps I) alpha = q. Throws Errc::singular_aggregate when the loaded
/// matrix has condition above 1e12.
CVec distributed_gains(const std::vector<SufficientStats>& stats, double eps);

/// Algorithm 3 end to end in process. eps_k < 0 selects default_loading.
EstimationResult distributed_estimate(const PilotSession& session, const Observations& obs,
                                      const AngularGrid& grid, const std::vector<int>& paths,
                                      const ProxyConfig& cfg = {}, double eps_k = -1.0);

/// ghat_{m,k}(p_m) = sum_l alpha_l b_m(phi_l; p_m) with weights recomputed at
/// the query placement. Returns K x M.
CMat reconstruct(const EstimationResult& result, const CouplerPlacement& placement);

/// Mean over users and placements of sum_m |ghat - g|^2 / sum_m |g|^2.
/// Throws Errc::zero_channel if some denominator vanishes.
double nmse(const EstimationResult& result, const MultipathSpec& spec,
            const std::vector<CouplerPlacement>& placements);

/// |alpha_hat - alpha|^2 / |alpha|^2 averaged over users after pairing each
/// true path with the estimated path of nearest angle. Meaningful only when
/// the supports match.
double gain_nmse(const EstimationResult& result, const MultipathSpec& spec);

/// Measures every antenna's effective channel with one coupler at a time
/// swept over a sqrt(D) x sqrt(D) lattice in its region while the others sit
/// at a reference placement; reconstructs by nearest-candidate lookup per
/// coupler, adding the per-coupler deviations from the reference value.
class ExhaustiveBaseline {
public:
    /// noise_variance is the per-antenna pre-correlation variance; every
    /// measurement is one pilot-correlated block of length tau.
    ExhaustiveBaseline(const ArrayLayout& layout, const DipoleModel& dipole, const MultipathSpec& spec,
                       const CouplerPlacement& reference, int D, int tau, double noise_variance,
                       std::uint64_t seed);

    /// K x M predicted effective channel at a query placement.
    CMat predict(const CouplerPlacement& placement) const;

    /// Candidate lattice of antenna m, as 2-vectors in meters.
    const std::vector<Vec2>& candidates(int m) const { return cand_[m]; }
    const EstimationLedger& ledger() const { return ledger_; }
    const ArrayLayout& layout() const { return layout_; }
    const DipoleModel& dipole() const { return dipole_; }

private:
    ArrayLayout layout_;
    DipoleModel dipole_;
    int K_ = 0;
    std::vector<std::vector<Vec2>> cand_;           ///< [m][d]
    std::vector<std::vector<std::vector<bool>>> ok_;  ///< [m][n][d] feasible with others at reference
    std::vector<std::vector<std::vector<CVec>>> g_;   ///< [m][n][d] measured K-vector
    std::vector<CVec> g_ref_;                       ///< [m]
    EstimationLedger ledger_;
};

/// Mean NMSE of the exhaustive predictor on the given placements.
double nmse(const ExhaustiveBaseline& baseline, const MultipathSpec& spec,
            const std::vector<CouplerPlacement>& placements);

}  // namespace fca
