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

#include "fcarray/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fca {

CMat make_pilots(int K, int tau, std::uint64_t seed) {
    if (K < 1) throw Error(Errc::config, "pilots need K >= 1");
    if (tau < K) throw Error(Errc::tau_too_short, "tau = " + std::to_string(tau) + " < K = " + std::to_string(K));
    std::vector<int> rows(tau);
    std::iota(rows.begin(), rows.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    CMat S(K, tau);
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < tau; ++t)
            S(k, t) = std::exp(kJ * (2.0 * kPi * static_cast<double>((rows[k] * t) % tau) / tau));
    return S;
}

AngularGrid::AngularGrid(int G) {
    if (G < 2) throw Error(Errc::config, "estimation.G must be >= 2");
    phi_ = Vec::LinSpaced(G, -0.5 * kPi, 0.5 * kPi);
}

PilotSession make_session(const ArrayLayout& layout, const DipoleModel& dipole, const CMat& S,
                          std::vector<CouplerPlacement> placements, const Vec& noise_variance) {
    if (placements.empty()) throw Error(Errc::config, "estimation.V must be >= 1");
    if (noise_variance.size() != layout.M)
        throw Error(Errc::dimension_mismatch, "one noise variance per antenna required");
    if ((noise_variance.array() < 0.0).any())
        throw Error(Errc::config, "noise variance must be >= 0");
    PilotSession s;
    s.layout = layout;
    s.dipole = dipole;
    s.S = S;
    s.V = static_cast<int>(placements.size());
    s.tau = static_cast<int>(S.cols());
    s.noise_variance = noise_variance;
    for (const auto& p : placements) {
        if (!is_feasible(p, layout)) throw Error(Errc::infeasible_layout, "training placement is infeasible");
        s.weights.push_back(mech_weights(build_blocks(p, layout, dipole)));
    }
    s.placements = std::move(placements);
    return s;
}

PilotSession make_session(const ArrayLayout& layout, const DipoleModel& dipole, int K, int V,
                          int tau, double noise_variance, std::uint64_t seed) {
    if (V < 1) throw Error(Errc::config, "estimation.V must be >= 1");
    const CMat S = make_pilots(K, tau, seed);
    std::mt19937_64 rng(seed);
    std::vector<CouplerPlacement> placements;
    for (int v = 0; v < V; ++v) placements.push_back(random_feasible_placement(layout, rng));
    return make_session(layout, dipole, S, std::move(placements), Vec::Constant(layout.M, noise_variance));
}

CMat simulate_rx(const PilotSession& session, const MultipathSpec& spec, int v, std::mt19937_64& rng) {
    if (v < 0 || v >= session.V) throw Error(Errc::dimension_mismatch, "block index out of range");
    if (spec.K() != session.K()) throw Error(Errc::dimension_mismatch, "spec and pilots differ in K");
    const CMat G = effective_channel(spec, session.placements[v], session.layout, session.weights[v]);
    CMat Y = G.transpose() * session.S;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int m = 0; m < session.layout.M; ++m) {
        const double sd = std::sqrt(0.5 * session.noise_variance(m));
        for (int t = 0; t < session.tau; ++t) {
            const double re = normal(rng);
            const double im = normal(rng);
            Y(m, t) += sd * cplx(re, im);
        }
    }
    return Y;
}

Observations simulate_rx(const PilotSession& session, const MultipathSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Observations obs;
    for (int v = 0; v < session.V; ++v) obs.Y.push_back(simulate_rx(session, spec, v, rng));
    return obs;
}

CVec pilot_correlate(const CVec& y_row, const CMat& S) {
    if (y_row.size() != S.cols()) throw Error(Errc::dimension_mismatch, "pilot row length differs from tau");
    return (S.conjugate() * y_row) / static_cast<double>(S.cols());
}

CMat local_dictionary(const std::vector<Vec>& p_m_blocks,
                      const std::vector<MechanicalWeights>& w_m_blocks, int m,
                      const ArrayLayout& layout, const AngularGrid& grid) {
    if (p_m_blocks.size() != w_m_blocks.size())
        throw Error(Errc::dimension_mismatch, "one weight vector per block required");
    const int V = static_cast<int>(p_m_blocks.size());
    CMat A(V, grid.size());
    for (int v = 0; v < V; ++v)
        for (int j = 0; j < grid.size(); ++j)
            A(v, j) = coupled_response(grid[j], m, p_m_blocks[v], layout, w_m_blocks[v]);
    return A;
}

Dictionary build_dictionary(const PilotSession& session, const AngularGrid& grid) {
    const int M = session.layout.M;
    const int V = session.V;
    Dictionary d;
    d.A.resize(static_cast<Eigen::Index>(M) * V, grid.size());
    for (int m = 0; m < M; ++m) {
        std::vector<Vec> p;
        std::vector<MechanicalWeights> w;
        for (int v = 0; v < V; ++v) {
            p.push_back(session.placements[v].antenna(m));
            w.push_back(session.weights[v][m]);
        }
        d.local.push_back(local_dictionary(p, w, m, session.layout, grid));
        for (int v = 0; v < V; ++v) d.A.row(v * M + m) = d.local[m].row(v);
    }
    return d;
}

OmpResult omp(const CVec& y, const CMat& A, int L) {
    const auto G = A.cols();
    if (L < 0 || L > G) throw Error(Errc::config, "OMP needs 0 <= L <= G");
    if (y.size() != A.rows()) throw Error(Errc::dimension_mismatch, "y and A differ in rows");
    const Vec norms = A.colwise().norm().transpose();

    OmpResult out;
    CVec r = y;
    out.residual_norms.push_back(r.norm());
    CMat Q(A.rows(), L);
    CMat R = CMat::Zero(L, L);
    std::vector<bool> taken(G, false);

    for (int s = 0; s < L; ++s) {
        int best = -1;
        double best_val = -1.0;
        for (Eigen::Index j = 0; j < G; ++j) {
            if (taken[j] || norms(j) == 0.0) continue;
            const double c = std::abs(A.col(j).dot(r)) / norms(j);
            if (c > best_val) {
                best_val = c;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) throw Error(Errc::rank_deficient_support, "no nonzero column left to select");

        // Modified Gram-Schmidt with one reorthogonalization pass.
        CVec q = A.col(best);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < s; ++i) {
                const cplx c = Q.col(i).dot(q);
                R(i, s) += c;
                q -= c * Q.col(i);
            }
        const double diag = q.norm();
        if (!(diag > kRankTolerance * norms(best)))
            throw Error(Errc::rank_deficient_support,
                        "column " + std::to_string(best) + " is dependent on the current support");
        R(s, s) = diag;
        Q.col(s) = q / diag;
        taken[best] = true;
        out.support.push_back(best);

        r -= Q.col(s).dot(r) * Q.col(s);
        out.residual_norms.push_back(r.norm());
    }

    if (L > 0) {
        const CVec z = Q.adjoint() * y;
        out.gains = R.triangularView<Eigen::Upper>().solve(z);
    } else {
        out.gains.resize(0);
    }
    return out;
}

CVec ls_gains(const CVec& y, const CMat& A, const std::vector<int>& support) {
    const int L = static_cast<int>(support.size());
    if (y.size() != A.rows()) throw Error(Errc::dimension_mismatch, "y and A differ in rows");
    if (L == 0) return CVec(0);
    CMat Ak(A.rows(), L);
    for (int l = 0; l < L; ++l) {
        if (support[l] < 0 || support[l] >= A.cols()) throw Error(Errc::dimension_mismatch, "support index out of range");
        Ak.col(l) = A.col(support[l]);
    }
    const CMat gram = Ak.adjoint() * Ak;
    Eigen::LLT<CMat> llt(gram);
    const Vec colnorm = Ak.colwise().norm().transpose();
    if (llt.info() != Eigen::Success)
        throw Error(Errc::rank_deficient_support, "support Gram matrix is not positive definite");
    const Vec diag = llt.matrixL().toDenseMatrix().diagonal().real();
    for (int l = 0; l < L; ++l)
        if (!(diag(l) > kRankTolerance * colnorm(l)))
            throw Error(Errc::rank_deficient_support, "support columns are numerically dependent");
    return llt.solve(Ak.adjoint() * y);
}

std::vector<CMat> correlate_all(const Observations& obs, const CMat& S) {
    const int V = static_cast<int>(obs.Y.size());
    if (V == 0) return {};
    const int M = static_cast<int>(obs.Y[0].rows());
    const int K = static_cast<int>(S.rows());
    std::vector<CMat> out(M, CMat(K, V));
    for (int v = 0; v < V; ++v)
        for (int m = 0; m < M; ++m) out[m].col(v) = pilot_correlate(obs.Y[v].row(m).transpose(), S);
    return out;
}

CVec stack_user(const std::vector<CMat>& ghat, int k) {
    const int M = static_cast<int>(ghat.size());
    const int V = M > 0 ? static_cast<int>(ghat[0].cols()) : 0;
    CVec y(static_cast<Eigen::Index>(M) * V);
    for (int v = 0; v < V; ++v)
        for (int m = 0; m < M; ++m) y(v * M + m) = ghat[m](k, v);
    return y;
}

namespace {

UserEstimate make_estimate(const std::vector<int>& support, const CVec& gains, const AngularGrid& grid) {
    UserEstimate u;
    u.support = support;
    u.angles.resize(static_cast<Eigen::Index>(support.size()));
    for (size_t l = 0; l < support.size(); ++l) u.angles(static_cast<Eigen::Index>(l)) = grid[support[l]];
    u.gains = gains;
    return u;
}

void check_paths(const std::vector<int>& paths, int K, int G) {
    if (static_cast<int>(paths.size()) != K) throw Error(Errc::dimension_mismatch, "one path count per user required");
    for (int L : paths)
        if (L < 1 || L > G) throw Error(Errc::config, "path counts must lie in [1, G]");
}

}  // namespace

EstimationResult centralized_estimate(const PilotSession& session, const Observations& obs,
                                      const AngularGrid& grid, const std::vector<int>& paths) {
    const int K = session.K();
    check_paths(paths, K, grid.size());
    if (static_cast<int>(obs.Y.size()) != session.V) throw Error(Errc::dimension_mismatch, "one observation per block required");

    EstimationResult res;
    res.layout = session.layout;
    res.dipole = session.dipole;
    res.ledger.uplink = 2LL * session.layout.M * session.V * session.tau;
    res.ledger.rounds = session.V;  // one uplink round per training block

    const std::vector<CMat> ghat = correlate_all(obs, session.S);
    const Dictionary dict = build_dictionary(session, grid);
    for (int k = 0; k < K; ++k) {
        const CVec y = stack_user(ghat, k);
        const OmpResult o = omp(y, dict.A, paths[k]);
        res.users.push_back(make_estimate(o.support, ls_gains(y, dict.A, o.support), grid));
    }
    return res;
}

LocalProxy local_proxy(const CMat& A_m, const CVec& y_mk, double sigma_eff2, const ProxyConfig& cfg) {
    if (y_mk.size() != A_m.rows()) throw Error(Errc::dimension_mismatch, "local observation and dictionary differ");
    LocalProxy p;
    const CVec c = A_m.adjoint() * y_mk;
    const Vec energy = A_m.colwise().squaredNorm().transpose();
    p.rho = c.cwiseAbs2().cwiseQuotient((energy.array() + cfg.eps_n).matrix());
    const double threshold = cfg.eta * sigma_eff2;
    for (Eigen::Index j = 0; j < p.rho.size(); ++j)
        if (p.rho(j) >= threshold && p.rho(j) > 0.0) p.kept.push_back(static_cast<int>(j));
    return p;
}

ProxyUpload upload_of(const LocalProxy& proxy) {
    ProxyUpload u;
    for (int j : proxy.kept) {
        u.index.push_back(j);
        u.value.push_back(proxy.rho(j));
    }
    return u;
}

namespace {

// Indices of the L largest entries, descending, ties to the lower index.
std::vector<int> top_indices(const Vec& score, int L) {
    std::vector<int> idx(score.size());
    std::iota(idx.begin(), idx.end(), 0);
    const int take = std::min<int>(L, static_cast<int>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), [&](int a, int b) {
        return score(a) > score(b) || (score(a) == score(b) && a < b);
    });
    idx.resize(take);
    return idx;
}

}  // namespace

ProxyUpload top_proxies(const LocalProxy& proxy, int L) {
    ProxyUpload u;
    for (int j : top_indices(proxy.rho, L)) {
        u.index.push_back(j);
        u.value.push_back(proxy.rho(j));
    }
    return u;
}

std::vector<int> fuse_and_select(const std::vector<ProxyUpload>& uploads, int G, int L) {
    Vec s = Vec::Zero(G);
    for (const auto& u : uploads)
        for (size_t i = 0; i < u.index.size(); ++i) {
            if (u.index[i] < 0 || u.index[i] >= G) throw Error(Errc::dimension_mismatch, "uploaded index out of range");
            s(u.index[i]) += u.value[i];
        }
    return top_indices(s, L);
}

int distinct_indices(const std::vector<ProxyUpload>& uploads) {
    std::vector<int> all;
    for (const auto& u : uploads) all.insert(all.end(), u.index.begin(), u.index.end());
    std::sort(all.begin(), all.end());
    return static_cast<int>(std::unique(all.begin(), all.end()) - all.begin());
}

SufficientStats sufficient_stats(const CMat& A_m, const CVec& y_mk, const std::vector<int>& support) {
    const int L = static_cast<int>(support.size());
    CMat Ag(A_m.rows(), L);
    for (int l = 0; l < L; ++l) Ag.col(l) = A_m.col(support[l]);
    return {Ag.adjoint() * Ag, Ag.adjoint() * y_mk};
}

double default_loading(const CMat& R) {
    return R.rows() > 0 ? 1e-8 * R.trace().real() / static_cast<double>(R.rows()) : 0.0;
}

CVec distributed_gains(const std::vector<SufficientStats>& stats, double eps) {
    if (stats.empty()) throw Error(Errc::dimension_mismatch, "no sufficient statistics");
    CMat R = stats[0].R;
    CVec q = stats[0].q;
    for (size_t m = 1; m < stats.size(); ++m) {
        R += stats[m].R;
        q += stats[m].q;
    }
    const auto L = R.rows();
    if (L == 0) return CVec(0);
    const CMat loaded = R + eps * CMat::Identity(L, L);
    const Vec ev = Eigen::SelfAdjointEigenSolver<CMat>(loaded, Eigen::EigenvaluesOnly).eigenvalues();
    if (!(ev(0) > 0.0) || ev(L - 1) / ev(0) > 1e12)
        throw Error(Errc::singular_aggregate, "aggregated Gram matrix is singular");
    return loaded.llt().solve(q);
}

EstimationResult distributed_estimate(const PilotSession& session, const Observations& obs,
                                      const AngularGrid& grid, const std::vector<int>& paths,
                                      const ProxyConfig& cfg, double eps_k) {
    const int K = session.K();
    const int M = session.layout.M;
    const int G = grid.size();
    check_paths(paths, K, G);
    if (static_cast<int>(obs.Y.size()) != session.V) throw Error(Errc::dimension_mismatch, "one observation per block required");

    EstimationResult res;
    res.layout = session.layout;
    res.dipole = session.dipole;
    res.ledger.rounds = 3;

    const std::vector<CMat> ghat = correlate_all(obs, session.S);
    const Dictionary dict = build_dictionary(session, grid);

    for (int k = 0; k < K; ++k) {
        const int L = paths[k];
        std::vector<LocalProxy> proxies;
        std::vector<ProxyUpload> uploads;
        for (int m = 0; m < M; ++m) {
            const double sigma_eff2 = session.noise_variance(m) / session.tau;
            proxies.push_back(local_proxy(dict.local[m], ghat[m].row(k).transpose(), sigma_eff2, cfg));
            uploads.push_back(upload_of(proxies.back()));
            res.ledger.uplink += 2LL * static_cast<long long>(uploads.back().index.size());
        }
        if (distinct_indices(uploads) < L) {
            res.ledger.fallback = true;
            for (int m = 0; m < M; ++m) {
                uploads[m] = top_proxies(proxies[m], L);
                res.ledger.downlink += 1;
                res.ledger.uplink += 2LL * static_cast<long long>(uploads[m].index.size());
            }
        }
        const std::vector<int> support = fuse_and_select(uploads, G, L);
        res.ledger.downlink += static_cast<long long>(M) * L;

        std::vector<SufficientStats> stats;
        for (int m = 0; m < M; ++m) {
            stats.push_back(sufficient_stats(dict.local[m], ghat[m].row(k).transpose(), support));
            res.ledger.uplink += 2LL * (L * L + L);
        }
        CMat R = stats[0].R;
        for (int m = 1; m < M; ++m) R += stats[m].R;
        const double eps = eps_k < 0.0 ? default_loading(R) : eps_k;
        const CVec alpha = distributed_gains(stats, eps);
        res.ledger.downlink += 2LL * M * L;
        res.users.push_back(make_estimate(support, alpha, grid));
    }
    if (res.ledger.fallback) res.ledger.rounds += 1;
    return res;
}

CMat reconstruct(const EstimationResult& result, const CouplerPlacement& placement) {
    const auto& L = result.layout;
    const auto weights = mech_weights(build_blocks(placement, L, result.dipole));
    const int K = static_cast<int>(result.users.size());
    CMat g = CMat::Zero(K, L.M);
    for (int k = 0; k < K; ++k) {
        const auto& u = result.users[k];
        for (int m = 0; m < L.M; ++m)
            for (Eigen::Index l = 0; l < u.gains.size(); ++l)
                g(k, m) += u.gains(l) * coupled_response(u.angles(l), m, placement.antenna(m), L, weights[m]);
    }
    return g;
}

namespace {

double nmse_of(const CMat& est, const CMat& truth) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < truth.rows(); ++k) {
        const double den = truth.row(k).squaredNorm();
        if (!(den > 0.0)) throw Error(Errc::zero_channel, "user " + std::to_string(k) + " has a zero channel");
        acc += (est.row(k) - truth.row(k)).squaredNorm() / den;
    }
    return acc / static_cast<double>(truth.rows());
}

CMat true_channel(const MultipathSpec& spec, const CouplerPlacement& p, const ArrayLayout& layout,
                  const DipoleModel& dipole) {
    return effective_channel(spec, p, layout, mech_weights(build_blocks(p, layout, dipole)));
}

}  // namespace

double nmse(const EstimationResult& result, const MultipathSpec& spec,
            const std::vector<CouplerPlacement>& placements) {
    if (placements.empty()) throw Error(Errc::config, "NMSE needs at least one test placement");
    double acc = 0.0;
    for (const auto& p : placements)
        acc += nmse_of(reconstruct(result, p), true_channel(spec, p, result.layout, result.dipole));
    return acc / static_cast<double>(placements.size());
}

double gain_nmse(const EstimationResult& result, const MultipathSpec& spec) {
    if (static_cast<int>(result.users.size()) != spec.K()) throw Error(Errc::dimension_mismatch, "user count differs");
    double acc = 0.0;
    for (int k = 0; k < spec.K(); ++k) {
        const auto& truth = spec.users[k];
        const auto& est = result.users[k];
        double err = 0.0;
        for (int l = 0; l < truth.paths(); ++l) {
            Eigen::Index best = -1;
            double dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < est.angles.size(); ++i)
                if (std::abs(est.angles(i) - truth.angles(l)) < dist) {
                    dist = std::abs(est.angles(i) - truth.angles(l));
                    best = i;
                }
            const cplx a = best >= 0 ? est.gains(best) : cplx(0.0);
            err += std::norm(a - truth.gains(l));
        }
        const double den = truth.gains.squaredNorm();
        if (!(den > 0.0)) throw Error(Errc::zero_channel, "user " + std::to_string(k) + " has zero gains");
        acc += err / den;
    }
    return acc / spec.K();
}

ExhaustiveBaseline::ExhaustiveBaseline(const ArrayLayout& layout, const DipoleModel& dipole,
                                       const MultipathSpec& spec, const CouplerPlacement& reference,
                                       int D, int tau, double noise_variance, std::uint64_t seed)
    : layout_(layout), dipole_(dipole), K_(spec.K()) {
    if (layout.N < 1) throw Error(Errc::config, "exhaustive baseline needs N >= 1");
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(D))));
    if (D < 1 || side * side != D) throw Error(Errc::config, "estimation.D must be a perfect square");
    if (tau < 1) throw Error(Errc::config, "estimation.tau must be >= 1");
    if (!is_feasible(reference, layout)) throw Error(Errc::infeasible_layout, "reference placement is infeasible");
    const int M = layout.M;
    const int N = layout.N;
    const double pitch = layout.A * layout.lambda() / side;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(0.5 * noise_variance / tau);
    auto measure = [&](const CouplerPlacement& p, int m) {
        const auto w = mech_weights(build_block(p.antenna(m), layout.active_position(m), dipole));
        CVec g = effective_column(spec, m, p.antenna(m), layout, w);
        for (int k = 0; k < K_; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(k) += sd * cplx(re, im);
        }
        return g;
    };

    cand_.resize(M);
    ok_.assign(M, std::vector<std::vector<bool>>(N, std::vector<bool>(D, false)));
    g_.assign(M, std::vector<std::vector<CVec>>(N, std::vector<CVec>(D)));
    g_ref_.resize(M);
    for (int m = 0; m < M; ++m) {
        const Vec2 q = layout.active_position(m);
        for (int i = 0; i < side; ++i)
            for (int j = 0; j < side; ++j)
                cand_[m].push_back(q + Vec2(-layout.half_side() + (i + 0.5) * pitch,
                                            -layout.half_side() + (j + 0.5) * pitch));
        if (N > 1) g_ref_[m] = measure(reference, m);
        for (int n = 0; n < N; ++n) {
            CouplerPlacement p = reference;
            for (int d = 0; d < D; ++d) {
                p.set_point(m, n, cand_[m][d]);
                if (!is_feasible_local(p.antenna(m), m, layout)) continue;
                ok_[m][n][d] = true;
                g_[m][n][d] = measure(p, m);
            }
        }
    }
    ledger_.measurements = static_cast<long long>(M) * N * D;
    ledger_.uplink = 2LL * K_ * (ledger_.measurements + (N > 1 ? M : 0));
    ledger_.rounds = N * D + (N > 1 ? 1 : 0);
}

CMat ExhaustiveBaseline::predict(const CouplerPlacement& placement) const {
    const int M = layout_.M;
    const int N = layout_.N;
    CMat g = CMat::Zero(K_, M);
    for (int m = 0; m < M; ++m) {
        CVec acc = N > 1 ? g_ref_[m] : CVec::Zero(K_);
        for (int n = 0; n < N; ++n) {
            const Vec2 x = placement.point(m, n);
            int best = -1;
            double dist = std::numeric_limits<double>::infinity();
            for (size_t d = 0; d < cand_[m].size(); ++d) {
                if (!ok_[m][n][d]) continue;
                const double e = (cand_[m][d] - x).squaredNorm();
                if (e < dist) {
                    dist = e;
                    best = static_cast<int>(d);
                }
            }
            if (best < 0) throw Error(Errc::infeasible_layout, "no feasible candidate for lookup");
            acc += N > 1 ? CVec(g_[m][n][best] - g_ref_[m]) : g_[m][n][best];
        }
        g.col(m) = acc;
    }
    return g;
}

double nmse(const ExhaustiveBaseline& baseline, const MultipathSpec& spec,
            const std::vector<CouplerPlacement>& placements) {
    if (placements.empty()) throw Error(Errc::config, "NMSE needs at least one test placement");
    double acc = 0.0;
    for (const auto& p : placements)
        acc += nmse_of(baseline.predict(p), true_channel(spec, p, baseline.layout(), baseline.dipole()));
    return acc / static_cast<double>(placements.size());
}

}  // namespace fca
