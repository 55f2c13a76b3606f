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

#include "fcarray/precoding.hpp"

#include <cmath>

namespace fca {

CVec MechanicalWeights::extended() const {
    CVec out(w.size() + 1);
    out(0) = 1.0;
    out.tail(w.size()) = -w;
    return out;
}

MechanicalWeights mech_weights(const ImpedanceBlock& block) {
    MechanicalWeights out;
    const int N = block.couplers();
    if (N == 0) {
        out.w.resize(0);
        return out;
    }
    const CMat system = block.Z_hat + block.X;
    const Vec sv = Eigen::JacobiSVD<CMat>(system).singularValues();
    out.condition = sv(N - 1) > 0.0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
    if (!(out.condition <= kMaxCondition))
        throw Error(Errc::singular_system,
                    "Z_hat + X has condition number " + std::to_string(out.condition));
    out.w = system.partialPivLu().solve(block.z_bar);
    return out;
}

std::vector<MechanicalWeights> mech_weights(const std::vector<ImpedanceBlock>& blocks) {
    std::vector<MechanicalWeights> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(mech_weights(b));
    return out;
}

cplx coupled_response(double phi, int m, const Vec& p_m, const ArrayLayout& layout,
                      const MechanicalWeights& weights) {
    const cplx active = steering_active_entry(phi, m, layout);
    if (weights.w.size() == 0) return active;
    return active - weights.w.cwiseProduct(steering_coupler_local(phi, p_m, layout.lambda())).sum();
}

CVec effective_column(const MultipathSpec& spec, int m, const Vec& p_m, const ArrayLayout& layout,
                      const MechanicalWeights& weights) {
    const auto N = p_m.size() / 2;
    if (weights.w.size() != N) throw Error(Errc::dimension_mismatch, "weights do not match p_m");
    const int K = spec.K();
    CVec col(K);
    for (int k = 0; k < K; ++k) {
        const auto& u = spec.users[k];
        cplx h_active = 0.0;
        CVec h_coupler = CVec::Zero(N);
        for (int l = 0; l < u.paths(); ++l) {
            h_active += u.gains(l) * steering_active_entry(u.angles(l), m, layout);
            if (N > 0) h_coupler += u.gains(l) * steering_coupler_local(u.angles(l), p_m, layout.lambda());
        }
        col(k) = N > 0 ? h_active - weights.w.cwiseProduct(h_coupler).sum() : h_active;
    }
    return col;
}

CMat effective_channel(const MultipathSpec& spec, const CouplerPlacement& placement,
                       const ArrayLayout& layout, const std::vector<MechanicalWeights>& weights) {
    if (static_cast<int>(weights.size()) != layout.M || placement.antennas() != layout.M)
        throw Error(Errc::dimension_mismatch, "one weight vector per antenna required");
    CMat G(spec.K(), layout.M);
    for (int m = 0; m < layout.M; ++m)
        G.col(m) = effective_column(spec, m, placement.antenna(m), layout, weights[m]);
    return G;
}

double power_weight(const ImpedanceBlock& block, const MechanicalWeights& weights) {
    const CVec wt = weights.extended();
    const Mat R = block.full().real();
    const double b = (wt.adjoint() * R.cast<cplx>() * wt)(0).real();
    if (!(b > 0.0)) throw Error(Errc::non_positive_power, "b_m = " + std::to_string(b));
    return b;
}

Vec power_matrix(const std::vector<ImpedanceBlock>& blocks,
                 const std::vector<MechanicalWeights>& weights) {
    if (blocks.size() != weights.size())
        throw Error(Errc::dimension_mismatch, "blocks and weights differ in count");
    Vec b(blocks.size());
    for (size_t m = 0; m < blocks.size(); ++m) b(m) = power_weight(blocks[m], weights[m]);
    return b;
}

namespace {

struct MmseCore {
    CMat F;
    double alpha;
    double beta;
};

// F = beta Gbar^H (Gbar Gbar^H + alpha I)^{-1} with ||F||_F^2 = P_max.
MmseCore mmse_core(const CMat& Gbar, double p_max, double sigma2) {
    const auto K = Gbar.rows();
    MmseCore out;
    out.alpha = static_cast<double>(K) * sigma2 / p_max;
    const CMat gram = Gbar * Gbar.adjoint() + out.alpha * CMat::Identity(K, K);
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::singular_gram, "regularized Gram matrix is not positive definite");
    const Vec d = llt.matrixL().toDenseMatrix().diagonal().real();
    if (d.minCoeff() <= 1e-12 * d.maxCoeff())
        throw Error(Errc::singular_gram, "regularized Gram matrix is numerically singular");

    CMat F = llt.solve(Gbar).adjoint();
    const double norm2 = F.squaredNorm();
    if (norm2 > 0.0) {
        out.beta = std::sqrt(p_max / norm2);
        out.F = out.beta * F;
    } else {
        // Zero channel: any precoder is MMSE-optimal, spend the budget evenly.
        out.beta = 0.0;
        out.F = CMat::Constant(Gbar.cols(), K, std::sqrt(p_max / static_cast<double>(F.size())));
    }
    return out;
}

}  // namespace

PrecodingState mmse_precoder(const CMat& G, const Vec& B, double p_max, double sigma2) {
    if (!(p_max > 0.0)) throw Error(Errc::config, "P_max must be > 0");
    if (B.size() != G.cols()) throw Error(Errc::dimension_mismatch, "B must have one entry per antenna");
    if (!(B.minCoeff() > 0.0)) throw Error(Errc::non_positive_power, "B must be strictly positive");

    PrecodingState st;
    st.G = G;
    st.B = B;
    const Vec inv_sqrt_b = B.cwiseSqrt().cwiseInverse();
    const CMat Gbar = G * inv_sqrt_b.cast<cplx>().asDiagonal();
    MmseCore core = mmse_core(Gbar, p_max, sigma2);
    st.alpha = core.alpha;
    st.beta = core.beta;
    st.F = std::move(core.F);
    st.U = inv_sqrt_b.cast<cplx>().asDiagonal() * st.F;
    RateResult r = sinr_and_rate(G, st.U, sigma2);
    st.sinr = std::move(r.sinr);
    st.sum_rate = r.sum_rate;
    return st;
}

RateResult sinr_and_rate(const CMat& G, const CMat& U, double sigma2) {
    if (G.cols() != U.rows() || G.rows() != U.cols())
        throw Error(Errc::dimension_mismatch, "G is K x M, U must be M x K");
    const CMat S = G * U;
    const auto K = G.rows();
    RateResult out;
    out.sinr.resize(K);
    out.sum_rate = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
        const double signal = std::norm(S(k, k));
        const double interference = S.row(k).cwiseAbs2().sum() - signal;
        out.sinr(k) = signal / (interference + sigma2);
        out.sum_rate += std::log2(1.0 + out.sinr(k));
    }
    return out;
}

FullyActiveResult fully_active_rate(const MultipathSpec& spec, const CouplerPlacement& placement,
                                    const ArrayLayout& layout, const DipoleModel& model,
                                    double p_max, double sigma2) {
    const int M = layout.M;
    const int N = layout.N;
    const int P = M * (N + 1);
    auto port = [&](int m, int local) { return local == 0 ? m : M + m * N + (local - 1); };

    FullyActiveResult out;
    out.R = CMat::Zero(P, P);
    const auto blocks = build_blocks(placement, layout, model);
    for (int m = 0; m < M; ++m) {
        const Mat Rm = blocks[m].full().real();
        for (int a = 0; a <= N; ++a)
            for (int b = 0; b <= N; ++b) out.R(port(m, a), port(m, b)) = Rm(a, b);
    }
    out.H.resize(spec.K(), P);
    for (int k = 0; k < spec.K(); ++k) out.H.row(k) = user_channel(spec, k, placement, layout).h.transpose();

    Eigen::SelfAdjointEigenSolver<Mat> eig(out.R.real());
    const Vec& ev = eig.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -1e-8 * scale)
        throw Error(Errc::non_psd, "Re{Z} has eigenvalue " + std::to_string(ev.minCoeff()));
    const Vec clipped = ev.cwiseMax(1e-12 * scale);
    const Mat inv_sqrt = eig.eigenvectors() * clipped.cwiseSqrt().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().transpose();

    const CMat Gbar = out.H * inv_sqrt.cast<cplx>();
    MmseCore core = mmse_core(Gbar, p_max, sigma2);
    out.U = inv_sqrt.cast<cplx>() * core.F;
    out.power = (out.U.adjoint() * out.R * out.U).trace().real();
    RateResult r = sinr_and_rate(out.H, out.U, sigma2);
    out.sinr = std::move(r.sinr);
    out.sum_rate = r.sum_rate;
    return out;
}

FcEvaluation evaluate_fc(const MultipathSpec& spec, const CouplerPlacement& placement,
                         const ArrayLayout& layout, const DipoleModel& model, double p_max,
                         double sigma2) {
    FcEvaluation ev;
    ev.blocks = build_blocks(placement, layout, model);
    ev.weights = mech_weights(ev.blocks);
    const CMat G = effective_channel(spec, placement, layout, ev.weights);
    const Vec B = power_matrix(ev.blocks, ev.weights);
    ev.state = mmse_precoder(G, B, p_max, sigma2);
    return ev;
}

double active_only_rate(const MultipathSpec& spec, const ArrayLayout& layout,
                        const DipoleModel& model, double p_max, double sigma2) {
    ArrayLayout bare = layout;
    bare.N = 0;
    return evaluate_fc(spec, CouplerPlacement(bare.M, 0), bare, model, p_max, sigma2).state.sum_rate;
}

}  // namespace fca
