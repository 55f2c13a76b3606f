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

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "fcarray/precoding.hpp"
#include "test_helpers.hpp"

using namespace fca;

namespace {

struct Instance {
    ArrayLayout layout;
    DipoleModel dipole;
    CouplerPlacement placement;
    MultipathSpec spec;
    std::vector<ImpedanceBlock> blocks;
    std::vector<MechanicalWeights> weights;
};

Instance make_instance(int M, int N, int K, std::uint64_t seed) {
    Instance in;
    in.layout.M = M;
    in.layout.N = N;
    in.dipole = half_wave_dipole(in.layout);
    std::mt19937_64 rng(seed);
    in.placement = random_feasible_placement(in.layout, rng);
    in.spec = sample_channels(seed, K, 15);
    in.blocks = build_blocks(in.placement, in.layout, in.dipole);
    in.weights = mech_weights(in.blocks);
    return in;
}

// Full (M + MN) x M extended beamforming matrix, rows [actives; couplers].
CMat full_W(const Instance& in) {
    const int M = in.layout.M, N = in.layout.N;
    CMat W = CMat::Zero(M * (N + 1), M);
    for (int m = 0; m < M; ++m) {
        W(m, m) = 1.0;
        for (int n = 0; n < N; ++n) W(M + m * N + n, m) = -in.weights[m].w(n);
    }
    return W;
}

}  // namespace

TEST_SUITE("precoding") {

TEST_CASE("mechanical weights") {
    ArrayLayout L;
    const DipoleModel dm = half_wave_dipole(L);
    std::mt19937_64 rng(8);

    SUBCASE("single coupler is a scalar division") {
        L.N = 1;
        const auto p = uniform_placement(L);
        const auto b = build_block(p.antenna(0), L.active_position(0), dm);
        const auto w = mech_weights(b);
        CHECK(std::abs(w.w(0) - b.z_bar(0) / (b.z_self + dm.load_impedance)) < 1e-15);
        CHECK(w.extended()(0) == cplx(1.0, 0.0));
        CHECK(w.extended()(1) == -w.w(0));
    }
    SUBCASE("no coupling gives zero weights") {
        L.N = 2;
        auto b = build_block(uniform_placement(L).antenna(0), L.active_position(0), dm);
        b.z_bar.setZero();
        CHECK(mech_weights(b).w.norm() == 0.0);
    }
    SUBCASE("three couplers against pivoted elimination") {
        L.N = 3;
        for (int trial = 0; trial < 10; ++trial) {
            const auto p = random_feasible_placement(L, rng);
            const auto b = build_block(p.antenna(1), L.active_position(1), dm);
            const auto w = mech_weights(b);
            const CMat A = b.Z_hat + b.X;
            CHECK((A * w.w - b.z_bar).norm() <= 1e-10 * b.z_bar.norm());
            std::vector<std::vector<cplx>> a(3, std::vector<cplx>(3));
            std::vector<cplx> rhs(3);
            for (int i = 0; i < 3; ++i) {
                rhs[i] = b.z_bar(i);
                for (int j = 0; j < 3; ++j) a[i][j] = A(i, j);
            }
            const auto ref = oracle::solve(a, rhs);
            for (int i = 0; i < 3; ++i) CHECK(std::abs(w.w(i) - ref[i]) < 1e-12 * std::abs(ref[i]) + 1e-15);
        }
    }
    SUBCASE("singular system") {
        ImpedanceBlock b;
        b.z_self = 1.0;
        b.z_bar = CVec::Ones(2);
        b.Z_hat = CMat::Ones(2, 2);
        b.X = CMat::Zero(2, 2);
        CHECK_ERRC(mech_weights(b), Errc::singular_system);
    }
}

TEST_CASE("effective channel") {
    SUBCASE("without couplers the rows are the active channels") {
        const auto in = make_instance(4, 0, 3, 1);
        const CMat G = effective_channel(in.spec, in.placement, in.layout, in.weights);
        for (int k = 0; k < 3; ++k)
            CHECK((G.row(k).transpose() - user_channel(in.spec, k, in.placement, in.layout).active()).norm() == 0.0);
    }
    SUBCASE("zero weights match the active-only rows") {
        auto in = make_instance(4, 2, 2, 2);
        for (auto& w : in.weights) w.w.setZero();
        const CMat G = effective_channel(in.spec, in.placement, in.layout, in.weights);
        for (int k = 0; k < 2; ++k)
            CHECK((G.row(k).transpose() - user_channel(in.spec, k, in.placement, in.layout).active()).norm() <
                  1e-13);
    }
    SUBCASE("full-stack product and path-sum form") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto in = make_instance(5, 3, 3, seed);
            const CMat G = effective_channel(in.spec, in.placement, in.layout, in.weights);
            const CMat W = full_W(in);
            for (int k = 0; k < 3; ++k) {
                const CVec h = user_channel(in.spec, k, in.placement, in.layout).h;
                const CVec ref = (h.transpose() * W).transpose();
                CHECK((G.row(k).transpose() - ref).norm() < 1e-10 * ref.norm());
                const auto& u = in.spec.users[k];
                for (int m = 0; m < in.layout.M; ++m) {
                    cplx sum = 0.0;
                    for (int l = 0; l < u.paths(); ++l)
                        sum += u.gains(l) * coupled_response(u.angles(l), m, in.placement.antenna(m), in.layout,
                                                             in.weights[m]);
                    CHECK(std::abs(G(k, m) - sum) < 1e-10 * std::max(1.0, std::abs(sum)));
                }
            }
        }
    }
}

TEST_CASE("power weights") {
    SUBCASE("no couplers") {
        const auto in = make_instance(3, 0, 1, 1);
        const Vec B = power_matrix(in.blocks, in.weights);
        for (int m = 0; m < 3; ++m) CHECK(B(m) == doctest::Approx(73.13).epsilon(1e-12));
    }
    SUBCASE("zero weights") {
        auto in = make_instance(3, 2, 1, 1);
        for (auto& w : in.weights) w.w.setZero();
        const Vec B = power_matrix(in.blocks, in.weights);
        for (int m = 0; m < 3; ++m) CHECK(B(m) == doctest::Approx(in.dipole.self_impedance.real()));
    }
    SUBCASE("block of the full quadratic form") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto in = make_instance(4, 2, 1, seed);
            const int M = 4, N = 2, P = M * (N + 1);
            Mat R = Mat::Zero(P, P);
            auto port = [&](int m, int a) { return a == 0 ? m : M + m * N + a - 1; };
            for (int m = 0; m < M; ++m) {
                const Mat Rm = in.blocks[m].full().real();
                for (int a = 0; a <= N; ++a)
                    for (int b = 0; b <= N; ++b) R(port(m, a), port(m, b)) = Rm(a, b);
            }
            const CMat W = full_W(in);
            const CMat Bfull = W.adjoint() * R.cast<cplx>() * W;
            const Vec B = power_matrix(in.blocks, in.weights);
            for (int m = 0; m < M; ++m) {
                CHECK(rel_err(B(m), Bfull(m, m).real()) < 1e-12);
                for (int j = 0; j < M; ++j)
                    if (j != m) CHECK(std::abs(Bfull(m, j)) < 1e-12 * B(m));
            }
        }
    }
    SUBCASE("non-positive power is an error") {
        auto in = make_instance(2, 1, 1, 1);
        in.blocks[0].z_self = cplx(-1e3, 0.0);
        CHECK_ERRC(power_matrix(in.blocks, in.weights), Errc::non_positive_power);
    }
}

TEST_CASE("mmse precoder") {
    std::mt19937_64 rng(17);

    SUBCASE("power equality on random scenarios") {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            const int M = 2 + t % 7, K = 1 + t % 4;
            const CMat G = random_cmat(K, M, rng);
            const Vec B = (Vec::Random(M).array() + 2.0).matrix() * 40.0;
            const double P = std::pow(10.0, 2.0 * u(rng) - 1.0);
            const auto st = mmse_precoder(G, B, P, 0.01 + u(rng));
            const double power = (st.U.adjoint() * B.cast<cplx>().asDiagonal() * st.U).trace().real();
            CHECK(rel_err(power, P) < 1e-9);
        }
    }
    SUBCASE("single user aligns with the conjugate whitened channel") {
        const CMat G = random_cmat(1, 5, rng);
        const Vec B = Vec::Constant(5, 70.0) + Vec::LinSpaced(5, 0.0, 8.0);
        const auto st = mmse_precoder(G, B, 2.0, 0.3);
        const CVec gbar = (G * B.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal()).adjoint();
        const CVec f = st.F.col(0);
        CHECK(std::abs(std::abs(gbar.dot(f)) - gbar.norm() * f.norm()) < 1e-12 * gbar.norm() * f.norm());
        CHECK(rel_err(f.squaredNorm(), 2.0) < 1e-12);
    }
    SUBCASE("orthogonal equal-norm rows split power evenly") {
        CMat G = CMat::Zero(2, 4);
        G(0, 0) = 1.0;
        G(0, 1) = cplx(0.0, 1.0);
        G(1, 2) = 1.0;
        G(1, 3) = -1.0;
        const auto st = mmse_precoder(G, Vec::Ones(4), 1.0, 0.1);
        CHECK(st.F.col(0).squaredNorm() == doctest::Approx(0.5));
        CHECK(st.F.col(1).squaredNorm() == doctest::Approx(0.5));
    }
    SUBCASE("regularized least squares by the other normal equations") {
        const int K = 3, M = 8;
        const CMat G = random_cmat(K, M, rng);
        const Vec B = (Vec::Random(M).array() + 2.0).matrix() * 30.0;
        const double P = 1.0, s2 = 0.05;
        const auto st = mmse_precoder(G, B, P, s2);
        const CMat Gbar = G * B.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
        // (Gbar^H Gbar + alpha I_M)^{-1} Gbar^H, solved column by column with the elimination oracle.
        const CMat A = Gbar.adjoint() * Gbar + (K * s2 / P) * CMat::Identity(M, M);
        CMat Fhat(M, K);
        for (int k = 0; k < K; ++k) {
            std::vector<std::vector<cplx>> a(M, std::vector<cplx>(M));
            std::vector<cplx> rhs(M);
            for (int i = 0; i < M; ++i) {
                rhs[i] = std::conj(Gbar(k, i));
                for (int j = 0; j < M; ++j) a[i][j] = A(i, j);
            }
            const auto x = oracle::solve(a, rhs);
            for (int i = 0; i < M; ++i) Fhat(i, k) = x[i];
        }
        Fhat *= std::sqrt(P / Fhat.squaredNorm());
        CHECK((st.F - Fhat).norm() < 1e-9 * Fhat.norm());
        const CMat U = B.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * Fhat;
        CHECK((st.U - U).norm() < 1e-9 * U.norm());
    }
    SUBCASE("noise and power co-scale") {
        const CMat G = random_cmat(3, 6, rng);
        const Vec B = Vec::Constant(6, 50.0);
        const auto a = mmse_precoder(G, B, 1.0, 0.2);
        const auto b = mmse_precoder(G, B, 37.0, 0.2 * 37.0);
        for (int k = 0; k < 3; ++k) CHECK(rel_err(b.sinr(k), a.sinr(k)) < 1e-9);
    }
    SUBCASE("errors") {
        const CMat G = random_cmat(2, 3, rng);
        CHECK_ERRC(mmse_precoder(G, Vec::Ones(3), 0.0, 1.0), Errc::config);
        CHECK_ERRC(mmse_precoder(G, Vec::Zero(3), 1.0, 1.0), Errc::non_positive_power);
        CHECK_ERRC(mmse_precoder(G, Vec::Ones(2), 1.0, 1.0), Errc::dimension_mismatch);
    }
}

TEST_CASE("sinr and rate") {
    std::mt19937_64 rng(4);
    SUBCASE("single user") {
        const CMat G = random_cmat(1, 3, rng);
        const CMat U = random_cmat(3, 1, rng);
        const auto r = sinr_and_rate(G, U, 0.7);
        const double gamma = std::norm((G * U)(0, 0)) / 0.7;
        CHECK(rel_err(r.sinr(0), gamma) < 1e-14);
        CHECK(rel_err(r.sum_rate, std::log2(1.0 + gamma)) < 1e-14);
    }
    SUBCASE("silent precoder") {
        const auto r = sinr_and_rate(random_cmat(2, 3, rng), CMat::Zero(3, 2), 1.0);
        CHECK(r.sum_rate == 0.0);
    }
    SUBCASE("orthogonal users with zero forcing") {
        CMat G = CMat::Zero(2, 2);
        G(0, 0) = cplx(2.0, 0.0);
        G(1, 1) = cplx(0.0, 3.0);
        const CMat U = G.inverse();
        const auto r = sinr_and_rate(G, U, 0.5);
        CHECK((G * U - CMat::Identity(2, 2)).cwiseAbs2().maxCoeff() < 1e-20);
        CHECK(rel_err(r.sum_rate, 2.0 * std::log2(1.0 + 1.0 / 0.5)) < 1e-14);
    }
}

TEST_CASE("fully active baseline") {
    SUBCASE("without couplers it is the active array with B = Re{z_self}") {
        const auto in = make_instance(4, 0, 2, 3);
        const auto fa = fully_active_rate(in.spec, in.placement, in.layout, in.dipole, 1.0, 0.01);
        const CMat G = effective_channel(in.spec, in.placement, in.layout, in.weights);
        const auto st = mmse_precoder(G, Vec::Constant(4, in.dipole.self_impedance.real()), 1.0, 0.01);
        CHECK(rel_err(fa.sum_rate, st.sum_rate) < 1e-10);
    }
    SUBCASE("single user closed form") {
        const auto in = make_instance(3, 2, 1, 5);
        const double P = 1.0, s2 = 0.01;
        const auto fa = fully_active_rate(in.spec, in.placement, in.layout, in.dipole, P, s2);
        CHECK(rel_err(fa.power, P) < 1e-9);
        // gamma = P h R^{-1} h^H / sigma^2 with R = Re{Z}.
        const int n = static_cast<int>(fa.R.rows());
        std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n));
        std::vector<cplx> rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs[i] = std::conj(fa.H(0, i));
            for (int j = 0; j < n; ++j) a[i][j] = fa.R(i, j);
        }
        const auto x = oracle::solve(a, rhs);
        cplx q = 0.0;
        for (int i = 0; i < n; ++i) q += fa.H(0, i) * x[i];
        // MMSE for one user loses the factor (1 + alpha/|gbar|^2)^-2 only in
        // the direction, not the gain, so gamma is exact.
        CHECK(rel_err(fa.sinr(0), P * q.real() / s2) < 1e-8);
    }
    SUBCASE("beats the fixed-coupler array on average") {
        double fa = 0.0, fc = 0.0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            ArrayLayout L;
            L.M = 4;
            L.N = 2;
            const auto dm = half_wave_dipole(L);
            const auto spec = sample_channels(seed, 2, 15);
            const auto p = uniform_placement(L);
            const double s2 = 1.0 / (2 * 1000.0);
            fa += fully_active_rate(spec, p, L, dm, 1.0, s2).sum_rate;
            fc += evaluate_fc(spec, p, L, dm, 1.0, s2).state.sum_rate;
        }
        CHECK(fa > fc);
    }
}

}  // TEST_SUITE
