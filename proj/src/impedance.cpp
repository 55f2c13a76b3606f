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

#include "fcarray/impedance.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fcarray/special.hpp"

namespace fca {

namespace {

// Free-space wave impedance 120 pi, giving the classic 30 ohm prefactor.
constexpr double kEtaOver4Pi = 30.0;

}  // namespace

DipoleModel half_wave_dipole(const ArrayLayout& layout) {
    DipoleModel model;
    model.wavelength = layout.lambda();
    model.length = 0.5 * layout.lambda();
    model.min_separation = layout.min_spacing();
    return model;
}

cplx mutual_impedance(double d, const DipoleModel& model) {
    if (!(d >= model.min_separation * (1.0 - 1e-6)))
        throw Error(Errc::too_close, "dipole separation " + std::to_string(d / model.wavelength) +
                                         " wavelengths is below the guard");
    const double k = 2.0 * kPi / model.wavelength;
    const double l = model.length;
    const double root = std::hypot(d, l);
    const SiCi s0 = sine_cosine_integrals(k * d);
    const SiCi s1 = sine_cosine_integrals(k * (root + l));
    const SiCi s2 = sine_cosine_integrals(k * (root - l));
    const double r = kEtaOver4Pi * (2.0 * s0.ci - s1.ci - s2.ci);
    const double x = -kEtaOver4Pi * (2.0 * s0.si - s1.si - s2.si);
    return {r, x};
}

CMat ImpedanceBlock::full() const {
    const int N = couplers();
    CMat Z(N + 1, N + 1);
    Z(0, 0) = z_self;
    Z.block(1, 0, N, 1) = z_bar;
    Z.block(0, 1, 1, N) = z_bar.transpose();
    Z.bottomRightCorner(N, N) = Z_hat;
    return Z;
}

ImpedanceBlock build_block(const Vec& p_m, const Vec2& q_m, const DipoleModel& model) {
    const auto N = p_m.size() / 2;
    ImpedanceBlock block;
    block.z_self = model.self_impedance;
    block.z_bar.resize(N);
    block.Z_hat.resize(N, N);
    block.X = CMat::Identity(N, N) * model.load_impedance;
    for (Eigen::Index n = 0; n < N; ++n) {
        const Vec2 pn = p_m.segment<2>(2 * n);
        block.z_bar(n) = mutual_impedance((pn - q_m).norm(), model);
        block.Z_hat(n, n) = model.self_impedance;
        for (Eigen::Index n2 = n + 1; n2 < N; ++n2) {
            const cplx z = mutual_impedance((pn - Vec2(p_m.segment<2>(2 * n2))).norm(), model);
            block.Z_hat(n, n2) = z;
            block.Z_hat(n2, n) = z;
        }
    }
    return block;
}

std::vector<ImpedanceBlock> build_blocks(const CouplerPlacement& placement,
                                         const ArrayLayout& layout, const DipoleModel& model) {
    std::vector<ImpedanceBlock> blocks;
    blocks.reserve(layout.M);
    for (int m = 0; m < layout.M; ++m)
        blocks.push_back(build_block(placement.antenna(m), layout.active_position(m), model));
    return blocks;
}

void write_impedance_table(std::ostream& os, const DipoleModel& model,
                           const std::vector<double>& distances) {
    os << "d_m,d_wl,re,im\n" << std::setprecision(17);
    for (double d : distances) {
        const cplx z = mutual_impedance(d, model);
        os << d << ',' << d / model.wavelength << ',' << z.real() << ',' << z.imag() << '\n';
    }
}

}  // namespace fca
