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

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library's numerical kernels.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = boost::math::constants::pi<double>();
constexpr double euler_gamma = boost::math::constants::euler<double>();

// Adaptive Gauss-Kronrod over [a, b], split into pieces of at most `piece`
// so the oscillatory integrands stay resolved.
template <class F>
double integrate(F f, double a, double b, double piece = pi) {
    using boost::math::quadrature::gauss_kronrod;
    double sum = 0.0;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i)
        sum += gauss_kronrod<double, 31>::integrate(f, a + i * h, a + (i + 1) * h, 8, 1e-13);
    return sum;
}

// Si(x) = int_0^x sin t / t dt.
inline double si(double x) {
    return integrate([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }, 0.0, x);
}

// Ci(x) = gamma + ln x + int_0^x (cos t - 1) / t dt.
inline double ci(double x) {
    const double tail = integrate([](double t) { return t == 0.0 ? 0.0 : (std::cos(t) - 1.0) / t; }, 0.0, x);
    return euler_gamma + std::log(x) + tail;
}

// Induced-EMF mutual impedance of two parallel side-by-side dipoles of
// length l at distance d with sinusoidal currents, by direct quadrature of
// the near field of dipole 1 against the current of dipole 2.
inline cplx induced_emf(double d, double l, double wavelength) {
    const double k = 2.0 * pi / wavelength;
    const double eta = 120.0 * pi;
    auto field = [&](double z) {
        const double r1 = std::hypot(d, z - 0.5 * l);
        const double r2 = std::hypot(d, z + 0.5 * l);
        const double r0 = std::hypot(d, z);
        const cplx j(0.0, 1.0);
        return std::exp(-j * k * r1) / r1 + std::exp(-j * k * r2) / r2 -
               2.0 * std::cos(0.5 * k * l) * std::exp(-j * k * r0) / r0;
    };
    auto current = [&](double z) { return std::sin(k * (0.5 * l - std::abs(z))); };
    const double re = integrate([&](double z) { return (field(z) * current(z)).real(); }, -0.5 * l, 0.5 * l, l / 8);
    const double im = integrate([&](double z) { return (field(z) * current(z)).imag(); }, -0.5 * l, 0.5 * l, l / 8);
    const double s = std::sin(0.5 * k * l);
    return cplx(0.0, eta / (4.0 * pi)) * cplx(re, im) / (s * s);
}

// Gaussian elimination with partial pivoting on a dense complex system.
inline std::vector<cplx> solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
    const size_t n = b.size();
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (size_t r = c + 1; r < n; ++r) {
            const cplx f = a[r][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<cplx> x(n);
    for (size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace oracle
