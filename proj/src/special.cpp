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

#include "fcarray/special.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "fcarray/common.hpp"

namespace fca {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kEps = 1e-17;
constexpr int kMaxTerms = 200;
constexpr double kSeriesLimit = 2.0;

SiCi series(double x) {
    // Si = sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    // Ci = gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
    double si = 0.0;
    double ci = 0.0;
    double term = 1.0;  // x^j / j!
    bool odd = true;
    double sign = 1.0;
    for (int j = 1; j <= kMaxTerms; ++j) {
        term *= x / j;
        const double contrib = term / j;
        if (odd) {
            si += sign * contrib;
        } else {
            sign = -sign;
            ci += sign * contrib;
        }
        if (contrib < kEps * std::max(std::abs(si), std::abs(ci) + 1.0)) break;
        odd = !odd;
    }
    return {si, kEulerGamma + std::log(x) + ci};
}

SiCi continued_fraction(double x) {
    // E1(ix) = -Ci(x) + i(Si(x) - pi/2), modified Lentz on the even form.
    using C = std::complex<double>;
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    C b(1.0, x);
    C c(1.0 / tiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i <= kMaxTerms; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 4e-16) break;
    }
    h *= C(std::cos(x), -std::sin(x));
    return {0.5 * kPi + h.imag(), -h.real()};
}

}  // namespace

SiCi sine_cosine_integrals(double x) {
    if (!(x > 0.0)) {
        if (x == 0.0) throw Error(Errc::domain_error, "Ci(0) diverges");
        throw Error(Errc::domain_error, "sine/cosine integrals need x >= 0");
    }
    return x <= kSeriesLimit ? series(x) : continued_fraction(x);
}

double sine_integral(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -sine_integral(-x);
    return sine_cosine_integrals(x).si;
}

double cosine_integral(double x) { return sine_cosine_integrals(x).ci; }

}  // namespace fca
