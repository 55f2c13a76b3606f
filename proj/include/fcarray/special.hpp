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

namespace fca {

struct SiCi {
    double si;
    double ci;
};

/// Sine and cosine integrals,
///   Si(x) = int_0^x sin(t)/t dt,
///   Ci(x) = gamma + ln x + int_0^x (cos(t) - 1)/t dt,
/// accurate to about 1e-15 absolute. Power series below x = 2, continued
/// fraction for E1(ix) above. Ci(0) throws Errc::domain_error; at x == 0
/// only Si is defined, use sine_integral.
SiCi sine_cosine_integrals(double x);

double sine_integral(double x);
double cosine_integral(double x);

}  // namespace fca
