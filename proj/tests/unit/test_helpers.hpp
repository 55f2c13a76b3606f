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

#include <random>

#include "doctest.h"
#include "fcarray/common.hpp"

// CHECK that a statement throws fca::Error with the given code.
#define CHECK_ERRC(expr, errc)                                                \
    do {                                                                      \
        bool thrown_ = false;                                                 \
        try {                                                                 \
            (void)(expr);                                                     \
        } catch (const fca::Error& e_) {                                      \
            thrown_ = true;                                                   \
            CHECK_MESSAGE(e_.code() == (errc), e_.what());                    \
        }                                                                     \
        CHECK_MESSAGE(thrown_, "expected fca::Error from " #expr);            \
    } while (0)

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline fca::CVec random_cvec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    fca::CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

inline fca::CMat random_cmat(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    fca::CMat a(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) a(i, j) = {g(rng), g(rng)};
    return a;
}
