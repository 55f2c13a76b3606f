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

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fca {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Indices are split
/// into contiguous chunks and every result must be written to slot i, so the
/// outcome does not depend on the worker count. The exception of the lowest
/// failing index is rethrown.
template <class Body>
void parallel_for(int n, int workers, Body&& body) {
    if (n <= 0) return;
    const int w = std::clamp(workers, 1, n);
    if (w == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t) {
        const int lo = n * t / w;
        const int hi = n * (t + 1) / w;
        pool.emplace_back([&, lo, hi] {
            for (int i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fca
