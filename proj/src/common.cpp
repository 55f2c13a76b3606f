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

#include "fcarray/common.hpp"

namespace fca {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::config: return "ConfigError";
        case Errc::infeasible_layout: return "InfeasibleLayout";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::anchor_infeasible: return "AnchorInfeasible";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::domain_error: return "DomainError";
        case Errc::too_close: return "TooClose";
        case Errc::singular_system: return "SingularSystem";
        case Errc::non_positive_power: return "NonPositivePower";
        case Errc::singular_gram: return "SingularGram";
        case Errc::non_psd: return "NonPSD";
        case Errc::margin_too_small: return "MarginTooSmall";
        case Errc::tau_too_short: return "TauTooShort";
        case Errc::rank_deficient_support: return "RankDeficientSupport";
        case Errc::singular_aggregate: return "SingularAggregate";
        case Errc::zero_channel: return "ZeroChannel";
        case Errc::information_leak: return "InformationLeak";
    }
    return "Unknown";
}

}  // namespace fca
