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

#include <iosfwd>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "fcarray/chanest.hpp"
#include "fcarray/optimizer.hpp"

namespace fca {

enum class Direction { cpu_to_lpu, lpu_to_cpu };

enum class PayloadKind {
    gradient,       ///< g_m, 2N reals
    positions,      ///< relaxed p_m, 2N reals
    step_control,   ///< retry eta or reject, 1 real
    pilot_block,    ///< raw y_m^[v], tau complex
    proxy_list,     ///< (index, rho) pairs
    proxy_request,  ///< fallback: ask for the unthresholded top-L, 1 index
    support,        ///< L_k grid indices
    suff_stats,     ///< R_{m,k} and q_{m,k}, L^2 + L complex
    gains,          ///< alpha_k, L complex
};

const char* to_string(Direction d);
const char* to_string(PayloadKind k);

/// One transfer between the CPU and antenna `antenna`. The payload lives in
/// the three arrays; scalar_count() is what the ledger charges.
struct Message {
    int round = 0;
    Direction direction = Direction::cpu_to_lpu;
    int antenna = 0;
    PayloadKind kind = PayloadKind::gradient;
    int user = -1;  ///< -1 when the payload is not per user
    std::vector<double> reals;
    std::vector<cplx> complexes;
    std::vector<int> indices;

    long long scalar_count() const {
        return static_cast<long long>(reals.size() + 2 * complexes.size() + indices.size());
    }
};

using MessageLog = std::vector<Message>;

/// Totals per (kind, direction) and the number of rounds seen.
struct CostLedger {
    std::map<std::pair<PayloadKind, Direction>, long long> totals;
    int rounds = 0;

    void charge(const Message& msg);
    long long total(Direction d) const;
    long long total(PayloadKind k, Direction d) const;
    long long total() const { return total(Direction::cpu_to_lpu) + total(Direction::lpu_to_cpu); }

    static CostLedger replay(const MessageLog& log);
    bool operator==(const CostLedger&) const = default;
};

/// Newline-delimited JSON, one message per line.
void write_ndjson(std::ostream& os, const MessageLog& log);
MessageLog read_ndjson(std::istream& is);

/// Appends messages to the log and charges them. A channel is (antenna,
/// direction, kind, user); in audit mode a message whose round does not
/// exceed the last one on its channel raises Errc::information_leak.
class Network {
public:
    explicit Network(bool audit) : audit_(audit) {}

    void send(Message msg);
    const MessageLog& log() const { return log_; }
    const CostLedger& ledger() const { return ledger_; }
    bool audit() const { return audit_; }
    int next_round() { return ++round_; }
    int round() const { return round_; }

private:
    bool audit_;
    int round_ = 0;
    int last_seen_ = 0;
    MessageLog log_;
    CostLedger ledger_;
    std::map<std::tuple<int, Direction, PayloadKind, int>, int> last_round_;
};

/// Read guard of one antenna: in audit mode every message it consumes must be
/// addressed to it and belong to the current round; anything else raises
/// Errc::information_leak.
class Inbox {
public:
    Inbox(int antenna, bool audit) : antenna_(antenna), audit_(audit) {}

    void accept(const Message& msg, int current_round) const;
    int antenna() const { return antenna_; }

private:
    int antenna_;
    bool audit_;
};

struct Algorithm1Run {
    SCAResult result;
    MessageLog log;
    CostLedger ledger;
};

/// Algorithm 1 with every CPU/antenna exchange carried by a message. The
/// numbers are those of optimize() with the same inputs.
Algorithm1Run run_algorithm1(const CouplerPlacement& initial, const SCAConfig& config,
                             const SystemModel& model, bool audit = false);

struct Algorithm3Run {
    EstimationResult result;
    MessageLog log;
    CostLedger ledger;
};

/// Algorithm 3 with antennas that only see their own pilots, block
/// placements and received messages. Matches distributed_estimate().
Algorithm3Run run_algorithm3(const PilotSession& session, const Observations& obs,
                             const AngularGrid& grid, const std::vector<int>& paths,
                             const ProxyConfig& cfg = {}, double eps_k = -1.0, bool audit = false);

/// Algorithm 2's uplink as messages: every antenna ships its raw pilot rows.
Algorithm3Run run_algorithm2(const PilotSession& session, const Observations& obs,
                             const AngularGrid& grid, const std::vector<int>& paths, bool audit = false);

}  // namespace fca
