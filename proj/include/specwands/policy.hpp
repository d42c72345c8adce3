/*
 *    Copyright 2026 The specwands-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SPECWANDS_POLICY_HPP
#define SPECWANDS_POLICY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "specwands/config.hpp"

namespace specwands
{

/// What the scheduler needs to know about one instruction competing for a port.
struct OpView {
  Seq seq = 0;
  ThreadId tid = 0;
  OpKind op = OpKind::IntAlu;
  bool spec_flag = true;
  std::uint8_t spec_degree = 0;
};

struct RsEntry {
  Seq seq = 0;
  ThreadId tid = 0;
  OpKind op = OpKind::IntAlu;
  std::uint32_t unresolved_deps = 0;
  Cycle ready_cycle = 0;
  bool spec_flag = true;
  std::uint8_t spec_degree = 0;
  int port_group = -1;

  OpView view() const { return {seq, tid, op, spec_flag, spec_degree}; }
};

/// An unpipelined op holding its port.
struct Occupant {
  OpView op;
  Cycle issue_cycle = 0;
  Cycle complete_at = 0;
};

struct VictimSlot {
  ThreadId tid = 0;
  Seq seq = 0;
  Cycle preempted_at = 0;
};

/// Per-port control register plus the bookkeeping the simulator keeps next to it.
struct PortState {
  ThreadId owner_tid = 0;
  bool owner_spec_flag = false;
  std::uint8_t owner_spec_degree = 0;
  std::optional<Occupant> occupier;
  std::optional<VictimSlot> victim_slot;
  Cycle busy_until = 0;

  // one issue per port per cycle; a kill also burns the slot for the cycle
  std::optional<Cycle> slot_cycle;
  std::optional<OpView> slot_user;

  bool free_flag(Cycle now) const { return !occupier && slot_cycle != now; }
  /// Whoever makes the port busy right now, if anyone.
  std::optional<OpView> competitor(Cycle now) const;
};

enum class ScheduleDecision : std::uint8_t { Issue, Preempt, Skip };

enum class ScenarioClass : std::uint8_t { NotIssued, NoContention, S1, S2, S3, S4 };
inline constexpr std::size_t kNumScenarios = 6;
std::string_view to_string(ScenarioClass c);
std::string_view to_string(ScheduleDecision d);

/// Indices of ready RS entries: per thread oldest first, threads interleaved
/// starting with thread (cycle mod 2). Under SpecWands every non-speculative candidate
/// goes before every speculative one.
std::vector<std::size_t> select_candidates(const std::vector<RsEntry>& rs, Cycle cycle,
                                          const PolicyKind& policy = PolicyKind::fcfs());

bool tdm_gate(Cycle cycle, ThreadId tid, Cycle slice);

/// EOP ordering between two same-thread ops.
bool eop_earlier(const OpView& a, const OpView& b, Mode mode);

/// `latency` is the cycles the candidate would hold the port (TDM keeps unpipelined ops inside the slice).
ScheduleDecision decide(const OpView& cand, const PortState& port, const PolicyKind& policy, Cycle cycle,
                        Cycle latency = 1, bool pipelined = true);

/// Contention class of a candidate's first issue attempt. nullopt: both competitors non-speculative,
/// which none of S1..S4 covers.
std::optional<ScenarioClass> classify_contention(const OpView& cand, const PortState& port, Cycle cycle);

} // namespace specwands

#endif
