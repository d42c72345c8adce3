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

#include "specwands/policy.hpp"

#include <algorithm>

namespace specwands
{

std::optional<OpView> PortState::competitor(Cycle now) const
{
  if (occupier)
    return occupier->op;
  if (slot_cycle == now)
    return slot_user;
  return std::nullopt;
}

std::string_view to_string(ScenarioClass c)
{
  switch (c) {
  case ScenarioClass::NotIssued:
    return "not_issued";
  case ScenarioClass::NoContention:
    return "no_contention";
  case ScenarioClass::S1:
    return "s1";
  case ScenarioClass::S2:
    return "s2";
  case ScenarioClass::S3:
    return "s3";
  case ScenarioClass::S4:
    return "s4";
  }
  return "?";
}

std::string_view to_string(ScheduleDecision d)
{
  switch (d) {
  case ScheduleDecision::Issue:
    return "issue";
  case ScheduleDecision::Preempt:
    return "preempt";
  case ScheduleDecision::Skip:
    return "skip";
  }
  return "?";
}

std::vector<std::size_t> select_candidates(const std::vector<RsEntry>& rs, Cycle cycle, const PolicyKind& policy)
{
  std::array<std::vector<std::size_t>, kNumThreads> per_thread;
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (rs[i].unresolved_deps == 0)
      per_thread[rs[i].tid].push_back(i);
  for (auto& v : per_thread)
    std::sort(v.begin(), v.end(), [&](auto a, auto b) { return rs[a].seq < rs[b].seq; });

  std::vector<std::size_t> out;
  out.reserve(per_thread[0].size() + per_thread[1].size());
  const auto first = static_cast<std::size_t>(cycle % 2);
  for (std::size_t k = 0; k < std::max(per_thread[0].size(), per_thread[1].size()); ++k)
    for (std::size_t j = 0; j < kNumThreads; ++j) {
      auto& v = per_thread[(first + j) % kNumThreads];
      if (k < v.size())
        out.push_back(v[k]);
    }
  if (policy.variant == PolicyVariant::SpecWands)
    std::stable_partition(out.begin(), out.end(), [&](auto i) { return !rs[i].spec_flag; });
  return out;
}

bool tdm_gate(Cycle cycle, ThreadId tid, Cycle slice) { return (cycle / slice) % 2 == tid; }

namespace
{

// NS sorts before every speculative op, including a freshly dispatched one still at degree 0
unsigned degree_key(const OpView& o) { return o.spec_flag ? o.spec_degree + 1u : 0u; }

} // namespace

bool eop_earlier(const OpView& a, const OpView& b, Mode mode)
{
  if (mode == Mode::All)
    return a.seq < b.seq;
  return degree_key(a) < degree_key(b);
}

ScheduleDecision decide(const OpView& cand, const PortState& port, const PolicyKind& policy, Cycle cycle,
                        Cycle latency, bool pipelined)
{
  const bool free = port.free_flag(cycle);
  switch (policy.variant) {
  case PolicyVariant::Fcfs:
    return free ? ScheduleDecision::Issue : ScheduleDecision::Skip;

  case PolicyVariant::Tdm: {
    if (!free || !tdm_gate(cycle, cand.tid, policy.tdm_slice))
      return ScheduleDecision::Skip;
    if (!pipelined && cycle % policy.tdm_slice + latency > policy.tdm_slice)
      return ScheduleDecision::Skip;
    return ScheduleDecision::Issue;
  }

  case PolicyVariant::SpecCompress:
    if (free && (!cand.spec_flag || !policy.sc_delayed.contains(cand.op)))
      return ScheduleDecision::Issue;
    return ScheduleDecision::Skip;

  case PolicyVariant::SpecWands:
    break;
  }

  // Step-2: owner check
  if (free) {
    if (cand.tid == port.owner_tid || !cand.spec_flag)
      return ScheduleDecision::Issue;
    return ScheduleDecision::Skip; // LOP
  }

  // Busy. Only an occupier from an earlier cycle can be evicted, and only one per cycle.
  if (!port.occupier || port.slot_cycle == cycle || port.victim_slot)
    return ScheduleDecision::Skip;
  const auto& occ = port.occupier->op;
  if (occ.tid == cand.tid)
    return eop_earlier(cand, occ, policy.mode) ? ScheduleDecision::Preempt : ScheduleDecision::Skip;
  if (!cand.spec_flag && occ.spec_flag)
    return ScheduleDecision::Preempt; // NOP
  return ScheduleDecision::Skip;
}

std::optional<ScenarioClass> classify_contention(const OpView& cand, const PortState& port, Cycle cycle)
{
  auto other = port.competitor(cycle);
  if (!other)
    return ScenarioClass::NoContention;
  if (cand.spec_flag != other->spec_flag)
    return ScenarioClass::S1;
  if (!cand.spec_flag)
    return std::nullopt;
  if (cand.tid == other->tid)
    return ScenarioClass::S4;
  return other->tid == port.owner_tid ? ScenarioClass::S2 : ScenarioClass::S3;
}

} // namespace specwands
