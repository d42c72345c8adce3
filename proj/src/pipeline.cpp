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

#include "specwands/pipeline.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include <fmt/core.h>

namespace specwands
{

std::string_view to_string(EventKind k)
{
  switch (k) {
  case EventKind::Dispatch:
    return "dispatch";
  case EventKind::Issue:
    return "issue";
  case EventKind::Preempt:
    return "preempt";
  case EventKind::Reinsert:
    return "reinsert";
  case EventKind::Complete:
    return "complete";
  case EventKind::Resolve:
    return "resolve";
  case EventKind::Squash:
    return "squash";
  case EventKind::Commit:
    return "commit";
  case EventKind::Owner:
    return "owner";
  }
  return "?";
}

std::string format_event(const Event& e)
{
  if (e.port >= 0)
    return fmt::format("{} {} T{} #{} port={}", e.cycle, to_string(e.kind), e.tid, e.seq, e.port);
  return fmt::format("{} {} T{} #{}", e.cycle, to_string(e.kind), e.tid, e.seq);
}

double SimMetrics::port_busy_rate(std::size_t port, ThreadId tid) const
{
  if (cycles == 0)
    return 0.0;
  return static_cast<double>(port_busy_cycles.at(port)[tid]) / static_cast<double>(cycles);
}

double SimMetrics::busy_rate(OpKind kind, ThreadId tid) const
{
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < ports.size(); ++p)
    if (ports[p].kinds.contains(kind)) {
      sum += port_busy_rate(p, tid);
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double SimMetrics::issue_wait_mean() const
{
  std::uint64_t n = 0, total = 0;
  for (auto [w, c] : issue_wait) {
    n += c;
    total += w * c;
  }
  return n ? static_cast<double>(total) / static_cast<double>(n) : 0.0;
}

Cycle SimMetrics::issue_wait_max() const { return issue_wait.empty() ? 0 : issue_wait.rbegin()->first; }

std::uint64_t SimMetrics::classified_events() const
{
  return std::accumulate(scenario_counts.begin(), scenario_counts.end(), std::uint64_t{0});
}

Simulator::Simulator(PipelineConfig cfg, Workload w) : cfg_(std::move(cfg)), work_(std::move(w))
{
  if (auto v = validate(work_); !v.empty())
    throw TraceError(0, v.front());

  ports_.resize(cfg_.ports.size());
  for (std::size_t p = 0; p < ports_.size(); ++p) {
    switch (cfg_.owner_init) {
    case OwnerInit::Thread0:
      ports_[p].owner_tid = 0;
      break;
    case OwnerInit::Thread1:
      ports_[p].owner_tid = 1;
      break;
    case OwnerInit::Alternate:
      ports_[p].owner_tid = static_cast<ThreadId>(p % 2);
      break;
    }
    for (auto k : cfg_.ports[p].kinds)
      port_map_[static_cast<std::size_t>(k)].push_back(p);
  }

  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    auto& t = threads_[tid];
    const auto& stream = work_.threads[tid];
    t.done.assign(stream.size(), 0);
    t.killed.assign(stream.size(), 0);
    t.consumers.resize(stream.size());
    for (const auto& in : stream) {
      if (needs_port(in.op) && ports_for(in.op).empty())
        throw ConfigError(fmt::format("no port executes '{}' (T{} seq {})", to_string(in.op), tid, in.seq));
      if (cfg_.policy.variant == PolicyVariant::Tdm && needs_port(in.op) && !op_class(in.op).pipelined &&
          latency_of(in) > cfg_.policy.tdm_slice)
        throw ConfigError(fmt::format("'{}' latency {} does not fit tdm.slice {} (T{} seq {})", to_string(in.op),
                                      latency_of(in), cfg_.policy.tdm_slice, tid, in.seq));
      for (auto d : in.deps)
        t.consumers[d].push_back(in.seq);
    }
  }

  m_.ports = cfg_.ports;
  m_.port_busy_cycles.assign(ports_.size(), {});
}

std::vector<std::size_t> Simulator::ports_for(OpKind k) const { return port_map_[static_cast<std::size_t>(k)]; }

Cycle Simulator::latency_of(const Instruction& in) const
{
  return in.latency_override.value_or(cfg_.default_latency(in.op));
}

RobEntry* Simulator::find(ThreadId tid, Seq seq)
{
  auto& rob = threads_[tid].rob;
  auto it = std::lower_bound(rob.begin(), rob.end(), seq, [](const RobEntry& e, Seq s) { return e.seq < s; });
  if (it == rob.end() || it->seq != seq)
    return nullptr;
  return &*it;
}

void Simulator::log(EventKind k, ThreadId tid, Seq seq, int port)
{
  if (log_events_)
    events_.push_back({now_, k, tid, seq, port});
}

std::string Simulator::event_log() const
{
  std::string out;
  for (const auto& e : events_) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

bool Simulator::done() const
{
  if (!in_flight_.empty() || !rs_.empty())
    return false;
  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    const auto& t = threads_[tid];
    if (!t.rob.empty())
      return false;
    for (auto i = t.next; i < t.killed.size(); ++i)
      if (!t.killed[i])
        return false;
  }
  return true;
}

void Simulator::tick()
{
  complete_phase();
  commit_phase();
  resolve_phase();
  scan_phase();
  wakeup_phase();
  issue_phase();
  metrics_phase();
  dispatch_phase();
  ++now_;
}

SimMetrics Simulator::run()
{
  while (!done()) {
    if (now_ >= cfg_.max_cycles)
      throw SimulationError(fmt::format("workload '{}' did not drain within {} cycles", work_.name, cfg_.max_cycles));
    tick();
  }
  return snapshot_metrics();
}

SimMetrics Simulator::snapshot_metrics() const
{
  SimMetrics out = m_;
  out.cycles = now_;
  out.partial = !done();
  return out;
}

void Simulator::finish(RobEntry& e)
{
  auto& t = threads_[e.tid];
  e.state = RobState::Completed;
  e.completed = true;
  t.done[e.seq] = 1;
  for (auto c : t.consumers[e.seq])
    for (auto& r : rs_)
      if (r.tid == e.tid && r.seq == c && r.unresolved_deps > 0 && --r.unresolved_deps == 0)
        r.ready_cycle = now_;
  if (const auto& label = inst(e.tid, e.seq).label; !label.empty())
    m_.label_completion[label] = now_;
  if (e.port >= 0) {
    auto& port = ports_[static_cast<std::size_t>(e.port)];
    if (port.occupier && port.occupier->op.tid == e.tid && port.occupier->op.seq == e.seq)
      port.occupier.reset();
  }
}

void Simulator::complete_phase()
{
  std::vector<InFlight> keep;
  std::vector<InFlight> finished;
  for (const auto& f : in_flight_)
    (f.complete_at == now_ && !f.branch ? finished : keep).push_back(f);
  in_flight_ = std::move(keep);
  std::sort(finished.begin(), finished.end(),
            [](const auto& a, const auto& b) { return std::tie(a.tid, a.seq) < std::tie(b.tid, b.seq); });
  for (const auto& f : finished) {
    auto* e = find(f.tid, f.seq);
    assert(e);
    finish(*e);
    log(EventKind::Complete, f.tid, f.seq, e->port);
  }
}

void Simulator::commit_phase()
{
  auto committable = [](const RobEntry& e) { return e.state == RobState::Completed && !e.faulting; };
  auto retire = [&](ThreadId tid) {
    auto& t = threads_[tid];
    const auto& e = t.rob.front();
    log(EventKind::Commit, tid, e.seq);
    ++m_.committed[tid];
    t.rob.pop_front();
    on_commit(t.ssc, 1);
  };

  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    auto& t = threads_[tid];
    for (std::size_t n = 0; n < cfg_.issue_width && !t.rob.empty(); ++n) {
      const auto& h = t.rob.front();
      if (!committable(h) || inst(tid, h.seq).op == OpKind::Sync)
        break;
      retire(tid);
    }
  }

  // barrier: both Syncs leave together
  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    const auto& rob = threads_[tid].rob;
    if (rob.empty() || !committable(rob.front()) || inst(tid, rob.front().seq).op != OpKind::Sync)
      return;
  }
  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    retire(tid);
    threads_[tid].waiting_sync = false;
    m_.sync_commits[tid].push_back(now_);
  }
}

void Simulator::resolve_phase()
{
  std::vector<InFlight> due;
  for (const auto& f : in_flight_)
    if (f.branch && f.complete_at == now_)
      due.push_back(f);
  std::sort(due.begin(), due.end(),
            [](const auto& a, const auto& b) { return std::tie(a.tid, a.seq) < std::tie(b.tid, b.seq); });
  for (const auto& f : due)
    if (!threads_[f.tid].killed[f.seq])
      resolve_branch(f.tid, f.seq);
}

void Simulator::resolve_branch(ThreadId tid, Seq seq)
{
  std::erase_if(in_flight_, [&](const InFlight& f) { return f.tid == tid && f.seq == seq; });
  auto* e = find(tid, seq);
  assert(e && e->unresolved_branch);
  e->unresolved_branch = false;
  finish(*e);
  log(EventKind::Resolve, tid, seq);

  const auto& meta = *inst(tid, seq).branch;
  if (meta.outcome == BranchOutcome::Mispredict && meta.squash_count > 0)
    squash(tid, seq + 1, seq + meta.squash_count);
}

void Simulator::squash(ThreadId tid, Seq first, Seq last)
{
  auto& t = threads_[tid];
  for (auto s = first; s <= last; ++s)
    if (!t.killed[s]) {
      t.killed[s] = 1;
      ++m_.squashed[tid];
    }

  while (!t.rob.empty() && t.rob.back().seq >= first) {
    auto& e = t.rob.back();
    assert(e.seq <= last);
    if (!e.classified && needs_port(inst(tid, e.seq).op))
      ++m_.scenario_counts[static_cast<std::size_t>(ScenarioClass::NotIssued)];
    log(EventKind::Squash, tid, e.seq, e.port);
    t.rob.pop_back();
  }

  auto in_range = [&](ThreadId x, Seq s) { return x == tid && s >= first && s <= last; };
  std::erase_if(rs_, [&](const RsEntry& r) { return in_range(r.tid, r.seq); });
  std::erase_if(in_flight_, [&](const InFlight& f) { return in_range(f.tid, f.seq); });
  for (auto& port : ports_) {
    if (port.occupier && in_range(port.occupier->op.tid, port.occupier->op.seq)) {
      // unit accepts new operands next cycle
      port.slot_cycle = now_;
      port.slot_user = port.occupier->op;
      port.occupier.reset();
    }
    if (port.victim_slot && in_range(port.victim_slot->tid, port.victim_slot->seq))
      port.victim_slot.reset();
  }

  t.next = std::max<std::size_t>(t.next, last + 1);
  on_squash(t.rob, t.ssc);
}

void Simulator::scan_phase()
{
  for (ThreadId tid = 0; tid < kNumThreads; ++tid)
    scan_step(threads_[tid].rob, threads_[tid].ssc, cfg_.scan_width(), cfg_.mode());

  for (auto& r : rs_)
    if (const auto* e = find(r.tid, r.seq)) {
      r.spec_flag = e->spec_flag;
      r.spec_degree = e->spec_degree;
    }
  for (auto& port : ports_)
    if (port.occupier) {
      const auto* e = find(port.occupier->op.tid, port.occupier->op.seq);
      assert(e);
      port.occupier->op.spec_flag = e->spec_flag;
      port.occupier->op.spec_degree = e->spec_degree;
      port.owner_spec_flag = e->spec_flag;
      port.owner_spec_degree = e->spec_degree;
    }
}

void Simulator::wakeup_phase()
{
  for (auto& port : ports_) {
    if (!port.victim_slot || port.victim_slot->preempted_at >= now_)
      continue;
    auto v = *port.victim_slot;
    port.victim_slot.reset();
    auto* e = find(v.tid, v.seq);
    if (!e)
      continue;
    const auto& in = inst(v.tid, v.seq);
    e->state = RobState::Dispatched;
    rs_.push_back({v.seq, v.tid, in.op, 0, now_, e->spec_flag, e->spec_degree, op_class(in.op).port_group});
    log(EventKind::Reinsert, v.tid, v.seq);
  }
}

void Simulator::issue_phase()
{
  auto order = select_candidates(rs_, now_, cfg_.policy);
  std::vector<std::uint8_t> taken(rs_.size(), 0);
  std::size_t issued = 0;

  for (auto idx : order) {
    if (issued >= cfg_.issue_width)
      break;
    const auto cand = rs_[idx];
    const auto view = cand.view();
    const auto& in = inst(cand.tid, cand.seq);
    const auto cls = op_class(in.op);
    const Cycle hold = cls.pipelined ? 1 : latency_of(in);
    const auto eligible = ports_for(in.op);

    auto* e = find(cand.tid, cand.seq);
    assert(e);
    if (!e->classified) {
      e->classified = true;
      bool any_free = std::any_of(eligible.begin(), eligible.end(), [&](auto p) { return ports_[p].free_flag(now_); });
      auto c = any_free ? std::optional{ScenarioClass::NoContention} : classify_contention(view, ports_[eligible.front()], now_);
      if (c)
        ++m_.scenario_counts[static_cast<std::size_t>(*c)];
      else
        ++m_.nonspec_contention;
    }

    std::optional<std::size_t> issue_port, preempt_port;
    for (auto p : eligible) {
      auto d = decide(view, ports_[p], cfg_.policy, now_, hold, cls.pipelined);
      if (d == ScheduleDecision::Issue) {
        issue_port = p;
        break;
      }
      if (d == ScheduleDecision::Preempt && !preempt_port)
        preempt_port = p;
    }

    if (issue_port)
      issue_on(*issue_port, cand);
    else if (preempt_port)
      preempt(*preempt_port, cand);
    else
      continue;
    taken[idx] = 1;
    ++issued;
  }

  std::size_t i = 0;
  std::erase_if(rs_, [&](const RsEntry&) { return taken[i++] != 0; });
}

void Simulator::issue_on(std::size_t p, const RsEntry& cand)
{
  auto& port = ports_[p];
  const auto& in = inst(cand.tid, cand.seq);
  const auto cls = op_class(in.op);
  const auto view = cand.view();
  const bool branch = in.op == OpKind::Branch;
  const Cycle done_at = now_ + (branch ? in.branch->resolve_latency : latency_of(in));

  auto* e = find(cand.tid, cand.seq);
  e->state = RobState::Executing;
  e->issue_cycle = now_;
  e->complete_at = done_at;
  e->port = static_cast<int>(p);
  in_flight_.push_back({cand.tid, cand.seq, done_at, branch});

  port.slot_cycle = now_;
  port.slot_user = view;
  if (!cls.pipelined) {
    port.occupier = Occupant{view, now_, done_at};
    port.busy_until = done_at;
  } else {
    port.busy_until = now_ + 1;
  }
  port.owner_spec_flag = view.spec_flag;
  port.owner_spec_degree = view.spec_degree;

  ++m_.issue_wait[now_ - cand.ready_cycle];
  if (cfg_.policy.variant == PolicyVariant::Tdm && !tdm_gate(now_, cand.tid, cfg_.policy.tdm_slice))
    ++m_.out_of_slice_issues;
  log(EventKind::Issue, cand.tid, cand.seq, static_cast<int>(p));

  if (!view.spec_flag && port.owner_tid != cand.tid) {
    port.owner_tid = cand.tid;
    log(EventKind::Owner, cand.tid, cand.seq, static_cast<int>(p));
  }
}

void Simulator::preempt(std::size_t p, const RsEntry& cand)
{
  auto& port = ports_[p];
  assert(port.occupier && !port.victim_slot);
  const auto occ = *port.occupier;
  const auto vt = occ.op.tid;
  const auto vs = occ.op.seq;

  auto* v = find(vt, vs);
  assert(v);
  v->state = RobState::Dispatched;
  v->port = -1;
  std::erase_if(in_flight_, [&](const InFlight& f) { return f.tid == vt && f.seq == vs; });
  m_.reexecution_cycles += now_ - occ.issue_cycle;
  if (vt == cand.tid)
    ++m_.preemptions.eop;
  else
    ++m_.preemptions.nop;

  port.occupier.reset();
  port.victim_slot = VictimSlot{vt, vs, now_};
  log(EventKind::Preempt, vt, vs, static_cast<int>(p));
  issue_on(p, cand);
}

void Simulator::metrics_phase()
{
  for (std::size_t p = 0; p < ports_.size(); ++p)
    if (auto c = ports_[p].competitor(now_))
      ++m_.port_busy_cycles[p][c->tid];
}

std::size_t Simulator::dispatch_limit(ThreadId tid) const
{
  std::size_t limit = work_.threads[tid].size();
  for (const auto& e : threads_[tid].rob) {
    if (!e.unresolved_branch)
      continue;
    const auto& meta = *inst(tid, e.seq).branch;
    if (meta.outcome == BranchOutcome::Mispredict)
      limit = std::min<std::size_t>(limit, e.seq + meta.squash_count + 1);
  }
  return limit;
}

void Simulator::dispatch_phase()
{
  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    auto& t = threads_[tid];
    const auto& stream = work_.threads[tid];
    for (std::size_t n = 0; n < cfg_.issue_width; ++n) {
      while (t.next < stream.size() && t.killed[t.next])
        ++t.next;
      if (t.next >= dispatch_limit(tid) || t.waiting_sync || t.rob.size() >= cfg_.rob_capacity)
        break;
      const auto& in = stream[t.next];
      if (needs_port(in.op) && rs_.size() >= cfg_.rs_capacity)
        break;

      RobEntry e;
      e.seq = in.seq;
      e.tid = tid;
      e.dispatch_cycle = now_;
      e.faulting = in.faulting;
      e.spec_flag = true;
      if (!t.rob.empty()) {
        const auto& tail = t.rob.back();
        e.spec_degree = static_cast<std::uint8_t>(
            std::min<std::uint32_t>(tail.spec_degree + (tail.unresolved_branch ? 1u : 0u), kMaxSpecDegree));
      }
      e.unresolved_branch = in.op == OpKind::Branch;

      if (in.op == OpKind::Sync) {
        e.state = RobState::Completed;
        e.completed = true;
        t.done[in.seq] = 1;
        t.waiting_sync = true;
      } else if (in.op == OpKind::Nop) {
        e.state = RobState::Executing;
        e.complete_at = now_ + 1;
        in_flight_.push_back({tid, in.seq, now_ + 1, false});
      } else {
        std::uint32_t pending = 0;
        for (auto d : in.deps)
          pending += t.done[d] ? 0 : 1;
        rs_.push_back({in.seq, tid, in.op, pending, now_ + 1, true, e.spec_degree, op_class(in.op).port_group});
      }
      t.rob.push_back(e);
      log(EventKind::Dispatch, tid, in.seq);
      ++t.next;
    }
  }
}

} // namespace specwands
