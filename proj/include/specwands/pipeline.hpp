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

#ifndef SPECWANDS_PIPELINE_HPP
#define SPECWANDS_PIPELINE_HPP

// Cycle-stepped SMT issue/execute back end.
//
// Phase order inside one tick():
//   1. complete  - ops whose latency ends this cycle finish, wake dependents, free their port
//   2. commit    - retire completed ROB heads; Sync pairs retire together
//   3. resolve   - branches whose resolve latency ends this cycle; mispredicts squash
//   4. scan      - one SSC scan_step per thread, then port owner tags are refreshed
//   5. wakeup    - last cycle's preemption victims re-enter the RS
//   6. issue     - candidates walk the policy, Issue / Preempt / Skip
//   7. metrics   - busy accounting
//   8. dispatch  - front end fills ROB + RS for the next cycle
//
// An op issued at cycle c with latency L completes in phase 1 of cycle c+L,
// so a dependent can issue at c+L and an unpipelined port is busy for [c, c+L).

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specwands/config.hpp"
#include "specwands/policy.hpp"
#include "specwands/ssc.hpp"
#include "specwands/workload.hpp"

namespace specwands
{

enum class RobState : std::uint8_t { Dispatched, Issued, Executing, Completed, Committed, Squashed };

struct RobEntry : SscEntry {
  Seq seq = 0;
  ThreadId tid = 0;
  RobState state = RobState::Dispatched;
  Cycle dispatch_cycle = 0;
  Cycle issue_cycle = 0;
  Cycle complete_at = 0;
  int port = -1;
  bool classified = false; ///< contention scenario already recorded
};

enum class EventKind : std::uint8_t { Dispatch, Issue, Preempt, Reinsert, Complete, Resolve, Squash, Commit, Owner };
std::string_view to_string(EventKind k);

struct Event {
  Cycle cycle = 0;
  EventKind kind = EventKind::Issue;
  ThreadId tid = 0;
  Seq seq = 0;
  int port = -1;

  friend bool operator==(const Event&, const Event&) = default;
};

/// `<cycle> <event> T<tid> #<seq>[ port=<p>]`
std::string format_event(const Event& e);

struct PreemptionCounts {
  std::uint64_t nop = 0; ///< cross-thread, non-speculative over speculative
  std::uint64_t eop = 0; ///< same thread, earlier over later
  friend bool operator==(const PreemptionCounts&, const PreemptionCounts&) = default;
};

struct SimMetrics {
  Cycle cycles = 0;
  std::array<std::uint64_t, kNumThreads> committed{};
  std::array<std::uint64_t, kNumThreads> squashed{};
  std::map<Cycle, std::uint64_t> issue_wait; ///< operand-ready to issue, cycles -> count
  std::vector<std::array<std::uint64_t, kNumThreads>> port_busy_cycles;
  std::vector<PortSpec> ports;
  PreemptionCounts preemptions;
  std::uint64_t reexecution_cycles = 0;
  std::array<std::uint64_t, kNumScenarios> scenario_counts{};
  std::uint64_t nonspec_contention = 0; ///< first attempts blocked by a non-speculative op while non-speculative
  std::uint64_t out_of_slice_issues = 0; ///< Tdm only
  std::map<std::string, Cycle> label_completion;
  std::array<std::vector<Cycle>, kNumThreads> sync_commits;
  bool partial = false;

  double port_busy_rate(std::size_t port, ThreadId tid) const;
  /// Busy rate over every port that can execute `kind`, averaged across those ports.
  double busy_rate(OpKind kind, ThreadId tid) const;
  double issue_wait_mean() const;
  Cycle issue_wait_max() const;
  std::uint64_t scenario(ScenarioClass c) const { return scenario_counts[static_cast<std::size_t>(c)]; }
  std::uint64_t classified_events() const;

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class Simulator
{
public:
  Simulator(PipelineConfig cfg, Workload w);

  void tick();
  /// Ticks until every instruction has committed or been squashed.
  /// Throws SimulationError past cfg.max_cycles.
  SimMetrics run();
  bool done() const;

  SimMetrics snapshot_metrics() const;

  Cycle cycle() const { return now_; }
  const PipelineConfig& config() const { return cfg_; }
  const Workload& workload() const { return work_; }

  void enable_event_log(bool on = true) { log_events_ = on; }
  const std::vector<Event>& events() const { return events_; }
  std::string event_log() const;

  const std::deque<RobEntry>& rob(ThreadId tid) const { return threads_[tid].rob; }
  const SscRegisters& ssc(ThreadId tid) const { return threads_[tid].ssc; }
  const std::vector<RsEntry>& rs() const { return rs_; }
  const std::vector<PortState>& ports() const { return ports_; }

private:
  struct InFlight {
    ThreadId tid = 0;
    Seq seq = 0;
    Cycle complete_at = 0;
    bool branch = false;
  };

  struct ThreadState {
    std::deque<RobEntry> rob;
    SscRegisters ssc;
    std::size_t next = 0;              ///< next trace index to dispatch
    bool waiting_sync = false;         ///< dispatched a Sync that has not committed yet
    std::vector<std::uint8_t> done;    ///< per trace index: producer result available
    std::vector<std::uint8_t> killed;  ///< per trace index: squashed
    std::vector<std::vector<Seq>> consumers;
  };

  const Instruction& inst(ThreadId tid, Seq seq) const { return work_.threads[tid][seq]; }
  RobEntry* find(ThreadId tid, Seq seq);
  Cycle latency_of(const Instruction& in) const;
  std::vector<std::size_t> ports_for(OpKind k) const;
  void log(EventKind k, ThreadId tid, Seq seq, int port = -1);

  void complete_phase();
  void finish(RobEntry& e);
  void commit_phase();
  void resolve_phase();
  void resolve_branch(ThreadId tid, Seq seq);
  void squash(ThreadId tid, Seq first, Seq last);
  void scan_phase();
  void wakeup_phase();
  void issue_phase();
  void issue_on(std::size_t p, const RsEntry& cand);
  void preempt(std::size_t p, const RsEntry& cand);
  void metrics_phase();
  void dispatch_phase();
  std::size_t dispatch_limit(ThreadId tid) const;

  PipelineConfig cfg_;
  Workload work_;
  Cycle now_ = 0;
  std::array<ThreadState, kNumThreads> threads_;
  std::vector<RsEntry> rs_;
  std::vector<PortState> ports_;
  std::vector<InFlight> in_flight_;
  std::array<std::vector<std::size_t>, kAllOpKinds.size()> port_map_;

  SimMetrics m_;
  bool log_events_ = false;
  std::vector<Event> events_;
};

} // namespace specwands

#endif
