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

#include "specwands/harness.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <fmt/core.h>

namespace specwands
{

Secret random_secret(std::size_t bits, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  Secret s(bits);
  for (std::size_t i = 0; i < bits; ++i)
    s[i] = (rng() & 1u) != 0;
  return s;
}

std::string to_string(const Secret& s)
{
  std::string out;
  out.reserve(s.size());
  for (bool b : s)
    out += b ? '1' : '0';
  return out;
}

Secret parse_secret(std::string_view bits)
{
  Secret s;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw HarnessError(fmt::format("secret must be a 0/1 string, got '{}'", bits));
    s.push_back(c == '1');
  }
  return s;
}

namespace
{

Instruction& branch(Workload& w, ThreadId tid, BranchOutcome outcome, Cycle resolve, std::uint32_t squash)
{
  auto& b = append(w, tid, OpKind::Branch);
  b.branch = BranchMeta{resolve, outcome, squash};
  return b;
}

} // namespace

Workload gen_inter_sca(const Secret& secret, std::uint32_t div_burst, Cycle resolve_latency)
{
  if (div_burst == 0)
    throw HarnessError("div_burst must be >= 1");
  Workload w;
  w.name = "inter-sca";
  for (std::size_t k = 0; k < secret.size(); ++k) {
    append(w, 0, OpKind::Sync);
    branch(w, 0, BranchOutcome::Mispredict, resolve_latency, div_burst);
    for (std::uint32_t i = 0; i < div_burst; ++i)
      append(w, 0, secret[k] ? OpKind::IntDiv : OpKind::Nop);

    append(w, 1, OpKind::Sync);
    auto alu = append(w, 1, OpKind::IntAlu).seq;
    auto& rx = append(w, 1, OpKind::IntDiv);
    rx.deps = {alu};
    rx.label = fmt::format("rx{}", k);
  }
  return w;
}

Workload gen_intra_sca(const Secret& secret, Cycle resolve_latency, Cycle load_latency)
{
  Workload w;
  w.name = "intra-sca";
  for (std::size_t k = 0; k < secret.size(); ++k) {
    append(w, 0, OpKind::Sync);
    branch(w, 0, BranchOutcome::CorrectPredict, resolve_latency, 0);
    auto& ld = append(w, 0, OpKind::Load);
    ld.latency_override = load_latency;
    auto ld_seq = ld.seq;
    auto& rx = append(w, 0, OpKind::IntDiv);
    rx.deps = {ld_seq};
    rx.label = fmt::format("rx{}", k);
    branch(w, 0, BranchOutcome::Mispredict, resolve_latency, 1);
    append(w, 0, secret[k] ? OpKind::IntDiv : OpKind::Nop);

    append(w, 1, OpKind::Sync);
  }
  return w;
}

Workload gen_loop_div(std::uint32_t iterations, Cycle resolve_latency)
{
  if (iterations == 0)
    throw HarnessError("iterations must be >= 1");
  Workload w;
  w.name = "loop-div";
  for (ThreadId tid = 0; tid < kNumThreads; ++tid) {
    std::optional<Seq> prev;
    for (std::uint32_t i = 0; i < iterations; ++i) {
      auto& b = branch(w, tid, BranchOutcome::CorrectPredict, resolve_latency, 0);
      if (prev)
        b.deps = {*prev};
      auto& d = append(w, tid, OpKind::IntDiv);
      d.label = fmt::format("t{}.div{}", tid, i);
      prev = d.seq;
    }
  }
  return w;
}

PipelineConfig grouping_config(PipelineConfig base)
{
  base.ports = parse_ports("br,br,div,div,div,div,div,div,div,div");
  base.owner_init = OwnerInit::Alternate;
  return base;
}

ChannelTrial run_channel(const Workload& w, const Secret& secret, const PipelineConfig& cfg, ThreadId timer_tid,
                         SimMetrics* metrics)
{
  Simulator sim(cfg, w);
  auto m = sim.run();
  const auto& syncs = m.sync_commits[timer_tid];
  if (syncs.size() < secret.size())
    throw HarnessError(fmt::format("workload '{}' has {} Syncs for {} bits", w.name, syncs.size(), secret.size()));

  ChannelTrial t{secret, {}, cfg.policy};
  for (std::size_t k = 0; k < secret.size(); ++k) {
    auto it = m.label_completion.find(fmt::format("rx{}", k));
    if (it == m.label_completion.end())
      throw HarnessError(fmt::format("workload '{}' has no completed receiver label rx{}", w.name, k));
    t.latency.push_back(it->second - syncs[k]);
  }
  if (metrics)
    *metrics = std::move(m);
  return t;
}

ChannelReport measure_error_rate(const ChannelTrial& trial)
{
  std::array<std::map<Cycle, std::uint64_t>, 2> hist;
  std::array<std::uint64_t, 2> n{};
  for (std::size_t i = 0; i < trial.latency.size(); ++i) {
    ++hist[trial.secret[i]][trial.latency[i]];
    ++n[trial.secret[i]];
  }

  ChannelReport r;
  if (n[0] == 0 || n[1] == 0) {
    r.distributions_identical = true;
    r.threshold = trial.latency.empty() ? 0 : *std::min_element(trial.latency.begin(), trial.latency.end());
    return r;
  }

  // same relative frequency for every latency value
  std::set<Cycle> values;
  for (const auto& h : hist)
    for (auto [v, c] : h)
      values.insert(v);
  r.distributions_identical = std::all_of(values.begin(), values.end(), [&](Cycle v) {
    auto c0 = hist[0].contains(v) ? hist[0].at(v) : 0;
    auto c1 = hist[1].contains(v) ? hist[1].at(v) : 0;
    return c0 * n[1] == c1 * n[0];
  });

  // sweep thresholds: decode "above" as 1 (or, flipped, as 0). Error kept as an exact fraction of 2*n0*n1.
  const std::uint64_t whole = 2 * n[0] * n[1];
  std::uint64_t best = whole / 2;
  std::array<std::uint64_t, 2> at_or_below{};
  r.threshold = *values.begin();
  for (auto v : values) {
    for (int b = 0; b < 2; ++b)
      at_or_below[b] += hist[b].contains(v) ? hist[b].at(v) : 0;
    std::uint64_t wrong = (n[0] - at_or_below[0]) * n[1] + at_or_below[1] * n[0];
    wrong = std::min(wrong, whole - wrong);
    if (wrong < best) {
      best = wrong;
      r.threshold = v;
    }
  }
  r.error_rate = static_cast<double>(best) / static_cast<double>(whole);
  return r;
}

} // namespace specwands
