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

#include "specwands/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace specwands
{

bool is_generator(std::string_view w) { return w == kGeneratorInter || w == kGeneratorIntra || w == kGeneratorLoop; }

Workload load_workload(const ExperimentSpec& spec, const std::string& source, std::uint32_t trial)
{
  if (source == kGeneratorInter)
    return gen_inter_sca(random_secret(spec.bits, spec.seed + trial), spec.burst, spec.resolve_latency);
  if (source == kGeneratorIntra)
    return gen_intra_sca(random_secret(spec.bits, spec.seed + trial), spec.resolve_latency);
  if (source == kGeneratorLoop)
    return gen_loop_div(spec.iterations, spec.resolve_latency);

  std::ifstream in(source, std::ios::binary);
  if (!in)
    throw std::ios_base::failure(fmt::format("cannot read workload '{}'", source));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), std::filesystem::path(source).stem().string());
}

PipelineConfig cell_config(const ExperimentSpec& spec, const std::string& source, const PolicyKind& policy)
{
  auto cfg = spec.config;
  cfg.policy = policy;
  if (source == kGeneratorLoop)
    cfg = grouping_config(std::move(cfg));
  return cfg;
}

std::vector<ExperimentRow> run_matrix(const ExperimentSpec& spec, std::string* event_log)
{
  std::vector<ExperimentRow> rows;
  for (const auto& source : spec.workloads)
    for (const auto& policy : spec.policies)
      for (std::uint32_t t = 0; t < spec.trials; ++t) {
        auto w = load_workload(spec, source, t);
        auto cfg = cell_config(spec, source, policy);

        ExperimentRow row{w.name, policy.name(), t, {}, {}, {}};
        Simulator sim(cfg, w);
        sim.enable_event_log(event_log != nullptr);
        row.metrics = sim.run();

        if (source == kGeneratorInter || source == kGeneratorIntra) {
          auto secret = random_secret(spec.bits, spec.seed + t);
          ThreadId timer = source == kGeneratorInter ? 1 : 0;
          ChannelTrial trial{secret, {}, policy};
          for (std::size_t k = 0; k < secret.size(); ++k) {
            auto it = row.metrics.label_completion.find(fmt::format("rx{}", k));
            if (it == row.metrics.label_completion.end() || k >= row.metrics.sync_commits[timer].size())
              throw HarnessError(fmt::format("workload '{}' lost receiver bit {}", w.name, k));
            trial.latency.push_back(it->second - row.metrics.sync_commits[timer][k]);
          }
          row.channel = measure_error_rate(trial);
          row.channel_trial = std::move(trial);
        }
        if (event_log) {
          *event_log += fmt::format("# {} {} trial {}\n", w.name, policy.name(), t);
          *event_log += sim.event_log();
        }
        rows.push_back(std::move(row));
      }
  return rows;
}

const std::vector<std::string>& csv_columns()
{
  static const std::vector<std::string> cols = {
      "workload",      "policy",        "trial",         "cycles",          "committed_t0",
      "committed_t1",  "squashed_t0",   "squashed_t1",   "issue_wait_mean", "issue_wait_max",
      "port_busy_t0",  "port_busy_t1",  "div_busy_t0",   "div_busy_t1",     "preempt_nop",
      "preempt_eop",   "reexec_cycles", "scen_not_issued", "scen_no_contention", "scen_s1",
      "scen_s2",       "scen_s3",       "scen_s4",       "nonspec_contention", "out_of_slice_issues",
      "threshold",     "error_rate",    "distributions_identical"};
  return cols;
}

std::string csv_header()
{
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty())
      out += ',';
    out += c;
  }
  return out + '\n';
}

namespace
{

double mean_port_busy(const SimMetrics& m, ThreadId tid)
{
  if (m.ports.empty())
    return 0.0;
  double sum = 0.0;
  for (std::size_t p = 0; p < m.ports.size(); ++p)
    sum += m.port_busy_rate(p, tid);
  return sum / static_cast<double>(m.ports.size());
}

} // namespace

std::string csv_row(const ExperimentRow& r)
{
  const auto& m = r.metrics;
  auto out = fmt::format("{},{},{},{},{},{},{},{},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{}", r.workload, r.policy,
                         r.trial, m.cycles, m.committed[0], m.committed[1], m.squashed[0], m.squashed[1],
                         m.issue_wait_mean(), m.issue_wait_max(), mean_port_busy(m, 0), mean_port_busy(m, 1),
                         m.busy_rate(OpKind::IntDiv, 0), m.busy_rate(OpKind::IntDiv, 1), m.preemptions.nop,
                         m.preemptions.eop, m.reexecution_cycles);
  for (auto c : m.scenario_counts)
    out += fmt::format(",{}", c);
  out += fmt::format(",{},{}", m.nonspec_contention, m.out_of_slice_issues);
  if (r.channel)
    out += fmt::format(",{},{:.6f},{}", r.channel->threshold, r.channel->error_rate,
                       r.channel->distributions_identical ? 1 : 0);
  else
    out += ",,,";
  return out + '\n';
}

std::string to_csv(const std::vector<ExperimentRow>& rows)
{
  auto out = csv_header();
  for (const auto& r : rows)
    out += csv_row(r);
  return out;
}

std::vector<ScenarioShare> report_scenarios(const SimMetrics& m)
{
  std::vector<ScenarioShare> out;
  const auto total = m.classified_events();
  for (std::size_t i = 0; i < kNumScenarios; ++i) {
    auto c = m.scenario_counts[i];
    out.push_back({static_cast<ScenarioClass>(i), c, total ? static_cast<double>(c) / static_cast<double>(total) : 0.0});
  }
  return out;
}

std::string format_scenarios(const SimMetrics& m)
{
  std::string out = fmt::format("{:<14} {:>10} {:>9}\n", "scenario", "count", "share");
  for (const auto& s : report_scenarios(m))
    out += fmt::format("{:<14} {:>10} {:>8.2f}%\n", to_string(s.scenario), s.count, 100.0 * s.fraction);
  out += fmt::format("{:<14} {:>10}\n", "total", m.classified_events());
  out += fmt::format("{:<14} {:>10}   (both non-speculative, not in S1-S4)\n", "ns_vs_ns", m.nonspec_contention);
  return out;
}

} // namespace specwands
