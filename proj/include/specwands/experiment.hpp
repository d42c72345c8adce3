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

#ifndef SPECWANDS_EXPERIMENT_HPP
#define SPECWANDS_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specwands/config.hpp"
#include "specwands/harness.hpp"
#include "specwands/pipeline.hpp"

namespace specwands
{

/// Built-in generators, usable wherever a workload path is accepted.
inline constexpr std::string_view kGeneratorInter = "inter-sca";
inline constexpr std::string_view kGeneratorIntra = "intra-sca";
inline constexpr std::string_view kGeneratorLoop = "loop-div";
bool is_generator(std::string_view workload);

struct ExperimentSpec {
  std::vector<std::string> workloads; ///< trace paths or generator names
  std::vector<PolicyKind> policies;
  std::uint32_t trials = 1;
  std::uint64_t seed = 1; ///< trial t draws its secret from random_secret(bits, seed + t)
  std::size_t bits = 100;
  std::uint32_t burst = 4;
  Cycle resolve_latency = kDefaultResolveLatency;
  std::uint32_t iterations = 8;
  PipelineConfig config;
};

struct ExperimentRow {
  std::string workload;
  std::string policy;
  std::uint32_t trial = 0;
  SimMetrics metrics;
  std::optional<ChannelReport> channel;
  std::optional<ChannelTrial> channel_trial;
};

/// Resolves one workload source for a trial. Generators use the trial's secret.
Workload load_workload(const ExperimentSpec& spec, const std::string& source, std::uint32_t trial);

/// Config for one matrix cell: the experiment config with the cell's policy. loop-div also gets
/// grouping_config().
PipelineConfig cell_config(const ExperimentSpec& spec, const std::string& source, const PolicyKind& policy);

/// Rows in (workload, policy, trial) order. Appends per-cell event logs to `event_log` when given.
std::vector<ExperimentRow> run_matrix(const ExperimentSpec& spec, std::string* event_log = nullptr);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const ExperimentRow& r);
std::string to_csv(const std::vector<ExperimentRow>& rows);

struct ScenarioShare {
  ScenarioClass scenario;
  std::uint64_t count = 0;
  double fraction = 0.0;
};

/// Share of each contention class among classified first issue attempts.
std::vector<ScenarioShare> report_scenarios(const SimMetrics& m);
std::string format_scenarios(const SimMetrics& m);

} // namespace specwands

#endif
