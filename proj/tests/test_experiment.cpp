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

#include <gtest/gtest.h>

#include "specwands/experiment.hpp"
#include "sim_util.hpp"

using namespace specwands;
using namespace specwands::testing;

namespace
{

ExperimentSpec small_spec()
{
  ExperimentSpec spec;
  spec.workloads = {std::string(kGeneratorInter), std::string(kGeneratorIntra), std::string(kGeneratorLoop)};
  spec.policies = {PolicyKind::fcfs(), parse_policy("tdm"), parse_policy("sc-spectre"), parse_policy("specwands-all")};
  spec.trials = 2;
  spec.bits = 12;
  spec.iterations = 3;
  return spec;
}

std::size_t count_char(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

} // namespace

TEST(Experiment, CsvColumnsArePinned)
{
  EXPECT_EQ(csv_header(),
            "workload,policy,trial,cycles,committed_t0,committed_t1,squashed_t0,squashed_t1,issue_wait_mean,"
            "issue_wait_max,port_busy_t0,port_busy_t1,div_busy_t0,div_busy_t1,preempt_nop,preempt_eop,"
            "reexec_cycles,scen_not_issued,scen_no_contention,scen_s1,scen_s2,scen_s3,scen_s4,nonspec_contention,"
            "out_of_slice_issues,threshold,error_rate,distributions_identical\n");
}

TEST(Experiment, RowsFollowMatrixOrder)
{
  auto spec = small_spec();
  auto rows = run_matrix(spec);
  ASSERT_EQ(rows.size(), 3u * 4u * 2u);
  EXPECT_EQ(rows[0].policy, "fcfs");
  EXPECT_EQ(rows[1].trial, 1u);
  EXPECT_EQ(rows[2].policy, "tdm");
  for (const auto& r : rows) {
    EXPECT_EQ(r.channel.has_value(), r.workload != "loop-div") << r.workload;
    auto line = csv_row(r);
    EXPECT_EQ(count_char(line, ','), csv_columns().size() - 1);
  }
}

TEST(Experiment, Deterministic)
{
  auto spec = small_spec();
  std::string log_a, log_b;
  auto a = to_csv(run_matrix(spec, &log_a));
  auto b = to_csv(run_matrix(spec, &log_b));
  EXPECT_EQ(a, b);
  EXPECT_EQ(log_a, log_b);
  EXPECT_FALSE(log_a.empty());
  spec.seed = 99;
  EXPECT_NE(to_csv(run_matrix(spec)), a);
}

TEST(Experiment, TrialSecretsFollowSeed)
{
  auto spec = small_spec();
  spec.workloads = {std::string(kGeneratorInter)};
  spec.policies = {PolicyKind::fcfs()};
  auto rows = run_matrix(spec);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.channel_trial);
    EXPECT_EQ(r.channel_trial->secret, random_secret(spec.bits, spec.seed + r.trial));
    EXPECT_EQ(r.channel->error_rate, 0.0);
  }
}

TEST(Experiment, LoopDivUsesGroupingConfig)
{
  auto spec = small_spec();
  auto cfg = cell_config(spec, std::string(kGeneratorLoop), PolicyKind::fcfs());
  EXPECT_EQ(cfg.ports, grouping_config(spec.config).ports);
  EXPECT_EQ(cfg.owner_init, OwnerInit::Alternate);
  EXPECT_EQ(cell_config(spec, std::string(kGeneratorInter), PolicyKind::fcfs()).ports, spec.config.ports);
}

TEST(Experiment, MissingTraceFileThrows)
{
  auto spec = small_spec();
  EXPECT_THROW(load_workload(spec, "/nonexistent/trace.txt", 0), std::ios_base::failure);
}

TEST(Experiment, ScenarioShares)
{
  auto run = simulate(config_for("fcfs"), gen_inter_sca(parse_secret("1011")));
  auto shares = report_scenarios(run.metrics);
  ASSERT_EQ(shares.size(), kNumScenarios);
  double sum = 0.0;
  for (const auto& s : shares)
    sum += s.fraction;
  ASSERT_GT(run.metrics.classified_events(), 0u);
  EXPECT_NEAR(sum, 1.0, 1e-9);
  auto text = format_scenarios(run.metrics);
  EXPECT_NE(text.find("total"), std::string::npos);
}
