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

// specwands: experiment runner.
//
//   specwands run       --workload inter-sca,loop-div --policy fcfs,specwands --csv out.csv
//   specwands attack    --workload intra-sca --bits 100 --seed 7
//   specwands verify    --bounds 3,3 --model specwands
//   specwands scenarios --workload trace.txt --policy fcfs
//
// Exit codes: 0 ok, 1 a requested check failed, 2 bad usage/config/trace, 3 I/O, 4 simulation error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "specwands/experiment.hpp"
#include "specwands/verifier.hpp"

using namespace specwands;

namespace
{

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kSimulation = 4 };

struct Options {
  std::string config;
  std::vector<std::string> settings;
  std::vector<std::string> policies;
  std::string mode;
  std::vector<std::string> workloads;
  std::size_t bits = 100;
  std::uint64_t seed = 1;
  std::uint32_t trials = 1;
  std::uint32_t burst = 4;
  Cycle resolve = kDefaultResolveLatency;
  std::uint32_t iterations = 8;
  std::string csv;
  std::string event_log;
  std::string bounds = "3,3";
  std::string model = "specwands";
  std::string json;
  std::uint64_t state_cap = kDefaultStateCap;
};

void add_common(CLI::App* sub, Options& o, std::vector<std::string> default_policies,
                std::vector<std::string> default_workloads)
{
  o.policies = std::move(default_policies);
  o.workloads = std::move(default_workloads);
  sub->add_option("--config", o.config, "key = value config file");
  sub->add_option("--set", o.settings, "config override key=value (repeatable)");
  sub->add_option("--policy", o.policies, "fcfs|tdm|sc|specwands[-spectre|-all], comma separated, or 'all'")
      ->delimiter(',');
  sub->add_option("--mode", o.mode, "spectre|all, default mode for sc/specwands");
  sub->add_option("--workload", o.workloads, "trace file or inter-sca|intra-sca|loop-div, comma separated")
      ->delimiter(',');
  sub->add_option("--bits", o.bits, "secret length for channel generators");
  sub->add_option("--seed", o.seed, "secret seed");
  sub->add_option("--trials", o.trials, "repetitions per cell, trial t uses seed + t");
  sub->add_option("--burst", o.burst, "inter-sca sender divs per bit");
  sub->add_option("--resolve", o.resolve, "generator branch resolve latency");
  sub->add_option("--iterations", o.iterations, "loop-div iterations");
  sub->add_option("--csv", o.csv, "write CSV here instead of stdout");
  sub->add_option("--event-log", o.event_log, "write per-cycle event log here");
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::ios_base::failure(fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw std::ios_base::failure(fmt::format("cannot write '{}'", path));
}

ExperimentSpec make_spec(const Options& o)
{
  ExperimentSpec spec;
  if (!o.config.empty())
    spec.config = parse_config(read_file(o.config));
  for (const auto& kv : o.settings) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("--set expects key=value, got '{}'", kv));
    apply_setting(spec.config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.mode.empty())
    spec.config.policy.mode = parse_mode(o.mode);

  const auto mode = spec.config.policy.mode;
  auto add = [&](std::string_view tok) {
    auto kind = parse_policy(tok, mode);
    kind.tdm_slice = spec.config.policy.tdm_slice;
    kind.sc_delayed = spec.config.policy.sc_delayed;
    spec.policies.push_back(kind);
  };
  for (const auto& p : o.policies) {
    if (p == "all")
      for (auto tok : {"fcfs", "tdm", "sc-spectre", "specwands-spectre", "specwands-all"})
        add(tok);
    else
      add(p);
  }
  if (spec.policies.empty())
    spec.policies.push_back(spec.config.policy);
  spec.workloads = o.workloads;
  if (spec.workloads.empty())
    throw ConfigError("at least one --workload is required");
  spec.bits = o.bits;
  spec.seed = o.seed;
  spec.trials = o.trials;
  spec.burst = o.burst;
  spec.resolve_latency = o.resolve;
  spec.iterations = o.iterations;
  return spec;
}

void emit(const std::string& path, const std::string& text)
{
  if (path.empty())
    std::cout << text;
  else
    write_file(path, text);
}

int cmd_run(const Options& o)
{
  auto spec = make_spec(o);
  std::string log;
  auto rows = run_matrix(spec, o.event_log.empty() ? nullptr : &log);
  emit(o.csv, to_csv(rows));
  if (!o.event_log.empty())
    write_file(o.event_log, log);
  return kOk;
}

int cmd_attack(const Options& o)
{
  auto spec = make_spec(o);
  for (const auto& w : spec.workloads)
    if (w != kGeneratorInter && w != kGeneratorIntra)
      throw ConfigError(fmt::format("attack needs inter-sca or intra-sca, got '{}'", w));
  std::string log;
  auto rows = run_matrix(spec, o.event_log.empty() ? nullptr : &log);

  std::string csv = "workload,policy,trial,bit,value,latency\n";
  fmt::print("{:<10} {:<18} {:>5} {:>10} {:>10} {:>10}\n", "workload", "policy", "trial", "threshold", "error", "identical");
  for (const auto& r : rows) {
    fmt::print("{:<10} {:<18} {:>5} {:>10} {:>10.4f} {:>10}\n", r.workload, r.policy, r.trial, r.channel->threshold,
               r.channel->error_rate, r.channel->distributions_identical ? "yes" : "no");
    const auto& t = *r.channel_trial;
    for (std::size_t k = 0; k < t.latency.size(); ++k)
      csv += fmt::format("{},{},{},{},{},{}\n", r.workload, r.policy, r.trial, k, t.secret[k] ? 1 : 0, t.latency[k]);
  }
  if (!o.csv.empty())
    write_file(o.csv, csv);
  if (!o.event_log.empty())
    write_file(o.event_log, log);
  return kOk;
}

int cmd_verify(const Options& o)
{
  VerifierModel model;
  Bounds max;
  try {
    model = parse_verifier_model(o.model);
    max = parse_bounds(o.bounds);
  } catch (const VerifierError& e) {
    throw ConfigError(e.what());
  }

  nlohmann::json summary;
  summary["model"] = std::string(to_string(model));
  summary["bounds"] = {max.sender, max.receiver};
  bool sni_all = true;
  std::map<std::string, PropertyResult> merged;
  std::vector<std::string> order;
  nlohmann::json cells = nlohmann::json::array();

  fmt::print("model {} bounds up to ({},{})\n", to_string(model), max.sender, max.receiver);
  for (std::uint32_t i = 0; i <= max.sender; ++i)
    for (std::uint32_t j = 0; j <= max.receiver; ++j) {
      Bounds b{i, j};
      auto sni = check_sni(model, b, o.state_cap);
      auto inv = check_invariants(model, b, o.state_cap);
      auto e0 = enumerate(model, false, b, o.state_cap);
      auto e1 = enumerate(model, true, b, o.state_cap);
      sni_all = sni_all && sni.holds;
      fmt::print("  ({},{}) sni={} traces={}/{} schedules={}/{}", i, j, sni.holds ? "holds" : "VIOLATED",
                 e0.traces.size(), e1.traces.size(), e0.interleavings, e1.interleavings);
      if (sni.witness)
        fmt::print(" witness={} only with secret={}", format_trace(*sni.witness), sni.witness_secret ? 1 : 0);
      fmt::print("\n");

      nlohmann::json cell = {{"bounds", {i, j}}, {"sni", sni.holds}, {"schedules", {e0.interleavings, e1.interleavings}}};
      if (sni.witness)
        cell["witness"] = {{"trace", format_trace(*sni.witness)}, {"secret", sni.witness_secret ? 1 : 0}};
      cells.push_back(cell);

      for (const auto& p : inv.properties) {
        auto [it, fresh] = merged.try_emplace(p.name, p);
        if (fresh) {
          order.push_back(p.name);
          continue;
        }
        it->second.checked += p.checked;
        if (!p.holds && it->second.holds) {
          it->second.holds = false;
          it->second.witness = p.witness;
        }
      }
    }

  bool props_all = true;
  summary["properties"] = nlohmann::json::object();
  for (const auto& name : order) {
    const auto& p = merged[name];
    props_all = props_all && p.holds;
    fmt::print("{} {} ({} checks)\n", p.name, p.holds ? "holds" : "VIOLATED", p.checked);
    if (!p.holds)
      fmt::print("   witness: {}\n", p.witness);
    summary["properties"][p.name] = {{"holds", p.holds}, {"checked", p.checked}, {"witness", p.witness}};
  }
  fmt::print("sni {}\n", sni_all ? "holds" : "VIOLATED");
  summary["sni"] = sni_all;
  summary["cells"] = cells;
  summary["implied"] = {"P6", "P7", "P8", "P10", "P11", "P12"};
  if (!o.json.empty())
    write_file(o.json, summary.dump(2) + "\n");
  return sni_all && props_all ? kOk : kCheckFailed;
}

int cmd_scenarios(const Options& o)
{
  auto spec = make_spec(o);
  std::string log;
  auto rows = run_matrix(spec, o.event_log.empty() ? nullptr : &log);
  for (const auto& r : rows) {
    fmt::print("== {} {} trial {}\n", r.workload, r.policy, r.trial);
    fmt::print("{}", format_scenarios(r.metrics));
  }
  if (!o.csv.empty())
    write_file(o.csv, to_csv(rows));
  if (!o.event_log.empty())
    write_file(o.event_log, log);
  return kOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Cycle-level SMT issue-scheduling simulator"};
  app.require_subcommand(1);

  Options run_o, attack_o, verify_o, scen_o;
  auto* run = app.add_subcommand("run", "run a workload x policy matrix, one CSV row per cell");
  add_common(run, run_o, {}, {});
  auto* attack = app.add_subcommand("attack", "covert channel trials and error rates");
  add_common(attack, attack_o, {"fcfs", "specwands-spectre", "specwands-all"}, {"inter-sca"});
  auto* verify = app.add_subcommand("verify", "bounded interleaving check of the acquire/release model");
  verify->add_option("--bounds", verify_o.bounds, "max sender,receiver iterations (all smaller bounds included)");
  verify->add_option("--model", verify_o.model, "specwands|fcfs|noclear");
  verify->add_option("--json", verify_o.json, "machine-readable summary path");
  verify->add_option("--state-cap", verify_o.state_cap, "abort past this many states");
  auto* scen = app.add_subcommand("scenarios", "contention scenario distribution");
  add_common(scen, scen_o, {}, {});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run)
      return cmd_run(run_o);
    if (*attack)
      return cmd_attack(attack_o);
    if (*verify)
      return cmd_verify(verify_o);
    if (*scen)
      return cmd_scenarios(scen_o);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const TraceError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  } catch (const VerifierError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSimulation;
  } catch (const SimulationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSimulation;
  } catch (const HarnessError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSimulation;
  }
  return kUsage;
}
