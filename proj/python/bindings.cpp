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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specwands/experiment.hpp"
#include "specwands/verifier.hpp"

namespace py = pybind11;
using namespace specwands;

namespace
{

PipelineConfig make_config(const std::string& policy, const std::string& config_text, const py::dict& settings)
{
  auto cfg = parse_config(config_text);
  if (!policy.empty())
    apply_setting(cfg, "policy", policy);
  for (auto [k, v] : settings)
    apply_setting(cfg, py::str(k).cast<std::string>(), py::str(v).cast<std::string>());
  return cfg;
}

py::dict metrics_dict(const SimMetrics& m)
{
  py::dict d;
  d["cycles"] = m.cycles;
  d["committed"] = m.committed;
  d["squashed"] = m.squashed;
  d["issue_wait"] = m.issue_wait;
  d["preempt_nop"] = m.preemptions.nop;
  d["preempt_eop"] = m.preemptions.eop;
  d["reexecution_cycles"] = m.reexecution_cycles;
  py::dict scen;
  for (std::size_t i = 0; i < kNumScenarios; ++i)
    scen[py::str(std::string(to_string(static_cast<ScenarioClass>(i))))] = m.scenario_counts[i];
  d["scenarios"] = scen;
  d["nonspec_contention"] = m.nonspec_contention;
  d["out_of_slice_issues"] = m.out_of_slice_issues;
  d["label_completion"] = m.label_completion;
  d["sync_commits"] = m.sync_commits;
  d["div_busy"] = std::array<double, 2>{m.busy_rate(OpKind::IntDiv, 0), m.busy_rate(OpKind::IntDiv, 1)};
  d["partial"] = m.partial;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Cycle-level SMT issue-scheduling simulator";

  py::register_exception<TraceError>(m, "TraceError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<HarnessError>(m, "HarnessError", PyExc_RuntimeError);
  py::register_exception<VerifierError>(m, "VerifierError", PyExc_RuntimeError);

  py::class_<Workload>(m, "Workload")
      .def_readwrite("name", &Workload::name)
      .def("__len__", [](const Workload& w) { return w.threads[0].size() + w.threads[1].size(); })
      .def("thread_size", [](const Workload& w, int tid) { return w.threads.at(tid).size(); })
      .def("__eq__", [](const Workload& a, const Workload& b) { return a == b; })
      .def("emit", &emit_trace)
      .def("validate", &validate);

  m.def("parse_trace", &parse_trace, py::arg("text"), py::arg("name") = "trace");
  m.def("emit_trace", &emit_trace);
  m.def("validate", &validate);

  m.def("random_secret", &random_secret, py::arg("bits"), py::arg("seed"));
  m.def("gen_inter_sca", &gen_inter_sca, py::arg("secret"), py::arg("div_burst") = 4,
        py::arg("resolve_latency") = kDefaultResolveLatency);
  m.def("gen_intra_sca", &gen_intra_sca, py::arg("secret"), py::arg("resolve_latency") = kDefaultResolveLatency,
        py::arg("load_latency") = 4);
  m.def("gen_loop_div", &gen_loop_div, py::arg("iterations"), py::arg("resolve_latency") = kDefaultResolveLatency);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init(&make_config), py::arg("policy") = "", py::arg("config_text") = "",
           py::arg("settings") = py::dict())
      .def_property_readonly("policy", [](const PipelineConfig& c) { return c.policy.name(); })
      .def("grouping", [](const PipelineConfig& c) { return grouping_config(c); });

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<PipelineConfig, Workload>())
      .def("tick", &Simulator::tick)
      .def("done", &Simulator::done)
      .def_property_readonly("cycle", &Simulator::cycle)
      .def("enable_event_log", &Simulator::enable_event_log, py::arg("on") = true)
      .def("event_log", &Simulator::event_log)
      .def("run", [](Simulator& s) { return metrics_dict(s.run()); })
      .def("metrics", [](const Simulator& s) { return metrics_dict(s.snapshot_metrics()); });

  py::class_<ChannelReport>(m, "ChannelReport")
      .def_readonly("threshold", &ChannelReport::threshold)
      .def_readonly("error_rate", &ChannelReport::error_rate)
      .def_readonly("distributions_identical", &ChannelReport::distributions_identical);

  m.def(
      "run_channel",
      [](const Workload& w, const Secret& secret, const PipelineConfig& cfg, ThreadId timer) {
        auto t = run_channel(w, secret, cfg, timer);
        return py::make_tuple(t.latency, measure_error_rate(t));
      },
      py::arg("workload"), py::arg("secret"), py::arg("config"), py::arg("timer_tid"),
      "Returns (per-bit receiver latencies, ChannelReport).");

  py::class_<SniResult>(m, "SniResult")
      .def_readonly("holds", &SniResult::holds)
      .def_readonly("witness", &SniResult::witness)
      .def_readonly("witness_secret", &SniResult::witness_secret);

  m.def(
      "check_sni",
      [](const std::string& model, std::uint32_t i, std::uint32_t j) {
        return check_sni(parse_verifier_model(model), {i, j});
      },
      py::arg("model"), py::arg("sender"), py::arg("receiver"));
  m.def(
      "check_invariants",
      [](const std::string& model, std::uint32_t i, std::uint32_t j) {
        py::dict out;
        for (const auto& p : check_invariants(parse_verifier_model(model), {i, j}).properties)
          out[py::str(p.name)] = p.holds;
        return out;
      },
      py::arg("model"), py::arg("sender"), py::arg("receiver"));

  m.def(
      "run_matrix",
      [](const std::vector<std::string>& workloads, const std::vector<std::string>& policies, std::size_t bits,
         std::uint64_t seed) {
        ExperimentSpec spec;
        spec.workloads = workloads;
        for (const auto& p : policies)
          spec.policies.push_back(parse_policy(p));
        spec.bits = bits;
        spec.seed = seed;
        return to_csv(run_matrix(spec));
      },
      py::arg("workloads"), py::arg("policies"), py::arg("bits") = 100, py::arg("seed") = 1,
      "Runs the matrix and returns the CSV text.");
}
