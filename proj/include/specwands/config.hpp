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

#ifndef SPECWANDS_CONFIG_HPP
#define SPECWANDS_CONFIG_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "specwands/workload.hpp"

namespace specwands
{

/// When an instruction counts as non-speculative.
///  Spectre: every older branch resolved and predicted correctly.
///  All:     every older instruction completed without an exception.
enum class Mode : std::uint8_t { Spectre, All };

enum class PolicyVariant : std::uint8_t { Fcfs, Tdm, SpecCompress, SpecWands };

struct PolicyKind {
  PolicyVariant variant = PolicyVariant::Fcfs;
  Cycle tdm_slice = kDefaultDivLatency;              ///< Tdm only
  std::set<OpKind> sc_delayed = {OpKind::IntDiv};    ///< SpecCompress only
  Mode mode = Mode::Spectre;                         ///< SpecWands and SpecCompress

  static PolicyKind fcfs() { return {}; }
  static PolicyKind tdm(Cycle slice = kDefaultDivLatency);
  static PolicyKind spec_compress(Mode m = Mode::Spectre, std::set<OpKind> delayed = {OpKind::IntDiv});
  static PolicyKind spec_wands(Mode m = Mode::Spectre);

  /// Short tag used in CSV rows: fcfs, tdm, sc-spectre, specwands-all, ...
  std::string name() const;

  friend bool operator==(const PolicyKind&, const PolicyKind&) = default;
};

/// Accepts fcfs, tdm, sc, sc-spectre, sc-all, specwands, specwands-spectre, specwands-all.
/// A bare "sc"/"specwands" takes `default_mode`.
PolicyKind parse_policy(std::string_view token, Mode default_mode = Mode::Spectre);
Mode parse_mode(std::string_view token);
std::string_view to_string(Mode m);

struct PortSpec {
  std::set<OpKind> kinds;
  friend bool operator==(const PortSpec&, const PortSpec&) = default;
};

enum class OwnerInit : std::uint8_t { Thread0, Thread1, Alternate };

struct PipelineConfig {
  std::size_t rob_capacity = 64; ///< per thread
  std::size_t rs_capacity = 64;  ///< shared
  std::size_t issue_width = 8;
  std::size_t ssc_scan_width = 0; ///< 0: same as issue_width
  std::vector<PortSpec> ports = default_ports();
  PolicyKind policy;
  OwnerInit owner_init = OwnerInit::Thread0;
  std::map<OpKind, Cycle> latency; ///< per-kind default latency overrides
  Cycle max_cycles = 10'000'000;

  std::size_t scan_width() const { return ssc_scan_width ? ssc_scan_width : issue_width; }
  Cycle default_latency(OpKind k) const;
  Mode mode() const { return policy.mode; }

  static std::vector<PortSpec> default_ports();
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses a key/value config file (see docs/config-format.md) on top of `base`.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});

/// Port list syntax: comma separated ports, each a '+'-joined list of op names ("alu,alu+div,br").
std::vector<PortSpec> parse_ports(std::string_view text);

} // namespace specwands

#endif
