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

#include "specwands/config.hpp"

#include <charconv>

#include <fmt/core.h>

namespace specwands
{

namespace
{

std::string_view trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    auto c = s.find(sep, i);
    out.push_back(trim(s.substr(i, c == std::string_view::npos ? std::string_view::npos : c - i)));
    i = c == std::string_view::npos ? s.size() + 1 : c + 1;
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v, std::uint64_t min = 0)
{
  std::uint64_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: expected an unsigned integer, got '{}'", key, v));
  if (n < min)
    throw ConfigError(fmt::format("{}: must be >= {}", key, min));
  return n;
}

OpKind to_kind(std::string_view key, std::string_view v)
{
  auto k = parse_op_kind(v);
  if (!k)
    throw ConfigError(fmt::format("{}: unknown op '{}'", key, v));
  return *k;
}

} // namespace

PolicyKind PolicyKind::tdm(Cycle slice)
{
  PolicyKind p;
  p.variant = PolicyVariant::Tdm;
  p.tdm_slice = slice;
  return p;
}

PolicyKind PolicyKind::spec_compress(Mode m, std::set<OpKind> delayed)
{
  PolicyKind p;
  p.variant = PolicyVariant::SpecCompress;
  p.mode = m;
  p.sc_delayed = std::move(delayed);
  return p;
}

PolicyKind PolicyKind::spec_wands(Mode m)
{
  PolicyKind p;
  p.variant = PolicyVariant::SpecWands;
  p.mode = m;
  return p;
}

std::string PolicyKind::name() const
{
  switch (variant) {
  case PolicyVariant::Fcfs:
    return "fcfs";
  case PolicyVariant::Tdm:
    return "tdm";
  case PolicyVariant::SpecCompress:
    return fmt::format("sc-{}", to_string(mode));
  case PolicyVariant::SpecWands:
    return fmt::format("specwands-{}", to_string(mode));
  }
  return "?";
}

std::string_view to_string(Mode m) { return m == Mode::Spectre ? "spectre" : "all"; }

Mode parse_mode(std::string_view token)
{
  if (token == "spectre")
    return Mode::Spectre;
  if (token == "all")
    return Mode::All;
  throw ConfigError(fmt::format("mode: expected spectre|all, got '{}'", token));
}

PolicyKind parse_policy(std::string_view token, Mode default_mode)
{
  auto dash = token.find('-');
  auto base = token.substr(0, dash);
  Mode m = dash == std::string_view::npos ? default_mode : parse_mode(token.substr(dash + 1));
  if (base == "fcfs" && dash == std::string_view::npos)
    return PolicyKind::fcfs();
  if (base == "tdm" && dash == std::string_view::npos)
    return PolicyKind::tdm();
  if (base == "sc")
    return PolicyKind::spec_compress(m);
  if (base == "specwands")
    return PolicyKind::spec_wands(m);
  throw ConfigError(fmt::format("policy: expected fcfs|tdm|sc|specwands[-spectre|-all], got '{}'", token));
}

std::vector<PortSpec> PipelineConfig::default_ports()
{
  return parse_ports("alu,alu,div,br,load,load");
}

Cycle PipelineConfig::default_latency(OpKind k) const
{
  if (auto it = latency.find(k); it != latency.end())
    return it->second;
  return op_class(k).default_latency;
}

std::vector<PortSpec> parse_ports(std::string_view text)
{
  std::vector<PortSpec> ports;
  for (auto port : split(text, ',')) {
    PortSpec p;
    for (auto k : split(port, '+')) {
      auto kind = to_kind("ports", k);
      if (!needs_port(kind))
        throw ConfigError(fmt::format("ports: '{}' does not use an issue port", k));
      p.kinds.insert(kind);
    }
    ports.push_back(std::move(p));
  }
  if (ports.empty())
    throw ConfigError("ports: at least one port required");
  return ports;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value)
{
  key = trim(key);
  value = trim(value);
  if (key == "rob_capacity")
    cfg.rob_capacity = to_uint(key, value, 1);
  else if (key == "rs_capacity")
    cfg.rs_capacity = to_uint(key, value, 1);
  else if (key == "issue_width")
    cfg.issue_width = to_uint(key, value, 1);
  else if (key == "ssc_scan_width")
    cfg.ssc_scan_width = to_uint(key, value, 1);
  else if (key == "ports")
    cfg.ports = parse_ports(value);
  else if (key == "policy") {
    auto keep = cfg.policy;
    cfg.policy = parse_policy(value, keep.mode);
    cfg.policy.tdm_slice = keep.tdm_slice;
    cfg.policy.sc_delayed = keep.sc_delayed;
  } else if (key == "mode")
    cfg.policy.mode = parse_mode(value);
  else if (key == "tdm.slice")
    cfg.policy.tdm_slice = to_uint(key, value, 1);
  else if (key == "sc.delayed") {
    cfg.policy.sc_delayed.clear();
    if (!value.empty())
      for (auto k : split(value, ','))
        cfg.policy.sc_delayed.insert(to_kind(key, k));
  } else if (key == "port_owner_init") {
    if (value == "0")
      cfg.owner_init = OwnerInit::Thread0;
    else if (value == "1")
      cfg.owner_init = OwnerInit::Thread1;
    else if (value == "alternate")
      cfg.owner_init = OwnerInit::Alternate;
    else
      throw ConfigError(fmt::format("port_owner_init: expected 0|1|alternate, got '{}'", value));
  } else if (key.starts_with("lat.")) {
    auto kind = to_kind(key, key.substr(4));
    cfg.latency[kind] = to_uint(key, value, 1);
  } else if (key == "max_cycles")
    cfg.max_cycles = to_uint(key, value, 1);
  else
    throw ConfigError(fmt::format("unknown config key '{}'", key));
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base)
{
  std::size_t lineno = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("config line {}: {}", lineno, e.what()));
    }
  }
  return base;
}

} // namespace specwands
