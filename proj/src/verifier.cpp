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

#include "specwands/verifier.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include <fmt/core.h>

namespace specwands
{

std::string_view to_string(VerifierModel m)
{
  switch (m) {
  case VerifierModel::SpecWands:
    return "specwands";
  case VerifierModel::Fcfs:
    return "fcfs";
  case VerifierModel::NoClear:
    return "noclear";
  }
  return "?";
}

VerifierModel parse_verifier_model(std::string_view s)
{
  for (auto m : {VerifierModel::SpecWands, VerifierModel::Fcfs, VerifierModel::NoClear})
    if (to_string(m) == s)
      return m;
  throw VerifierError(fmt::format("model: expected specwands|fcfs|noclear, got '{}'", s));
}

Bounds parse_bounds(std::string_view s)
{
  auto comma = s.find(',');
  auto num = [&](std::string_view v) {
    std::uint32_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (v.empty() || ec != std::errc{} || p != v.data() + v.size())
      throw VerifierError(fmt::format("bounds: expected i,j, got '{}'", s));
    return n;
  };
  if (comma == std::string_view::npos)
    throw VerifierError(fmt::format("bounds: expected i,j, got '{}'", s));
  return {num(s.substr(0, comma)), num(s.substr(comma + 1))};
}

std::string_view to_string(Action a)
{
  switch (a) {
  case Action::L6:
    return "L6";
  case Action::LA0:
    return "LA0";
  case Action::LR0:
    return "LR0";
  case Action::LA1:
    return "LA1";
  case Action::LR1:
    return "LR1";
  case Action::L13:
    return "L13";
  }
  return "?";
}

std::string format_trace(const DelayTrace& t)
{
  std::string out;
  for (bool d : t)
    out += d ? 'D' : '-';
  return out.empty() ? "(empty)" : out;
}

namespace
{

std::uint32_t sender_period(bool secret) { return secret ? 3 : 1; }

std::string describe(const ModelState& s)
{
  return fmt::format("secret={} owner={} status={} pc=({},{}) ra1={} rb1={} delays={}", s.secret ? 1 : 0,
                     s.port_owner, s.port_status ? 1 : 0, s.pc0, s.pc1, s.ra1 ? 1 : 0, s.rb1 ? 1 : 0,
                     format_trace(s.delays));
}

bool acquire(ModelState& s, std::uint8_t tid, bool ns, VerifierModel m)
{
  if (m == VerifierModel::Fcfs) {
    if (s.port_status)
      return false;
    s.port_owner = tid;
    s.port_status = true;
    return true;
  }
  if (s.port_owner == tid || (ns && !s.port_status)) {
    s.port_owner = tid;
    s.port_status = ns;
    return true;
  }
  return false;
}

bool release(ModelState& s, std::uint8_t tid, VerifierModel m)
{
  bool ok = s.port_owner == tid;
  if (m != VerifierModel::NoClear)
    s.port_status = false;
  return ok;
}

} // namespace

ModelState initial_state(bool secret)
{
  ModelState s;
  s.secret = secret;
  return s;
}

std::vector<Action> enabled(const ModelState& s, Bounds b)
{
  std::vector<Action> out;
  const auto p0 = sender_period(s.secret);
  if (s.pc0 < b.sender * p0) {
    static constexpr Action seq[] = {Action::L6, Action::LA0, Action::LR0};
    out.push_back(seq[s.pc0 % p0]);
  }
  if (s.pc1 < b.receiver * 3) {
    static constexpr Action seq[] = {Action::LA1, Action::LR1, Action::L13};
    out.push_back(seq[s.pc1 % 3]);
  }
  return out;
}

ModelState step(const ModelState& s, Action a, VerifierModel m, Bounds b)
{
  auto en = enabled(s, b);
  if (std::find(en.begin(), en.end(), a) == en.end())
    throw VerifierError(fmt::format("action {} not enabled at {}", to_string(a), describe(s)));

  ModelState n = s;
  switch (a) {
  case Action::L6:
    break;
  case Action::LA0:
    n.ra0 = acquire(n, 0, false, m);
    break;
  case Action::LR0:
    n.rb0 = release(n, 0, m);
    break;
  case Action::LA1:
    n.ra1 = acquire(n, 1, true, m);
    break;
  case Action::LR1:
    n.rb1 = release(n, 1, m);
    break;
  case Action::L13:
    n.delays.push_back(!(n.ra1 && n.rb1));
    break;
  }
  if (a == Action::L6 || a == Action::LA0 || a == Action::LR0)
    ++n.pc0;
  else
    ++n.pc1;
  return n;
}

std::uint64_t interleaving_count(bool secret, Bounds b)
{
  std::uint64_t a = std::uint64_t{b.sender} * sender_period(secret);
  std::uint64_t r = std::uint64_t{b.receiver} * 3;
  // C(a + r, a), multiplicative form stays exact
  std::uint64_t c = 1;
  for (std::uint64_t k = 1; k <= a; ++k)
    c = c * (r + k) / k;
  return c;
}

namespace
{

struct Walker {
  VerifierModel model;
  Bounds bounds;
  std::uint64_t cap;
  std::map<ModelState, std::uint64_t> memo; // state -> schedules below it
  Enumeration out;

  std::uint64_t visit(const ModelState& s)
  {
    if (auto it = memo.find(s); it != memo.end())
      return it->second;
    if (memo.size() >= cap)
      throw VerifierError(fmt::format("state space exceeds cap of {} states at bounds ({},{})", cap,
                                      bounds.sender, bounds.receiver));
    memo.emplace(s, 0);

    auto en = enabled(s, bounds);
    std::uint64_t paths = 0;
    if (en.empty()) {
      out.traces.insert(s.delays);
      paths = 1;
    }
    for (auto a : en) {
      if (a == Action::LA1)
        out.owner_at_acquire[s.pc1 / 3].insert(s.port_owner);
      paths += visit(step(s, a, model, bounds));
    }
    memo[s] = paths;
    return paths;
  }
};

} // namespace

Enumeration enumerate(VerifierModel m, bool secret, Bounds b, std::uint64_t state_cap)
{
  Walker w{m, b, state_cap, {}, {}};
  w.out.interleavings = w.visit(initial_state(secret));
  w.out.states = w.memo.size();
  return std::move(w.out);
}

bool InvariantReport::all_hold() const
{
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.holds; });
}

const PropertyResult& InvariantReport::at(std::string_view name) const
{
  for (const auto& p : properties)
    if (p.name == name)
      return p;
  throw VerifierError(fmt::format("no property named {}", name));
}

InvariantReport check_invariants(VerifierModel m, Bounds b, std::uint64_t state_cap)
{
  InvariantReport r;
  for (auto name : {"P1", "P2", "P3", "P4", "P5", "P9"}) {
    PropertyResult p;
    p.name = name;
    r.properties.push_back(std::move(p));
  }
  auto check = [&](std::size_t i, bool ok, const ModelState& s, Action a, const ModelState& n) {
    auto& p = r.properties[i];
    ++p.checked;
    if (!ok && p.holds) {
      p.holds = false;
      p.witness = fmt::format("{} --{}--> {}", describe(s), to_string(a), describe(n));
    }
  };

  std::array<Enumeration, 2> runs;
  for (bool secret : {false, true}) {
    runs[secret] = enumerate(m, secret, b, state_cap);

    // revisit every reachable transition
    std::set<ModelState> seen;
    std::vector<ModelState> todo{initial_state(secret)};
    while (!todo.empty()) {
      auto s = todo.back();
      todo.pop_back();
      if (!seen.insert(s).second)
        continue;
      for (auto a : enabled(s, b)) {
        auto n = step(s, a, m, b);
        if (a == Action::LA0 || a == Action::LA1) {
          const std::uint8_t tid = a == Action::LA1;
          const bool ns = tid == 1;
          const bool ra = tid ? n.ra1 : n.ra0;
          bool keeps = s.port_owner == tid || !ns || s.port_status;
          check(0, keeps == (n.port_owner == s.port_owner), s, a, n);
          check(1, !(s.port_owner != tid && (!ns || s.port_status)) || n.port_status == s.port_status, s, a, n);
          check(2, (s.port_owner == tid || (ns && !s.port_status)) == ra, s, a, n);
        } else if (a == Action::LR0 || a == Action::LR1) {
          const std::uint8_t tid = a == Action::LR1;
          const bool rb = tid ? n.rb1 : n.rb0;
          check(3, (s.port_owner == tid) == rb && !n.port_status, s, a, n);
        } else if (a == Action::L13) {
          check(4, (s.ra1 && s.rb1) == !n.delays.back(), s, a, n);
        }
        todo.push_back(std::move(n));
      }
    }
  }

  // P9: what the receiver meets at each acquire must not depend on the secret
  auto& p9 = r.properties[5];
  for (std::uint32_t j = 0; j < b.receiver; ++j) {
    ++p9.checked;
    const auto& o0 = runs[0].owner_at_acquire[j];
    const auto& o1 = runs[1].owner_at_acquire[j];
    if (o0 != o1 && p9.holds) {
      p9.holds = false;
      for (bool secret : {false, true})
        for (auto o : runs[secret].owner_at_acquire[j])
          if (!runs[!secret].owner_at_acquire[j].contains(o) && p9.witness.empty())
            p9.witness = fmt::format("receiver acquire #{} sees port owner {} only when secret={}", j, o,
                                     secret ? 1 : 0);
    }
  }
  return r;
}

SniResult check_sni(VerifierModel m, Bounds b, std::uint64_t state_cap)
{
  auto e0 = enumerate(m, false, b, state_cap);
  auto e1 = enumerate(m, true, b, state_cap);
  SniResult r;
  if (e0.traces == e1.traces)
    return r;
  r.holds = false;
  for (const auto& t : e1.traces)
    if (!e0.traces.contains(t)) {
      r.witness = t;
      r.witness_secret = true;
      return r;
    }
  for (const auto& t : e0.traces)
    if (!e1.traces.contains(t)) {
      r.witness = t;
      r.witness_secret = false;
      return r;
    }
  return r;
}

} // namespace specwands
