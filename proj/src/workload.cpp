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

#include "specwands/workload.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <fmt/core.h>

namespace specwands
{

OpClass op_class(OpKind kind)
{
  switch (kind) {
  case OpKind::IntAlu:
    return {kind, 1, true, 0};
  case OpKind::IntDiv:
    return {kind, kDefaultDivLatency, false, 1};
  case OpKind::Load:
    return {kind, 4, true, 2};
  case OpKind::Branch:
    return {kind, 1, true, 3};
  case OpKind::Sync:
    return {kind, 1, true, -1};
  case OpKind::Nop:
    return {kind, 1, true, -1};
  }
  return {};
}

bool needs_port(OpKind kind) { return op_class(kind).port_group >= 0; }

std::string_view to_string(OpKind kind)
{
  switch (kind) {
  case OpKind::IntAlu:
    return "alu";
  case OpKind::IntDiv:
    return "div";
  case OpKind::Load:
    return "load";
  case OpKind::Branch:
    return "br";
  case OpKind::Sync:
    return "sync";
  case OpKind::Nop:
    return "nop";
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view token)
{
  for (auto k : kAllOpKinds)
    if (to_string(k) == token)
      return k;
  if (token == "ld")
    return OpKind::Load;
  if (token == "branch")
    return OpKind::Branch;
  if (token == "intdiv")
    return OpKind::IntDiv;
  if (token == "intalu")
    return OpKind::IntAlu;
  return std::nullopt;
}

TraceError::TraceError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line)
{
}

Instruction& append(Workload& w, ThreadId tid, OpKind op)
{
  auto& stream = w.threads.at(tid);
  Instruction ins;
  ins.seq = static_cast<Seq>(stream.size());
  ins.tid = tid;
  ins.op = op;
  if (op == OpKind::Branch)
    ins.branch = BranchMeta{};
  return stream.emplace_back(std::move(ins));
}

namespace
{

struct Violation {
  ThreadId tid;
  Seq seq;
  std::string message;
};

std::vector<Violation> collect_violations(const Workload& w)
{
  std::vector<Violation> out;
  std::set<std::string> labels;

  for (std::size_t t = 0; t < kNumThreads; ++t) {
    const auto& stream = w.threads[t];
    const auto tid = static_cast<ThreadId>(t);

    // Wrong-path membership: window_of[i] = seq of the mispredicted branch whose window holds i.
    std::vector<std::optional<Seq>> window_of(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const auto& ins = stream[i];
      if (ins.op != OpKind::Branch || !ins.branch || ins.branch->outcome != BranchOutcome::Mispredict)
        continue;
      auto end = std::min(stream.size(), i + 1 + ins.branch->squash_count);
      for (auto j = i + 1; j < end; ++j)
        if (!window_of[j])
          window_of[j] = static_cast<Seq>(i);
    }

    for (std::size_t i = 0; i < stream.size(); ++i) {
      const auto& ins = stream[i];
      auto bad = [&](std::string msg) { out.push_back({tid, static_cast<Seq>(i), std::move(msg)}); };

      if (ins.tid != tid)
        bad(fmt::format("tid {} outside its stream T{} at seq {}", int(ins.tid), t, i));
      if (ins.seq != i)
        bad(fmt::format("non-dense seq {} at T{} position {}", ins.seq, t, i));

      for (auto d : ins.deps) {
        if (d >= ins.seq)
          bad(fmt::format("dangling dependency on seq {} at T{} seq {}", d, t, i));
        else if (window_of[d] && window_of[d] != window_of[i])
          bad(fmt::format("dependency on wrong-path seq {} at T{} seq {}", d, t, i));
      }

      if (ins.op == OpKind::Branch) {
        if (!ins.branch) {
          bad(fmt::format("branch without branch metadata at T{} seq {}", t, i));
        } else {
          const auto& m = *ins.branch;
          if (m.resolve_latency < 1)
            bad(fmt::format("resolve latency < 1 at T{} seq {}", t, i));
          if (m.outcome == BranchOutcome::CorrectPredict && m.squash_count != 0)
            bad(fmt::format("squash count on correctly predicted branch at T{} seq {}", t, i));
          if (m.squash_count > stream.size() - 1 - i)
            bad(fmt::format("squash window past end of stream at T{} seq {}", t, i));
        }
      } else if (ins.branch) {
        bad(fmt::format("branch metadata on non-branch at T{} seq {}", t, i));
      }

      if (ins.op == OpKind::Sync && window_of[i])
        bad(fmt::format("Sync on a wrong path at T{} seq {}", t, i));
      if (ins.faulting && !window_of[i])
        bad(fmt::format("faulting instruction outside a wrong path at T{} seq {}", t, i));
      if (ins.latency_override && *ins.latency_override < 1)
        bad(fmt::format("latency < 1 at T{} seq {}", t, i));
      if ((ins.op == OpKind::Sync || ins.op == OpKind::Nop) && ins.latency_override && *ins.latency_override != 1)
        bad(fmt::format("latency override on {} at T{} seq {}", to_string(ins.op), t, i));
      if (!ins.label.empty() && !labels.insert(ins.label).second)
        bad(fmt::format("duplicate label '{}' at T{} seq {}", ins.label, t, i));
    }
  }

  // Sync barriers match positionally across the two streams.
  std::array<std::vector<Seq>, kNumThreads> syncs;
  for (std::size_t t = 0; t < kNumThreads; ++t)
    for (const auto& ins : w.threads[t])
      if (ins.op == OpKind::Sync)
        syncs[t].push_back(ins.seq);
  for (std::size_t t = 0; t < kNumThreads; ++t) {
    const auto& other = syncs[1 - t];
    for (std::size_t k = other.size(); k < syncs[t].size(); ++k)
      out.push_back({static_cast<ThreadId>(t), syncs[t][k], fmt::format("unmatched Sync at T{} seq {}", t, syncs[t][k])});
  }
  return out;
}

bool parse_uint(std::string_view s, std::uint64_t& v)
{
  if (s.empty())
    return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::string_view trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::string> validate(const Workload& w)
{
  std::vector<std::string> out;
  for (auto& v : collect_violations(w))
    out.push_back(std::move(v.message));
  return out;
}

Workload parse_trace(std::string_view text, std::string name)
{
  Workload w;
  w.name = std::move(name);
  std::array<std::vector<std::size_t>, kNumThreads> lines;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      auto comment = trim(raw.substr(hash + 1));
      constexpr std::string_view kNameTag = "workload:";
      if (comment.starts_with(kNameTag))
        w.name = std::string(trim(comment.substr(kNameTag.size())));
      raw = raw.substr(0, hash);
    }
    auto line = trim(raw);
    if (line.empty())
      continue;

    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i < line.size();) {
      auto b = line.find_first_not_of(" \t", i);
      if (b == std::string_view::npos)
        break;
      auto e = line.find_first_of(" \t", b);
      if (e == std::string_view::npos)
        e = line.size();
      tokens.push_back(line.substr(b, e - b));
      i = e;
    }

    // "T0:" or "T0: div" or "T0:div"
    auto head = tokens.front();
    if (head.size() < 3 || head[0] != 'T')
      throw TraceError(lineno, fmt::format("expected 'T<tid>:' at start of line, got '{}'", head));
    auto colon = head.find(':');
    if (colon == std::string_view::npos)
      throw TraceError(lineno, "missing ':' after thread id");
    std::uint64_t tid = 0;
    if (!parse_uint(head.substr(1, colon - 1), tid))
      throw TraceError(lineno, fmt::format("bad thread id '{}'", head.substr(1, colon - 1)));
    if (tid >= kNumThreads)
      throw TraceError(lineno, fmt::format("tid {} outside {{0,1}}", tid));

    std::size_t next = 1;
    std::string_view op_tok = head.substr(colon + 1);
    if (op_tok.empty()) {
      if (tokens.size() < 2)
        throw TraceError(lineno, "missing op");
      op_tok = tokens[next++];
    }
    auto kind = parse_op_kind(op_tok);
    if (!kind)
      throw TraceError(lineno, fmt::format("unknown op '{}'", op_tok));

    auto& ins = append(w, static_cast<ThreadId>(tid), *kind);
    lines[tid].push_back(lineno);

    for (; next < tokens.size(); ++next) {
      auto tok = tokens[next];
      if (tok == "faulting") {
        ins.faulting = true;
        continue;
      }
      auto eq = tok.find('=');
      if (eq == std::string_view::npos)
        throw TraceError(lineno, fmt::format("expected key=value, got '{}'", tok));
      auto key = tok.substr(0, eq);
      auto val = tok.substr(eq + 1);
      std::uint64_t n = 0;

      if (key == "lat") {
        if (!parse_uint(val, n) || n == 0)
          throw TraceError(lineno, fmt::format("bad latency '{}'", val));
        ins.latency_override = n;
      } else if (key == "deps") {
        std::size_t i = 0;
        while (i <= val.size()) {
          auto c = val.find(',', i);
          auto item = val.substr(i, c == std::string_view::npos ? std::string_view::npos : c - i);
          if (!parse_uint(item, n))
            throw TraceError(lineno, fmt::format("bad dependency list '{}'", val));
          if (n >= ins.seq)
            throw TraceError(lineno, fmt::format("dangling dependency on seq {} (own seq {})", n, ins.seq));
          ins.deps.push_back(static_cast<Seq>(n));
          i = c == std::string_view::npos ? val.size() + 1 : c + 1;
        }
      } else if (key == "resolve" || key == "outcome" || key == "squash") {
        if (*kind != OpKind::Branch)
          throw TraceError(lineno, fmt::format("'{}' only applies to branches", key));
        if (key == "outcome") {
          if (val == "ok")
            ins.branch->outcome = BranchOutcome::CorrectPredict;
          else if (val == "miss")
            ins.branch->outcome = BranchOutcome::Mispredict;
          else
            throw TraceError(lineno, fmt::format("bad outcome '{}'", val));
        } else {
          if (!parse_uint(val, n))
            throw TraceError(lineno, fmt::format("bad {} '{}'", key, val));
          if (key == "resolve")
            ins.branch->resolve_latency = n;
          else
            ins.branch->squash_count = static_cast<std::uint32_t>(n);
        }
      } else if (key == "label") {
        if (val.empty())
          throw TraceError(lineno, "empty label");
        ins.label = std::string(val);
      } else {
        throw TraceError(lineno, fmt::format("unknown key '{}'", key));
      }
    }
  }

  auto violations = collect_violations(w);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::size_t at = v.seq < lines[v.tid].size() ? lines[v.tid][v.seq] : 0;
    throw TraceError(at, v.message);
  }
  return w;
}

std::string emit_trace(const Workload& w)
{
  std::ostringstream os;
  os << "# workload: " << w.name << '\n';
  for (std::size_t t = 0; t < kNumThreads; ++t) {
    for (const auto& ins : w.threads[t]) {
      os << 'T' << t << ": " << to_string(ins.op);
      if (ins.latency_override)
        os << " lat=" << *ins.latency_override;
      if (!ins.deps.empty()) {
        os << " deps=";
        for (std::size_t i = 0; i < ins.deps.size(); ++i)
          os << (i ? "," : "") << ins.deps[i];
      }
      if (ins.branch) {
        os << " resolve=" << ins.branch->resolve_latency
           << " outcome=" << (ins.branch->outcome == BranchOutcome::Mispredict ? "miss" : "ok")
           << " squash=" << ins.branch->squash_count;
      }
      if (!ins.label.empty())
        os << " label=" << ins.label;
      if (ins.faulting)
        os << " faulting";
      os << '\n';
    }
  }
  return os.str();
}

} // namespace specwands
