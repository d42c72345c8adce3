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

#ifndef SPECWANDS_WORKLOAD_HPP
#define SPECWANDS_WORKLOAD_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specwands
{

using Cycle = std::uint64_t;
using Seq = std::uint32_t;
using ThreadId = std::uint8_t;

inline constexpr std::size_t kNumThreads = 2;
inline constexpr Cycle kDefaultDivLatency = 12;
inline constexpr Cycle kDefaultResolveLatency = 20;

enum class OpKind : std::uint8_t { IntAlu, IntDiv, Load, Branch, Sync, Nop };

inline constexpr std::array<OpKind, 6> kAllOpKinds = {OpKind::IntAlu, OpKind::IntDiv, OpKind::Load,
                                                      OpKind::Branch, OpKind::Sync,   OpKind::Nop};

/// Static properties of an op class. Sync and Nop never touch a port.
struct OpClass {
  OpKind kind = OpKind::Nop;
  Cycle default_latency = 1;
  bool pipelined = true;
  int port_group = -1; ///< -1: needs no issue port
};

OpClass op_class(OpKind kind);
std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view token);
bool needs_port(OpKind kind);

enum class BranchOutcome : std::uint8_t { CorrectPredict, Mispredict };

struct BranchMeta {
  Cycle resolve_latency = kDefaultResolveLatency;
  BranchOutcome outcome = BranchOutcome::CorrectPredict;
  std::uint32_t squash_count = 0; ///< younger same-thread instructions on the wrong path

  friend bool operator==(const BranchMeta&, const BranchMeta&) = default;
};

struct Instruction {
  Seq seq = 0;
  ThreadId tid = 0;
  OpKind op = OpKind::Nop;
  std::optional<Cycle> latency_override;
  std::vector<Seq> deps;
  std::optional<BranchMeta> branch;
  std::string label;
  bool faulting = false; ///< raises an exception if it ever reaches the ROB head

  Cycle latency() const { return latency_override.value_or(op_class(op).default_latency); }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Workload {
  std::string name = "trace";
  std::array<std::vector<Instruction>, kNumThreads> threads;

  friend bool operator==(const Workload&, const Workload&) = default;
};

class TraceError : public std::runtime_error
{
public:
  TraceError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Parses the line-oriented trace format documented in docs/trace-format.md.
/// Throws TraceError on syntax errors and on any invariant violation.
Workload parse_trace(std::string_view text, std::string name = "trace");

/// Inverse of parse_trace for valid workloads.
std::string emit_trace(const Workload& w);

/// Every violated invariant, one message each. Empty iff the workload is well formed.
std::vector<std::string> validate(const Workload& w);

/// Appends an instruction to thread `tid`, assigning the next dense seq.
Instruction& append(Workload& w, ThreadId tid, OpKind op);

} // namespace specwands

#endif
