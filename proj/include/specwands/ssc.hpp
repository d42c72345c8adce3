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

#ifndef SPECWANDS_SSC_HPP
#define SPECWANDS_SSC_HPP

// Speculative Status Checker.
//
// Tags every ROB entry of one hardware thread with (spec_flag, spec_degree).
// The reference definition is full_scan(): walk from the ROB head, counting
// unresolved branches. The hardware-style scan_step() only looks at `width`
// entries per call and keeps its progress in three registers; when a pass
// reaches the ROB tail it restarts right after the last entry known to be
// non-speculative, since that prefix can never become speculative again.
//
// Tags written by scan_step are always conservative: an entry is marked
// non-speculative only if it truly is, and a stale degree is never smaller
// than the true one.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "specwands/config.hpp"

namespace specwands
{

inline constexpr std::uint32_t kMaxSpecDegree = 127; // 7-bit field

/// The per-entry state the checker reads and the tags it writes.
struct SscEntry {
  bool unresolved_branch = false; ///< branch whose outcome is not known yet
  bool completed = false;         ///< finished executing (resolved, for branches)
  bool faulting = false;          ///< raises an exception at the ROB head
  bool spec_flag = true;
  std::uint8_t spec_degree = 0;
};

struct SpecTag {
  bool spec_flag = true;
  std::uint8_t spec_degree = 0;
  friend bool operator==(const SpecTag&, const SpecTag&) = default;
};

/// Progressive-scan state, one set per hardware thread.
struct SscRegisters {
  std::size_t last_pos = 0;              ///< next ROB index the current pass will look at
  std::ptrdiff_t last_ns = -1;           ///< last entry known non-speculative, -1 if none
  std::uint32_t spec_degree_counter = 0; ///< unresolved branches before last_pos in this pass
  bool blocked = false;                  ///< All mode: an incomplete or faulting entry precedes last_pos

  friend bool operator==(const SscRegisters&, const SscRegisters&) = default;
};

namespace detail
{

inline SpecTag tag_for(const SscEntry& e, std::uint32_t counter, bool blocked, Mode mode)
{
  const bool ns = mode == Mode::Spectre ? counter == 0 : (!blocked && !e.faulting);
  if (ns)
    return {false, 0};
  return {true, static_cast<std::uint8_t>(std::min(counter, kMaxSpecDegree))};
}

inline void advance(const SscEntry& e, std::uint32_t& counter, bool& blocked)
{
  if (e.unresolved_branch)
    ++counter;
  if (!e.completed || e.faulting)
    blocked = true;
}

template <class Rob>
const SscEntry& at(const Rob& rob, std::size_t i)
{
  return static_cast<const SscEntry&>(rob[i]);
}

template <class Rob>
SscEntry& at(Rob& rob, std::size_t i)
{
  return static_cast<SscEntry&>(rob[i]);
}

} // namespace detail

/// Reference tagging: scan from the head in one go. Used as the test oracle.
template <class Rob>
std::vector<SpecTag> full_scan(const Rob& rob, Mode mode)
{
  std::vector<SpecTag> tags;
  tags.reserve(rob.size());
  std::uint32_t counter = 0;
  bool blocked = false;
  for (std::size_t i = 0; i < rob.size(); ++i) {
    const auto& e = detail::at(rob, i);
    tags.push_back(detail::tag_for(e, counter, blocked, mode));
    detail::advance(e, counter, blocked);
  }
  return tags;
}

/// Scans at most `width` entries, continuing the current pass.
/// Returns true if any tag changed.
template <class Rob>
bool scan_step(Rob& rob, SscRegisters& regs, std::size_t width, Mode mode)
{
  if (rob.size() == 0)
    return false;
  bool changed = false;
  for (std::size_t k = 0; k < width; ++k) {
    if (regs.last_pos >= rob.size()) {
      // Pass finished. Restart after the settled non-speculative prefix.
      regs.spec_degree_counter = 0;
      regs.blocked = false;
      regs.last_pos = static_cast<std::size_t>(regs.last_ns + 1);
      if (regs.last_ns >= 0)
        detail::advance(detail::at(rob, static_cast<std::size_t>(regs.last_ns)), regs.spec_degree_counter, regs.blocked);
      if (regs.last_pos >= rob.size())
        break;
    }
    auto& e = detail::at(rob, regs.last_pos);
    auto tag = detail::tag_for(e, regs.spec_degree_counter, regs.blocked, mode);
    if (tag.spec_flag != e.spec_flag || tag.spec_degree != e.spec_degree) {
      e.spec_flag = tag.spec_flag;
      e.spec_degree = tag.spec_degree;
      changed = true;
    }
    if (!tag.spec_flag)
      regs.last_ns = static_cast<std::ptrdiff_t>(regs.last_pos);
    detail::advance(e, regs.spec_degree_counter, regs.blocked);
    ++regs.last_pos;
  }
  return changed;
}

/// Rebuilds the registers after a squash. `rob` already has the squashed entries removed,
/// so its last entry is the youngest unsquashed instruction.
template <class Rob>
void on_squash(const Rob& rob, SscRegisters& regs)
{
  if (rob.size() == 0) {
    regs = {};
    return;
  }
  const auto youngest = rob.size() - 1;
  const auto& e = detail::at(rob, youngest);
  regs.last_pos = youngest + 1;
  regs.spec_degree_counter = e.spec_degree + (e.unresolved_branch ? 1u : 0u);
  regs.blocked = e.spec_flag || !e.completed || e.faulting;
  if (!e.spec_flag)
    regs.last_ns = static_cast<std::ptrdiff_t>(youngest);
  else
    regs.last_ns = std::min(regs.last_ns, static_cast<std::ptrdiff_t>(youngest) - 1);
}

/// Shifts the registers after `count` entries retired from the ROB head.
inline void on_commit(SscRegisters& regs, std::size_t count)
{
  if (regs.last_pos <= count) {
    // whole pass retired
    regs = {};
    return;
  }
  regs.last_pos -= count;
  regs.last_ns = std::max<std::ptrdiff_t>(regs.last_ns - static_cast<std::ptrdiff_t>(count), -1);
}

} // namespace specwands

#endif
