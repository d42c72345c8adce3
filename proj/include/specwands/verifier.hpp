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

#ifndef SPECWANDS_VERIFIER_HPP
#define SPECWANDS_VERIFIER_HPP

// Bounded interleaving checker for the two-thread acquire/release model.
//
// Sender (tid 0), per iteration:   L6, and for secret=1 also LA0, LR0 (its ops are speculative).
// Receiver (tid 1), per iteration: LA1, LR1, L13 (its op is non-speculative); L13 records
//                                  delay = !(ra1 && rb1).
// Every interleaving of the two action sequences is explored; acquire/release are atomic steps.
// port.status is true while a non-speculative op holds the port.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace specwands
{

enum class VerifierModel : std::uint8_t {
  SpecWands, ///< NOP + LOP acquire rule
  Fcfs,      ///< first come first served: acquire iff the port is not held
  NoClear,   ///< SpecWands with a release that forgets to clear port.status (seeded fault)
};
std::string_view to_string(VerifierModel m);
VerifierModel parse_verifier_model(std::string_view s);

struct Bounds {
  std::uint32_t sender = 3;
  std::uint32_t receiver = 3;
};
Bounds parse_bounds(std::string_view s); ///< "i,j"

enum class Action : std::uint8_t { L6, LA0, LR0, LA1, LR1, L13 };
std::string_view to_string(Action a);

struct ModelState {
  std::uint8_t port_owner = 0;
  bool port_status = false;
  bool secret = false;
  std::uint32_t pc0 = 0; ///< sender actions taken
  std::uint32_t pc1 = 0; ///< receiver actions taken
  bool ra0 = false, rb0 = false, ra1 = false, rb1 = false;
  std::vector<bool> delays;

  auto operator<=>(const ModelState&) const = default;
};

using DelayTrace = std::vector<bool>;

class VerifierError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultStateCap = 1'000'000;

ModelState initial_state(bool secret);
/// Actions enabled at `s` (at most one per thread).
std::vector<Action> enabled(const ModelState& s, Bounds b);
/// Throws VerifierError if `a` is not enabled.
ModelState step(const ModelState& s, Action a, VerifierModel m, Bounds b);

struct Enumeration {
  std::set<DelayTrace> traces;
  std::uint64_t states = 0;       ///< distinct states visited
  std::uint64_t interleavings = 0; ///< complete schedules, counted through the memo
  /// port owner values seen right before each receiver acquire, per receiver iteration
  std::map<std::uint32_t, std::set<std::uint8_t>> owner_at_acquire;
};

Enumeration enumerate(VerifierModel m, bool secret, Bounds b, std::uint64_t state_cap = kDefaultStateCap);

/// Number of schedules for the bounds, from the closed form C(a + r, a).
std::uint64_t interleaving_count(bool secret, Bounds b);

struct PropertyResult {
  std::string name;
  bool holds = true;
  std::uint64_t checked = 0;
  std::string witness; ///< first violating transition
};

struct InvariantReport {
  std::vector<PropertyResult> properties; ///< P1..P5, P9 in order
  bool all_hold() const;
  const PropertyResult& at(std::string_view name) const;
};

InvariantReport check_invariants(VerifierModel m, Bounds b, std::uint64_t state_cap = kDefaultStateCap);

struct SniResult {
  bool holds = true;
  std::optional<DelayTrace> witness;
  bool witness_secret = false; ///< secret value under which only the witness occurs
};

SniResult check_sni(VerifierModel m, Bounds b, std::uint64_t state_cap = kDefaultStateCap);

std::string format_trace(const DelayTrace& t);

} // namespace specwands

#endif
