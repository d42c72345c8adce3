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

#ifndef SPECWANDS_HARNESS_HPP
#define SPECWANDS_HARNESS_HPP

// Covert-channel workloads and their measurement.
//
// Every generated workload separates bits with a Sync pair. The receiver's
// latency for bit k is the cycle its op labelled `rx<k>` completed minus the
// cycle the k-th Sync committed.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "specwands/config.hpp"
#include "specwands/pipeline.hpp"
#include "specwands/workload.hpp"

namespace specwands
{

using Secret = std::vector<bool>;

/// Bits drawn from std::mt19937_64(seed), one output per bit, low bit taken.
Secret random_secret(std::size_t bits, std::uint64_t seed);
std::string to_string(const Secret& s);
Secret parse_secret(std::string_view bits);

/// SMT port contention. T0 (sender) squashes `div_burst` divs, or Nops for a 0 bit, under a
/// mispredicted branch; T1 (receiver) times one dependent div per bit.
Workload gen_inter_sca(const Secret& secret, std::uint32_t div_burst = 4,
                       Cycle resolve_latency = kDefaultResolveLatency);

/// Same-thread contention. The receiver div sits early in program order but waits on a load;
/// the sender div behind a second, mispredicted branch only exists for a 1 bit. T1 only syncs.
Workload gen_intra_sca(const Secret& secret, Cycle resolve_latency = kDefaultResolveLatency,
                       Cycle load_latency = 4);

/// Both threads: per iteration a correctly predicted branch (depending on the previous
/// iteration's div) followed by a div.
Workload gen_loop_div(std::uint32_t iterations, Cycle resolve_latency = kDefaultResolveLatency);

/// Machine used for the loop-div grouping experiment: two branch ports and eight div ports,
/// ownership alternating between threads.
PipelineConfig grouping_config(PipelineConfig base = {});

struct ChannelTrial {
  Secret secret;
  std::vector<Cycle> latency; ///< per bit
  PolicyKind policy;
};

struct ChannelReport {
  Cycle threshold = 0; ///< latencies above it decode as the slower bit value
  double error_rate = 0.5;
  bool distributions_identical = false;
};

class HarnessError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Runs `w` and extracts per-bit receiver latencies, timing against `timer_tid`'s Syncs.
ChannelTrial run_channel(const Workload& w, const Secret& secret, const PipelineConfig& cfg,
                         ThreadId timer_tid, SimMetrics* metrics = nullptr);

/// Picks the threshold (and polarity) minimizing the balanced error rate, i.e. the mean of the
/// per-class misclassification rates. Identical conditional distributions give exactly 0.5.
ChannelReport measure_error_rate(const ChannelTrial& trial);

} // namespace specwands

#endif
