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

#include <gtest/gtest.h>

#include "specwands/verifier.hpp"

using namespace specwands;

namespace
{

std::uint64_t binom(std::uint64_t n, std::uint64_t k)
{
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

} // namespace

TEST(Verifier, ParseBoundsAndModel)
{
  auto b = parse_bounds("2,5");
  EXPECT_EQ(b.sender, 2u);
  EXPECT_EQ(b.receiver, 5u);
  EXPECT_THROW(parse_bounds("2"), VerifierError);
  EXPECT_THROW(parse_bounds("a,b"), VerifierError);
  for (auto m : {VerifierModel::SpecWands, VerifierModel::Fcfs, VerifierModel::NoClear})
    EXPECT_EQ(parse_verifier_model(to_string(m)), m);
  EXPECT_THROW(parse_verifier_model("bogus"), VerifierError);
}

TEST(Verifier, StepRejectsDisabledAction)
{
  Bounds b{1, 1};
  auto s = initial_state(false);
  EXPECT_THROW(step(s, Action::LA0, VerifierModel::SpecWands, b), VerifierError);
  EXPECT_THROW(step(s, Action::LR1, VerifierModel::SpecWands, b), VerifierError);
  auto en = enabled(s, b);
  ASSERT_EQ(en.size(), 2u);
  auto t = step(s, Action::L6, VerifierModel::SpecWands, b);
  EXPECT_EQ(t.pc0, 1u);
  EXPECT_TRUE(enabled(t, b).size() == 1u);
}

TEST(Verifier, InterleavingCountMatchesBinomial)
{
  for (std::uint32_t i = 0; i <= 3; ++i)
    for (std::uint32_t j = 0; j <= 3; ++j)
      for (bool secret : {false, true}) {
        Bounds b{i, j};
        std::uint64_t a = secret ? 3 * i : i, r = 3 * j;
        EXPECT_EQ(interleaving_count(secret, b), binom(a + r, a));
        EXPECT_EQ(enumerate(VerifierModel::SpecWands, secret, b).interleavings, binom(a + r, a))
            << i << "," << j << " secret " << secret;
      }
}

TEST(Verifier, SpecWandsSatisfiesSni)
{
  for (std::uint32_t i = 1; i <= 3; ++i)
    for (std::uint32_t j = 1; j <= 3; ++j) {
      auto r = check_sni(VerifierModel::SpecWands, {i, j});
      EXPECT_TRUE(r.holds) << i << "," << j;
      EXPECT_FALSE(r.witness);
      auto t0 = enumerate(VerifierModel::SpecWands, false, {i, j}).traces;
      EXPECT_EQ(t0, enumerate(VerifierModel::SpecWands, true, {i, j}).traces);
      EXPECT_EQ(t0, std::set<DelayTrace>{DelayTrace(j, false)});
    }
}

TEST(Verifier, FcfsViolatesSniWithWitness)
{
  auto r = check_sni(VerifierModel::Fcfs, {1, 1});
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.witness_secret);
  EXPECT_EQ(*r.witness, DelayTrace{true});
  EXPECT_EQ(format_trace(*r.witness), "D");
  EXPECT_EQ(format_trace({false, true}), "-D");
  EXPECT_EQ(format_trace({}), "(empty)");
}

TEST(Verifier, InvariantsHoldForSpecWands)
{
  auto rep = check_invariants(VerifierModel::SpecWands, {3, 3});
  ASSERT_EQ(rep.properties.size(), 6u);
  const char* names[] = {"P1", "P2", "P3", "P4", "P5", "P9"};
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(rep.properties[k].name, names[k]);
    EXPECT_TRUE(rep.properties[k].holds) << names[k] << ": " << rep.properties[k].witness;
    EXPECT_GT(rep.properties[k].checked, 0u);
  }
  EXPECT_TRUE(rep.all_hold());
}

TEST(Verifier, SeededFaultsAreCaught)
{
  auto noclear = check_invariants(VerifierModel::NoClear, {2, 2});
  EXPECT_FALSE(noclear.at("P4").holds);
  EXPECT_FALSE(noclear.at("P4").witness.empty());
  EXPECT_FALSE(noclear.all_hold());

  auto fcfs = check_invariants(VerifierModel::Fcfs, {2, 2});
  EXPECT_FALSE(fcfs.all_hold());
}

TEST(Verifier, ReceiverAcquiresFromOwnOrFreePort)
{
  auto e = enumerate(VerifierModel::SpecWands, true, {2, 2});
  EXPECT_GT(e.states, 0u);
  for (const auto& [iter, owners] : e.owner_at_acquire)
    for (auto o : owners)
      EXPECT_LE(o, 1u) << iter;
}

TEST(Verifier, StateCapThrows) { EXPECT_THROW(enumerate(VerifierModel::SpecWands, true, {3, 3}, 4), VerifierError); }
