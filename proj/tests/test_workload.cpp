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

#include <random>

#include <gtest/gtest.h>

#include "specwands/harness.hpp"
#include "specwands/workload.hpp"
#include "sim_util.hpp"

using namespace specwands;
using specwands::testing::random_workload;

namespace
{

std::string error_of(std::string_view text)
{
  try {
    parse_trace(text);
  } catch (const TraceError& e) {
    return e.what();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle)
{
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos)
      return true;
  return false;
}

} // namespace

TEST(Trace, SingleDivLine)
{
  auto w = parse_trace("T0: div");
  ASSERT_EQ(w.threads[0].size(), 1u);
  EXPECT_TRUE(w.threads[1].empty());
  const auto& d = w.threads[0][0];
  EXPECT_EQ(d.op, OpKind::IntDiv);
  EXPECT_EQ(d.latency(), 12u);
  EXPECT_TRUE(d.deps.empty());
  EXPECT_FALSE(op_class(OpKind::IntDiv).pipelined);
  EXPECT_TRUE(op_class(OpKind::IntAlu).pipelined);
  EXPECT_FALSE(needs_port(OpKind::Sync));
  EXPECT_FALSE(needs_port(OpKind::Nop));
}

TEST(Trace, FullSyntax)
{
  auto w = parse_trace(R"(# workload: demo
T0: alu
T0: ld lat=30          # load miss
T0: br resolve=7 outcome=miss squash=1
T0: div deps=0,1 label=x faulting
T1:sync
T0: sync
)");
  EXPECT_EQ(w.name, "demo");
  ASSERT_EQ(w.threads[0].size(), 5u);
  EXPECT_EQ(*w.threads[0][1].latency_override, 30u);
  const auto& br = *w.threads[0][2].branch;
  EXPECT_EQ(br.resolve_latency, 7u);
  EXPECT_EQ(br.outcome, BranchOutcome::Mispredict);
  EXPECT_EQ(br.squash_count, 1u);
  EXPECT_EQ(w.threads[0][3].deps, (std::vector<Seq>{0, 1}));
  EXPECT_EQ(w.threads[0][3].label, "x");
  EXPECT_TRUE(w.threads[0][3].faulting);
  EXPECT_EQ(w.threads[1][0].op, OpKind::Sync);
}

TEST(Trace, BranchDefaults)
{
  auto w = parse_trace("T1: br");
  const auto& m = *w.threads[1][0].branch;
  EXPECT_EQ(m.resolve_latency, 20u);
  EXPECT_EQ(m.outcome, BranchOutcome::CorrectPredict);
  EXPECT_EQ(m.squash_count, 0u);
}

TEST(Trace, DanglingDependency)
{
  auto e = error_of("T0: alu\nT0: div deps=5\n");
  EXPECT_NE(e.find("dangling dependency"), std::string::npos) << e;
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
}

TEST(Trace, SelfDependencyIsDangling)
{
  EXPECT_NE(error_of("T0: div deps=0").find("dangling dependency"), std::string::npos);
}

TEST(Trace, TidOutOfRange)
{
  auto e = error_of("T0: alu\nT2: alu\n");
  EXPECT_NE(e.find("tid 2 outside {0,1}"), std::string::npos) << e;
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
}

TEST(Trace, UnmatchedSync)
{
  auto e = error_of("T0: sync\nT0: alu\n");
  EXPECT_NE(e.find("unmatched Sync at T0 seq 0"), std::string::npos) << e;
}

TEST(Trace, SyntaxErrorsCarryLineNumbers)
{
  EXPECT_NE(error_of("\n\nX0: alu").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("T0: mul").find("unknown op 'mul'"), std::string::npos);
  EXPECT_NE(error_of("T0: alu lat=0").find("bad latency"), std::string::npos);
  EXPECT_NE(error_of("T0: alu resolve=3").find("only applies to branches"), std::string::npos);
  EXPECT_NE(error_of("T0: br outcome=maybe").find("bad outcome"), std::string::npos);
  EXPECT_NE(error_of("T0: alu colour=red").find("unknown key"), std::string::npos);
  EXPECT_NE(error_of("T0: br outcome=ok squash=2\nT0: alu\nT0: alu").find("squash count on correctly"),
            std::string::npos);
  EXPECT_NE(error_of("T0: br outcome=miss squash=3\nT0: alu").find("past end"), std::string::npos);
}

TEST(Validate, WellFormedIsEmpty)
{
  Workload w;
  append(w, 0, OpKind::Sync);
  append(w, 1, OpKind::Sync);
  append(w, 0, OpKind::IntAlu);
  auto& d = append(w, 0, OpKind::IntDiv);
  d.deps = {1};
  append(w, 1, OpKind::Branch);
  EXPECT_TRUE(validate(w).empty());
}

TEST(Validate, SyncOnlyInThreadZero)
{
  Workload w;
  append(w, 0, OpKind::IntAlu);
  append(w, 0, OpKind::Sync);
  auto v = validate(w);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "unmatched Sync at T0 seq 1");
}

TEST(Validate, BranchWithoutMetadataNamesSeq)
{
  Workload w;
  append(w, 1, OpKind::IntAlu);
  append(w, 1, OpKind::Branch).branch.reset();
  auto v = validate(w);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("T1 seq 1"), std::string::npos) << v[0];
  EXPECT_NE(v[0].find("branch without"), std::string::npos) << v[0];
}

TEST(Validate, ReportsEveryRule)
{
  Workload w;
  append(w, 0, OpKind::IntAlu).deps = {3};
  append(w, 0, OpKind::IntAlu).branch = BranchMeta{};
  append(w, 0, OpKind::IntAlu).faulting = true;
  append(w, 0, OpKind::Nop).latency_override = 4;
  append(w, 0, OpKind::IntAlu).label = "a";
  append(w, 1, OpKind::IntAlu).label = "a";
  append(w, 1, OpKind::Branch).branch = BranchMeta{0, BranchOutcome::Mispredict, 1};
  append(w, 1, OpKind::Sync);
  append(w, 0, OpKind::Sync);
  auto v = validate(w);
  EXPECT_TRUE(mentions(v, "dangling dependency"));
  EXPECT_TRUE(mentions(v, "branch metadata on non-branch"));
  EXPECT_TRUE(mentions(v, "faulting instruction outside"));
  EXPECT_TRUE(mentions(v, "latency override on nop"));
  EXPECT_TRUE(mentions(v, "duplicate label 'a'"));
  EXPECT_TRUE(mentions(v, "resolve latency < 1"));
  EXPECT_TRUE(mentions(v, "Sync on a wrong path"));
}

TEST(Validate, DependencyIntoWrongPathFromOutside)
{
  auto text = "T0: br outcome=miss squash=1\nT0: alu\nT0: alu deps=1\n";
  EXPECT_NE(error_of(text).find("wrong-path"), std::string::npos);
  EXPECT_TRUE(error_of("T0: br outcome=miss squash=2\nT0: alu\nT0: alu deps=1\n").empty());
}

TEST(RoundTrip, GeneratedInterSca)
{
  auto w = gen_inter_sca(random_secret(32, 5), 4, 20);
  ASSERT_TRUE(validate(w).empty());
  auto back = parse_trace(emit_trace(w));
  EXPECT_EQ(back, w);
}

TEST(RoundTrip, GeneratedIntraAndLoop)
{
  for (const auto& w : {gen_intra_sca(random_secret(16, 2)), gen_loop_div(8)}) {
    ASSERT_TRUE(validate(w).empty());
    EXPECT_EQ(parse_trace(emit_trace(w)), w);
  }
}

TEST(RoundTrip, RandomWorkloadsProperty)
{
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    auto w = random_workload(rng);
    ASSERT_TRUE(validate(w).empty()) << validate(w).front() << "\n" << emit_trace(w);
    auto text = emit_trace(w);
    auto back = parse_trace(text);
    ASSERT_EQ(back, w) << text;
    // accepted traces always validate clean
    EXPECT_TRUE(validate(back).empty());
  }
}
