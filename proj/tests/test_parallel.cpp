// The OpenMP paths must reproduce the serial reference bit for bit.

#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sleigh/analysis.hpp"
#include "sleigh/integrator.hpp"
#include "sleigh/parallel.hpp"

using namespace sleigh;

namespace {

class ParallelEquivalence : public ::testing::Test {
 protected:
  // More threads than cores still interleaves work on a single-core machine.
  void SetUp() override { set_thread_count(4); }
};

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_same(const VerificationReport& a, const VerificationReport& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.passed, b.passed);
  EXPECT_TRUE(same_bits(a.margin, b.margin)) << a.margin << " vs " << b.margin;
  EXPECT_EQ(a.detail, b.detail);
  ASSERT_EQ(a.witness.has_value(), b.witness.has_value());
  if (a.witness) {
    ASSERT_EQ(a.witness->values.size(), b.witness->values.size());
    for (std::size_t i = 0; i < a.witness->values.size(); ++i) {
      EXPECT_TRUE(same_bits(a.witness->values[i], b.witness->values[i]));
    }
  }
}

}  // namespace

TEST_F(ParallelEquivalence, ForEachIndexVisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  for_each_index(hits.size(), Execution::Parallel, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  for_each_index(0, Execution::Parallel, [&](std::size_t) { FAIL(); });
}

TEST_F(ParallelEquivalence, BatchSimulate) {
  const std::vector<QState> starts{
      QState{Vec3(-3, -2, M_PI / 8), Vec2::Zero()}, QState{Vec3(-3, 2, -M_PI / 8), Vec2::Zero()},
      QState{Vec3(-3, 2, 3 * M_PI / 4), Vec2::Zero()}, QState{Vec3(1, 1, 0), Vec2::Zero()},
      QState{Vec3(2, -3, -M_PI / 2), Vec2(0.5, -0.5)}};
  IntegratorConfig cfg;
  cfg.t_final = 10.0;
  const auto serial = batch_simulate(starts, oracle::paper_model(), oracle::paper_controller(), cfg, Execution::Serial);
  const auto parallel = batch_simulate(starts, oracle::paper_model(), oracle::paper_controller(), cfg, Execution::Parallel);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    ASSERT_EQ(serial[i].ok(), parallel[i].ok());
    if (!serial[i].ok()) {
      EXPECT_EQ(serial[i].error->kind(), parallel[i].error->kind());
      continue;
    }
    const auto& a = serial[i].trajectory->samples;
    const auto& b = parallel[i].trajectory->samples;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (int j = 0; j < 3; ++j) ASSERT_TRUE(same_bits(a[k].state.q[j], b[k].state.q[j]));
      ASSERT_TRUE(same_bits(a[k].H_d, b[k].H_d));
      ASSERT_TRUE(same_bits(a[k].u[1], b[k].u[1]));
    }
    EXPECT_EQ(serial[i].trajectory->stats.accepted, parallel[i].trajectory->stats.accepted);
  }
}

TEST_F(ParallelEquivalence, SchwarzSweep) {
  SchwarzSweepSpec spec;
  spec.functions = 300;
  spec.seed = 5;
  expect_same(schwarz_sweep(spec, Execution::Serial), schwarz_sweep(spec, Execution::Parallel));
}

TEST_F(ParallelEquivalence, ResidualSearch) {
  ResidualSearchSpec spec;
  spec.samples = 20000;
  spec.seed = 6;
  const Vec3 gains(2.0, 0.5, 0.8);
  expect_same(equilibrium_residual_search(gains, spec, Execution::Serial),
              equilibrium_residual_search(gains, spec, Execution::Parallel));
}

TEST_F(ParallelEquivalence, Matching) {
  MatchingSpec spec;
  spec.seed = 7;
  expect_same(check_matching(oracle::paper_model(), oracle::paper_controller(), spec, Execution::Serial),
              check_matching(oracle::paper_model(), oracle::paper_controller(), spec, Execution::Parallel));
  // Failing runs must also agree on the witness.
  const auto c = oracle::paper_controller();
  const auto mutated = c.with_singular_damping(0.2);
  expect_same(check_matching(oracle::paper_model(), c, mutated, spec, Execution::Serial),
              check_matching(oracle::paper_model(), c, mutated, spec, Execution::Parallel));
}
