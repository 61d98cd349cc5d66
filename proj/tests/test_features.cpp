// Copyright 2026 The LOA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "loa/features.hpp"
#include "oracles.hpp"

namespace loa {
namespace {

constexpr double kDt = 0.05;

TEST(Sparc, MatchesDenseGrid) {
  Rng rng(21);
  const FeatureConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 16 + rng.below(100);
    const auto v = oracle::band_limited_profile(rng, n, kDt);
    const auto got = sparc(v, kDt, cfg);
    const auto want = oracle::sparc_dense(v, kDt, cfg);
    ASSERT_TRUE(got && want);
    EXPECT_NEAR(*got, *want, 1e-3) << "trial " << trial << " n " << n;
  }
}

TEST(Sparc, ScaleInvariant) {
  Rng rng(22);
  const FeatureConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    auto v = oracle::band_limited_profile(rng, 40, kDt);
    const double base = *sparc(v, kDt, cfg);
    for (double& x : v) x *= 3.0;
    EXPECT_NEAR(*sparc(v, kDt, cfg), base, 1e-9);
  }
}

TEST(Sparc, SmootherIsCloserToZero) {
  const FeatureConfig cfg;
  std::vector<double> bell(40), jerky(40);
  for (int i = 0; i < 40; ++i) {
    const double s = i / 39.0;
    bell[i] = std::sin(std::numbers::pi * s) + 0.05;
    jerky[i] = bell[i] * (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * 6.0 * s));
  }
  EXPECT_GT(*sparc(bell, kDt, cfg), *sparc(jerky, kDt, cfg));
  EXPECT_LT(*sparc(bell, kDt, cfg), -1.0);
}

TEST(Sparc, ZeroSignalIsMissing) {
  const std::vector<double> zero(40, 0.0);
  EXPECT_FALSE(sparc(zero, kDt, FeatureConfig{}).has_value());
  EXPECT_THROW(sparc(std::vector<double>(4, 1.0), kDt, FeatureConfig{}), Error);
}

TEST(InputFrequency, MeanOfInverseGaps) {
  const std::vector<double> t = {0.0, 0.5, 1.0, 1.25};
  EXPECT_DOUBLE_EQ(*mean_event_rate(t, 10), (2.0 + 2.0 + 4.0) / 3.0);
  EXPECT_DOUBLE_EQ(*mean_event_rate(t, 1), 4.0);
  EXPECT_FALSE(mean_event_rate(std::vector<double>{1.0}, 10).has_value());
  FeatureConfig cfg;
  cfg.beta = 0.3;
  EXPECT_DOUBLE_EQ(input_frequency(t, 1.0, cfg), 0.3 * 8.0 / 3.0 + 0.7);
  EXPECT_DOUBLE_EQ(input_frequency(std::vector<double>{}, 1.5, cfg), 1.5);
}

TEST(InputEvents, DeadzoneExitAndSignFlip) {
  InputEventDetector d(0.05);
  EXPECT_FALSE(d.update(0.0, 0.0));
  EXPECT_TRUE(d.update(0.2, 0.0));
  EXPECT_FALSE(d.update(0.3, 0.0));
  EXPECT_TRUE(d.update(-0.3, 0.0));
  EXPECT_FALSE(d.update(-0.3, 0.0));
}

TEST(Agreement, IdenticalCommandsAgree) {
  const AgreementSample s{{0.5, 0.2}, {0.5, 0.2}, Pose{1, 2, 0.3}};
  const std::vector<AgreementSample> h(5, s);
  EXPECT_EQ(complex_agreement(h, FeatureConfig{}), 0.0);
  EXPECT_EQ(simple_agreement(h, FeatureConfig{}), 0.0);
}

TEST(Agreement, StraightProjectionsDivergeLinearly) {
  // Same heading, speeds 1.0 and 0.5 over 2 s: the endpoints are 1 m apart.
  const AgreementSample s{{1.0, 0.0}, {0.5, 0.0}, Pose{}};
  const std::vector<AgreementSample> h = {s};
  EXPECT_NEAR(complex_agreement(h, FeatureConfig{}), 1.0, 1e-12);
  EXPECT_NEAR(simple_agreement(h, FeatureConfig{}), 0.5, 1e-12);
}

TEST(Agreement, RigidMotionInvariant) {
  Rng rng(23);
  const FeatureConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const VelocityCommand uh{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const VelocityCommand ur{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<AgreementSample> a = {{uh, ur, Pose{}}};
    const std::vector<AgreementSample> b = {{uh, ur, Pose{rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-3, 3)}}};
    EXPECT_NEAR(complex_agreement(a, cfg), complex_agreement(b, cfg), 1e-9);
  }
}

TEST(Agreement, UsesLastNSamples) {
  FeatureConfig cfg;
  cfg.agreement_n = 2;
  const std::vector<AgreementSample> h = {{{1, 0}, {0, 0}, {}}, {{0.2, 0}, {0, 0}, {}}, {{0.4, 0}, {0, 0}, {}}};
  EXPECT_NEAR(simple_agreement(h, cfg), 0.3, 1e-12);
}

TEST(ObstacleDistance, Clamped) {
  const FeatureConfig cfg;
  EXPECT_EQ(clamp_obstacle_distance(0.1, cfg), 0.5);
  EXPECT_EQ(clamp_obstacle_distance(1.7, cfg), 1.7);
  EXPECT_EQ(clamp_obstacle_distance(9.0, cfg), 3.0);
}

TEST(Extractor, WarmupIsWindowMinusOne) {
  const FeatureConfig cfg;
  std::vector<TickRecord> log(100);
  for (std::size_t i = 0; i < log.size(); ++i) {
    log[i].t = kDt * i;
    log[i].j_y = 0.5 + 0.1 * std::sin(0.3 * i);
    log[i].u_h = {log[i].j_y, 0.0};
    log[i].d_min = 1.0;
  }
  const auto f = extract_features(log, cfg, kDt);
  FeatureExtractor probe(cfg, kDt);
  EXPECT_EQ(probe.warmup_ticks(), 39);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(f[i].complete, i >= 39) << i;
  EXPECT_TRUE(f[39].smoothness.has_value());
}

TEST(Extractor, FrequencyDecaysWhenIdle) {
  const FeatureConfig cfg;
  FeatureExtractor ex(cfg, kDt);
  double peak = 0.0;
  for (int i = 0; i < 60; ++i) {
    TickRecord r;
    r.t = kDt * i;
    r.j_x = (i % 4 < 2) ? 0.5 : -0.5;
    peak = ex.push(r).input_frequency;
  }
  EXPECT_GT(peak, 1.0);
  double last = peak;
  for (int i = 60; i < 200; ++i) {
    TickRecord r;
    r.t = kDt * i;
    const double f = ex.push(r).input_frequency;
    EXPECT_LE(f, last * (1.0 + 1e-9));
    last = f;
  }
  EXPECT_LT(last, 1e-6);
}

TEST(Extractor, Deterministic) {
  Rng rng(24);
  std::vector<TickRecord> log(300);
  for (std::size_t i = 0; i < log.size(); ++i) {
    log[i].t = kDt * i;
    log[i].j_x = rng.uniform(-1, 1);
    log[i].j_y = rng.uniform(-1, 1);
    log[i].u_h = {log[i].j_y, -log[i].j_x};
    log[i].u_r = {0.6, 0.1};
    log[i].d_min = rng.uniform(0.2, 4);
  }
  EXPECT_EQ(extract_features(log, FeatureConfig{}, kDt), extract_features(log, FeatureConfig{}, kDt));
}

TEST(FeatureConfig, Validation) {
  FeatureConfig c;
  c.beta = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = FeatureConfig{};
  c.d_clamp_high = 0.1;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace loa
