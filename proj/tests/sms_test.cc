// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acbo/sms.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "acbo/dcbo.h"

namespace acbo {
namespace {

// Two depots per region, regions 2 km apart.
SmsConfig TwoRegionLayout() {
  SmsConfig c;
  c.depots = {{0, 0.0, 0.0}, {1, 0.5, 0.0}, {2, 2.0, 0.0}, {3, 2.5, 0.0}};
  c.regions = {{0, 1}, {2, 3}};
  c.trucks = 2;
  c.bikes_per_truck = 3;
  c.service_radius = 0.3;
  return c;
}

Trip At(double x, double y, double ex, double ey, double t) { return {x, y, ex, ey, t}; }

TEST(SmsStep, ZeroDemandServesNothingAndKeepsBikes) {
  const SmsConfig c = TwoRegionLayout();
  const std::vector<int> alloc = {0, 2};
  const DayOutcome out = StepDay(c, alloc, DemandDay{});
  EXPECT_EQ(out.total_trips, 0);
  EXPECT_EQ(out.region_trips, (std::vector<int>{0, 0}));
  EXPECT_EQ(out.bikes_at_end, out.bikes_at_start);
  EXPECT_EQ(out.bikes_at_start, (std::vector<int>{3, 0, 3, 0}));
}

TEST(SmsStep, SingleTripMovesOneBike) {
  const SmsConfig c = TwoRegionLayout();
  DemandDay day;
  day.trips = {At(0.1, 0.0, 2.45, 0.1, 8.0)};
  const std::vector<int> alloc = {0, 0};
  const DayOutcome out = StepDay(c, alloc, day);
  EXPECT_EQ(out.total_trips, 1);
  EXPECT_EQ(out.region_trips, (std::vector<int>{1, 0}));
  EXPECT_EQ(out.bikes_at_end, (std::vector<int>{5, 0, 0, 1}));
}

TEST(SmsStep, TripOutsideRadiusIsLost) {
  const SmsConfig c = TwoRegionLayout();
  DemandDay day;
  day.trips = {At(1.0, 0.0, 0.0, 0.0, 1.0)};
  const std::vector<int> alloc = {0, 2};
  EXPECT_EQ(StepDay(c, alloc, day).total_trips, 0);
}

TEST(SmsStep, SimultaneousTripsCompeteForOneBike) {
  SmsConfig c = TwoRegionLayout();
  c.trucks = 1;
  c.bikes_per_truck = 1;
  DemandDay day;
  // Same timestamp: input order decides, and the bike leaves the region.
  day.trips = {At(0.0, 0.1, 2.0, 0.0, 9.0), At(0.0, -0.1, 0.5, 0.0, 9.0)};
  const std::vector<int> alloc = {0};
  const DayOutcome out = StepDay(c, alloc, day);
  EXPECT_EQ(out.total_trips, 1);
  EXPECT_EQ(out.bikes_at_end, (std::vector<int>{0, 0, 1, 0}));
}

TEST(SmsStep, TiesGoToLowestDepotIndex) {
  SmsConfig c = TwoRegionLayout();
  c.service_radius = 1.0;
  DemandDay day;
  day.trips = {At(0.25, 0.0, 0.25, 0.0, 0.0)};
  const std::vector<int> alloc = {1, 0};
  const DayOutcome out = StepDay(c, alloc, day);
  // Both depots 0 and 1 are 0.25 away; depot 0 serves. The end is also a
  // tie and returns to depot 0.
  EXPECT_EQ(out.bikes_at_end, (std::vector<int>{3, 3, 0, 0}));
}

TEST(SmsStep, BikesAreConservedOnRandomDays) {
  const SmsConfig layout = [] {
    SmsConfig c = SynthLayout(3, 12, 4);
    c.trucks = 4;
    c.bikes_per_truck = 5;
    return c;
  }();
  SynthDemandOptions o;
  o.seed = 11;
  o.days = 30;
  const auto days = SynthDemand(layout, o);
  std::mt19937_64 rng(5);
  for (const DemandDay& d : days) {
    std::vector<int> alloc(layout.trucks);
    for (int& a : alloc) a = static_cast<int>(rng() % layout.depots.size());
    const DayOutcome out = StepDay(layout, alloc, d);
    EXPECT_EQ(std::accumulate(out.bikes_at_end.begin(), out.bikes_at_end.end(), 0),
              layout.total_bikes());
    EXPECT_EQ(std::accumulate(out.region_trips.begin(), out.region_trips.end(), 0),
              out.total_trips);
    EXPECT_LE(out.total_trips, static_cast<int>(d.trips.size()));
    for (int b : out.bikes_at_end) EXPECT_GE(b, 0);
  }
}

TEST(SmsStep, RejectsBadAllocation) {
  const SmsConfig c = TwoRegionLayout();
  const std::vector<int> bad = {0, 9};
  const std::vector<int> short_alloc = {0};
  try {
    StepDay(c, bad, DemandDay{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDepot);
  }
  EXPECT_THROW(BikesFromAllocation(c, short_alloc), Error);
}

TEST(SmsLayout, JsonRoundTripAndValidation) {
  const SmsConfig c = TwoRegionLayout();
  const SmsConfig back = ParseSmsLayout(SmsLayoutToJson(c));
  EXPECT_EQ(back.regions, c.regions);
  ASSERT_EQ(back.depots.size(), c.depots.size());
  EXPECT_DOUBLE_EQ(back.depots[3].x, 2.5);
  EXPECT_EQ(back.trucks, 2);
  EXPECT_DOUBLE_EQ(back.service_radius, 0.3);
  EXPECT_THROW(ParseSmsLayout("{\"depots\": []}"), Error);
  EXPECT_THROW(ParseSmsLayout("{not json"), Error);
}

TEST(SmsCsv, EmptyFilesGiveNoDays) {
  EXPECT_TRUE(ParseTripCsv("day,sx,sy,ex,ey,t\n", "day,temp,rain\n").empty());
}

TEST(SmsCsv, NormalizesCovariatesAndSortsTrips) {
  const std::string trips =
      "day,sx,sy,ex,ey,t\n"
      "0,0,0,1,1,9.5\n"
      "0,1,1,0,0,7.0\n"
      "1,0,0,0,0,3.0\n"
      "2,0,0,0,0,3.0\n"
      "2,0,0,0,0,4.0\n"
      "2,0,0,0,0,5.0\n";
  const std::string cov =
      "day,temp,rain\n"
      "0,10,0\n"
      "1,20,5\n"
      "2,30,10\n";
  const auto days = ParseTripCsv(trips, cov);
  ASSERT_EQ(days.size(), 3u);
  EXPECT_DOUBLE_EQ(days[0].trips[0].timestamp, 7.0);
  EXPECT_DOUBLE_EQ(days[1].covariates.temperature, 0.5);
  EXPECT_DOUBLE_EQ(days[2].covariates.rainfall, 1.0);
  EXPECT_DOUBLE_EQ(days[0].covariates.total_demand, 0.5);
  EXPECT_DOUBLE_EQ(days[1].covariates.total_demand, 0.0);
  EXPECT_DOUBLE_EQ(days[2].covariates.total_demand, 1.0);
  for (const auto& d : days) {
    for (double v : d.covariates.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(SmsCsv, MalformedRowReportsLine) {
  const std::string trips = "day,sx,sy,ex,ey,t\n0,0,0,1,1,9\n0,0,abc,1,1,9\n";
  try {
    ParseTripCsv(trips, "day,temp,rain\n0,1,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRow);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(ParseTripCsv("h\n0,0,0,1,1\n", "day,temp,rain\n0,1,1\n"), Error);
}

TEST(SmsCsv, MissingCovariateAndWeekends) {
  try {
    ParseTripCsv("h\n4,0,0,0,0,1\n", "h\n0,1,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCovariate);
  }
  std::string trips = "h\n", cov = "h\n";
  for (int d = 0; d < 14; ++d) {
    trips += std::to_string(d) + ",0,0,0,0,1\n";
    cov += std::to_string(d) + "," + std::to_string(d) + ",0\n";
  }
  const auto weekdays = ParseTripCsv(trips, cov, true);
  EXPECT_EQ(weekdays.size(), 10u);
  for (const auto& d : weekdays) EXPECT_LT(d.day % 7, 5);
}

TEST(SmsSynth, DeterministicAndScalesWithIntensity) {
  const SmsConfig layout = SynthLayout(1, 16, 4);
  SynthDemandOptions o;
  o.seed = 9;
  o.days = 200;
  const auto a = SynthDemand(layout, o);
  const auto b = SynthDemand(layout, o);
  ASSERT_EQ(a.size(), b.size());
  size_t base = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].trips.size(), b[i].trips.size());
    base += a[i].trips.size();
  }
  o.intensity = 2.0;
  size_t doubled = 0;
  for (const auto& d : SynthDemand(layout, o)) doubled += d.trips.size();
  const double ratio = static_cast<double>(doubled) / static_cast<double>(base);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

Kernel Base() { return Kernel::Rbf(1, 0.3); }

TEST(SmsModelTest, PriorUcbIsBetaClippedPerRegionAndNormalized) {
  const SmsConfig c = TwoRegionLayout();
  const Covariates cov{0.5, 0.1, 0.4};
  const std::vector<std::vector<int>> allocs = {{0, 2}, {1, 1}};
  for (double beta : {0.0, 0.4, 2.0}) {
    const SmsModel m = SmsConfidence(c, Base(), 0.05, beta, 10.0);
    for (double u : m.Ucb(allocs, cov)) {
      EXPECT_NEAR(u, std::min(1.0, beta), 1e-9);
    }
  }
}

TEST(SmsModelTest, BetaZeroIsSumOfMeansAndMonotoneInBeta) {
  const SmsConfig c = TwoRegionLayout();
  const Covariates cov{0.5, 0.1, 0.4};
  std::vector<SmsModel> models;
  for (double beta : {0.0, 0.5, 1.0, 3.0}) {
    models.push_back(SmsConfidence(c, Base(), 0.05, beta, std::vector<double>{10.0, 30.0}));
  }
  const std::vector<std::vector<int>> seen = {{0, 2}, {1, 3}, {0, 0}};
  const std::vector<std::vector<int>> trips = {{3, 2}, {1, 4}, {5, 0}};
  for (auto& m : models) {
    for (size_t i = 0; i < seen.size(); ++i) m.Observe(seen[i], cov, trips[i]);
  }
  const std::vector<std::vector<int>> probe = {{0, 2}, {1, 2}, {3, 3}, {0, 1}};
  const auto u0 = models[0].Ucb(probe, cov);
  for (size_t j = 0; j < probe.size(); ++j) {
    const auto bikes = BikesFromAllocation(c, probe[j]);
    const double scale[2] = {10.0, 30.0};
    double sum = 0.0;
    for (int r = 0; r < 2; ++r) {
      sum += scale[r] * std::min(1.0, models[0].gp(r).Mean(models[0].Features(r, bikes, cov)));
    }
    EXPECT_NEAR(u0[j], sum / 40.0, 1e-9);
  }
  for (size_t b = 1; b < models.size(); ++b) {
    const auto lo = models[b - 1].Ucb(probe, cov);
    const auto hi = models[b].Ucb(probe, cov);
    for (size_t j = 0; j < probe.size(); ++j) EXPECT_GE(hi[j], lo[j] - 1e-12);
  }
}

TEST(SmsModelTest, FlatModelUsesAllDepots) {
  const SmsConfig c = TwoRegionLayout();
  const SmsModel flat = SmsFlatModel(c, Base(), 0.05, 1.0, 10.0);
  EXPECT_EQ(flat.region_count(), 1);
  EXPECT_EQ(flat.gp(0).dim(), 4 + 3);
  const SmsModel causal = SmsConfidence(c, Base(), 0.05, 1.0, 10.0);
  EXPECT_EQ(causal.gp(1).dim(), 2 + 3);
  const auto bikes = BikesFromAllocation(c, std::vector<int>{0, 3});
  const auto x = causal.Features(1, bikes, {0.1, 0.2, 0.3});
  EXPECT_EQ(x, (std::vector<double>{0.0, 0.5, 0.1, 0.2, 0.3}));
}

// The regional UCB is the optimistic-eta propagation through a graph whose
// reward is sum_r s_r min(1, X_r) / sum_r s_r. Brute force over constant eta
// must agree.
TEST(SmsModelTest, ClosedFormMatchesBruteForceOracle) {
  CausalGraph g = CausalGraph::PerNode({{}, {}, {0, 1}}, {5, 5, 1}, {1, 1, 1});
  ConfidenceModel model = PriorConfidence(g, Kernel::Rbf(1, 0.3), 0.05, 1.5);
  model.nodes[2] = {nullptr, [](std::span<const double> in) {
                      return (std::min(1.0, in[0]) + 3.0 * std::min(1.0, in[1])) / 4.0;
                    }};
  auto gp0 = std::make_shared<GpPosterior>(Kernel::Rbf(1, 0.3), 0.05);
  auto gp1 = std::make_shared<GpPosterior>(Kernel::Rbf(1, 0.3), 0.05);
  gp0->Add(std::vector<double>{0.0}, 0.1);
  gp0->Add(std::vector<double>{0.75}, 0.6);
  gp1->Add(std::vector<double>{0.5}, 0.3);
  model.nodes[0].gp = gp0;
  model.nodes[1].gp = gp1;
  const Eigen::MatrixXd noise = DrawNoise(model, 1, 0);
  for (int a0 = 0; a0 < 5; ++a0) {
    for (int a1 = 0; a1 < 5; ++a1) {
      const ActionProfile p{{a0, a1, 0}, {0, 0, 0}};
      const std::vector<double> x0 = {a0 / 4.0}, x1 = {a1 / 4.0};
      const double closed =
          (std::min(1.0, gp0->Mean(x0) + 1.5 * std::sqrt(gp0->Variance(x0))) +
           3.0 * std::min(1.0, gp1->Mean(x1) + 1.5 * std::sqrt(gp1->Variance(x1)))) /
          4.0;
      EXPECT_NEAR(UcbBruteforce(model, p, 21, noise), closed, 1e-6);
    }
  }
}

TEST(SmsModelTest, RegionScalesBoundRegionDemand) {
  const SmsConfig c = TwoRegionLayout();
  DemandDay day;
  // Two trips start next to region 0, one next to region 1.
  const Depot& d0 = c.depots[c.regions[0][0]];
  const Depot& d1 = c.depots[c.regions[1][0]];
  day.trips = {{d0.x, d0.y, d0.x, d0.y, 1.0},
               {d0.x, d0.y, d1.x, d1.y, 2.0},
               {d1.x, d1.y, d1.x, d1.y, 3.0}};
  DemandDay quiet;
  EXPECT_EQ(RegionDemandScales(c, {day, quiet}), (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(RegionDemandScales(c, {quiet}), (std::vector<double>{1.0, 1.0}));
  EXPECT_THROW(SmsConfidence(c, Base(), 0.05, 1.0, std::vector<double>{1.0}), Error);
}

TEST(SmsScorerTest, BankUpdateCostsSumOfActionCounts) {
  SmsConfig c = TwoRegionLayout();
  c.trucks = 3;
  const CausalGraph g = SmsTruckGraph(c);
  EXPECT_EQ(g.num_agent_vars(), 3);
  EXPECT_EQ(g.num_adversary_vars(), 0);
  const SmsModel m = SmsConfidence(c, Base(), 0.05, 1.0, 10.0);
  AgentBank bank(g, LearningRateMode::kFixedHorizon, 50);
  const std::vector<int> joint = bank.Sample(1);
  ResetUcbCallCount();
  const auto ucb = bank.Update(SmsScorer(m, {0.2, 0.0, 0.5}), joint, {});
  EXPECT_EQ(UcbCallCount(), 3 * 4);
  ASSERT_EQ(ucb.size(), 3u);
  for (const auto& v : ucb) EXPECT_EQ(v.size(), 4u);
}

}  // namespace
}  // namespace acbo
