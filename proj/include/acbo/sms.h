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

#ifndef ACBO_SMS_H_
#define ACBO_SMS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acbo/mw.h"

namespace acbo {

struct Depot {
  int id = 0;
  double x = 0.0;  // km
  double y = 0.0;
};

// Bike-sharing layout. Regions partition the depot indices (positions in
// `depots`, not ids).
struct SmsConfig {
  std::vector<Depot> depots;
  std::vector<std::vector<int>> regions;
  int trucks = 5;
  int bikes_per_truck = 8;
  double service_radius = 0.8;
  int horizon_days = 200;
  int random_days = 10;

  int total_bikes() const { return trucks * bikes_per_truck; }
};

Status ValidateSmsConfig(const SmsConfig& config);

// {"depots": [{"id", "x", "y", "region"}...], "trucks", "bikes_per_truck",
// "service_radius", "horizon_days", "random_days"}; only depots is required.
SmsConfig ParseSmsLayout(const std::string& json_text);
SmsConfig LoadSmsLayout(const std::string& path);
std::string SmsLayoutToJson(const SmsConfig& config);

struct Trip {
  double start_x = 0.0, start_y = 0.0;
  double end_x = 0.0, end_y = 0.0;
  double timestamp = 0.0;
};

// Observed exogenous state of a day, each in [0, 1].
struct Covariates {
  double temperature = 0.0;
  double rainfall = 0.0;
  double total_demand = 0.0;

  std::array<double, 3> values() const { return {temperature, rainfall, total_demand}; }
};

struct DemandDay {
  int day = 0;
  std::vector<Trip> trips;  // sorted by timestamp, ties in input order
  Covariates covariates;
};

struct DayOutcome {
  std::vector<int> region_trips;
  int total_trips = 0;
  std::vector<int> bikes_at_start;  // per depot
  std::vector<int> bikes_at_end;
};

// Bikes per depot after each truck drops its load at allocation[truck].
// Throws kInvalidDepot.
std::vector<int> BikesFromAllocation(const SmsConfig& config,
                                     std::span<const int> allocation);

// Replays one day of demand. A trip is served from the nearest stocked depot
// within the service radius (lowest index on ties); the bike then jumps to
// the depot nearest the trip's end. Trips count toward the serving depot's
// region.
DayOutcome StepDay(const SmsConfig& config, std::span<const int> allocation,
                   const DemandDay& demand);

// Trips CSV: day,start_x,start_y,end_x,end_y,timestamp. Covariates CSV:
// day,temperature,rainfall. Temperature, rainfall and the day's trip count
// are min-max normalized over the file. Day d is a weekend when d mod 7 is 5
// or 6. Throws kMalformedRow (with the line) and kMissingCovariate.
std::vector<DemandDay> LoadTripCsv(const std::string& trips_path,
                                   const std::string& covariates_path,
                                   bool skip_weekends = false);
std::vector<DemandDay> ParseTripCsv(const std::string& trips_text,
                                    const std::string& covariates_text,
                                    bool skip_weekends = false);

struct SynthDemandOptions {
  std::uint64_t seed = 0;
  int days = 200;
  // Mean trips per region per day at average weather, times `intensity`.
  std::vector<double> region_rates;
  double intensity = 1.0;
  double start_spread = 0.3;        // km around the chosen hot depot
  double cross_region_prob = 0.05;  // trips ending in another region
  double popularity_skew = 2.0;     // larger concentrates demand on few depots
};

// Poisson day counts per region, modulated by a seasonal temperature and
// random rain; trips start near popular depots. Deterministic per seed.
std::vector<DemandDay> SynthDemand(const SmsConfig& layout,
                                   const SynthDemandOptions& options);

// Depots scattered around a grid of region centres.
SmsConfig SynthLayout(std::uint64_t seed, int depots, int regions,
                      double region_spacing = 4.0, double region_radius = 1.2);

// Optimistic trip model: one GP per region over [bike fractions at the
// region's depots..., covariates...] predicting region trips / s_r. The
// normalized reward is sum_r s_r X_r / sum_r s_r, so
// UCB(a, a') = sum_r s_r min(1, mu_r + beta * sigma_r) / sum_r s_r, which is
// what the causal oracle returns for this graph with eta = 1 everywhere. A
// single region holding every depot gives the flat (non-causal) model.
class SmsModel {
 public:
  SmsModel(const SmsConfig& config, std::vector<std::vector<int>> regions,
           const Kernel& base, double noise_scale, double beta,
           std::vector<double> region_scales);

  int region_count() const { return static_cast<int>(regions_.size()); }
  double beta() const { return beta_; }
  const std::vector<double>& region_scales() const { return region_scales_; }
  double reward_scale() const { return reward_scale_; }
  const GpPosterior& gp(int region) const { return gps_[region]; }

  std::vector<double> Features(int region, std::span<const int> bikes,
                               const Covariates& covariates) const;
  void Observe(std::span<const int> allocation, const Covariates& covariates,
               std::span<const int> region_trips);
  std::vector<double> Ucb(const std::vector<std::vector<int>>& allocations,
                          const Covariates& covariates) const;

 private:
  SmsConfig config_;
  std::vector<std::vector<int>> regions_;
  std::vector<GpPosterior> gps_;
  double beta_;
  std::vector<double> region_scales_;
  double reward_scale_ = 1.0;
};

// Regional model over the layout's regions, with one trip scale per region
// or the same scale everywhere.
SmsModel SmsConfidence(const SmsConfig& config, const Kernel& base,
                       double noise_scale, double beta, std::vector<double> region_scales);
SmsModel SmsConfidence(const SmsConfig& config, const Kernel& base,
                       double noise_scale, double beta, double trip_scale);

// Largest daily count of trips starting nearest to a depot of each region
// (at least 1): an upper bound on the trips a region can serve in a day.
std::vector<double> RegionDemandScales(const SmsConfig& config,
                                       const std::vector<DemandDay>& demand);
// One region spanning all depots; trip_scale normalizes total trips.
SmsModel SmsFlatModel(const SmsConfig& config, const Kernel& base,
                      double noise_scale, double beta, double trip_scale);

// Scores truck allocations (profile.agent) under the day's covariates;
// counts one UCB call per profile.
ActionScorer SmsScorer(const SmsModel& model, const Covariates& covariates);

// Graph with one agent variable per truck over all depots and no adversary
// variables; the covariates enter through the scorer.
CausalGraph SmsTruckGraph(const SmsConfig& config);

}  // namespace acbo

#endif  // ACBO_SMS_H_
