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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace acbo {
namespace {

using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double Dist2(double ax, double ay, double bx, double by) {
  return (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
}

// Splits a CSV line into doubles; false on any malformed field.
bool ParseFields(const std::string& line, std::vector<double>* out) {
  out->clear();
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
    if (end == begin || *end != '\0' || !std::isfinite(v)) return false;
    out->push_back(v);
  }
  return true;
}

// Rows of a headed CSV with `columns` numeric fields each, plus line numbers.
std::vector<std::pair<int, std::vector<double>>> ParseCsv(const std::string& text,
                                                          size_t columns,
                                                          const std::string& what) {
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  std::vector<double> fields;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line_no == 1) continue;  // header
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!ParseFields(line, &fields) || fields.size() != columns) {
      Fail(ErrorCode::kMalformedRow,
           what + " line " + std::to_string(line_no) + ": '" + line + "'");
    }
    rows.emplace_back(line_no, fields);
  }
  return rows;
}

void MinMax(std::vector<double>* values) {
  if (values->empty()) return;
  const auto [lo, hi] = std::minmax_element(values->begin(), values->end());
  const double a = *lo, span = *hi - *lo;
  for (double& v : *values) v = span > 0.0 ? (v - a) / span : 0.0;
}

int NearestDepot(const SmsConfig& c, double x, double y) {
  int best = 0;
  double best_d = INFINITY;
  for (size_t d = 0; d < c.depots.size(); ++d) {
    const double dd = Dist2(x, y, c.depots[d].x, c.depots[d].y);
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<int>(d);
    }
  }
  return best;
}

}  // namespace

Status ValidateSmsConfig(const SmsConfig& c) {
  if (c.depots.empty()) return {ErrorCode::kInvalidConfig, "layout has no depots"};
  if (c.trucks < 1 || c.bikes_per_truck < 1) {
    return {ErrorCode::kInvalidConfig, "trucks and bikes_per_truck must be >= 1"};
  }
  if (!(c.service_radius > 0.0)) {
    return {ErrorCode::kInvalidConfig, "service_radius must be > 0"};
  }
  if (c.horizon_days < 1 || c.random_days < 0) {
    return {ErrorCode::kInvalidConfig, "horizon_days >= 1 and random_days >= 0 required"};
  }
  std::vector<int> seen(c.depots.size(), 0);
  for (const auto& region : c.regions) {
    if (region.empty()) return {ErrorCode::kInvalidConfig, "empty region"};
    for (int d : region) {
      if (d < 0 || d >= static_cast<int>(c.depots.size())) {
        return {ErrorCode::kInvalidDepot, "region names depot " + std::to_string(d)};
      }
      if (seen[d]++) {
        return {ErrorCode::kInvalidConfig,
                "depot " + std::to_string(d) + " in two regions"};
      }
    }
  }
  for (size_t d = 0; d < seen.size(); ++d) {
    if (!seen[d]) {
      return {ErrorCode::kInvalidConfig, "depot " + std::to_string(d) + " has no region"};
    }
  }
  return Status::Ok();
}

SmsConfig ParseSmsLayout(const std::string& json_text) {
  SmsConfig c;
  try {
    const json j = json::parse(json_text);
    std::map<int, std::vector<int>> regions;
    for (const auto& d : j.at("depots")) {
      const int index = static_cast<int>(c.depots.size());
      c.depots.push_back({d.value("id", index), d.at("x").get<double>(),
                          d.at("y").get<double>()});
      regions[d.value("region", 0)].push_back(index);
    }
    for (auto& [id, members] : regions) c.regions.push_back(std::move(members));
    c.trucks = j.value("trucks", c.trucks);
    c.bikes_per_truck = j.value("bikes_per_truck", c.bikes_per_truck);
    c.service_radius = j.value("service_radius", c.service_radius);
    c.horizon_days = j.value("horizon_days", c.horizon_days);
    c.random_days = j.value("random_days", c.random_days);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("layout: ") + e.what());
  }
  const Status st = ValidateSmsConfig(c);
  if (!st.ok()) Fail(st.code, st.message);
  return c;
}

SmsConfig LoadSmsLayout(const std::string& path) {
  return ParseSmsLayout(ReadFile(path));
}

std::string SmsLayoutToJson(const SmsConfig& c) {
  std::vector<int> region_of(c.depots.size(), 0);
  for (size_t r = 0; r < c.regions.size(); ++r) {
    for (int d : c.regions[r]) region_of[d] = static_cast<int>(r);
  }
  json depots = json::array();
  for (size_t d = 0; d < c.depots.size(); ++d) {
    depots.push_back({{"id", c.depots[d].id},
                      {"x", c.depots[d].x},
                      {"y", c.depots[d].y},
                      {"region", region_of[d]}});
  }
  json j = {{"depots", depots},
            {"trucks", c.trucks},
            {"bikes_per_truck", c.bikes_per_truck},
            {"service_radius", c.service_radius},
            {"horizon_days", c.horizon_days},
            {"random_days", c.random_days}};
  return j.dump(2);
}

std::vector<int> BikesFromAllocation(const SmsConfig& c,
                                     std::span<const int> allocation) {
  if (static_cast<int>(allocation.size()) != c.trucks) {
    Fail(ErrorCode::kInvalidDepot, "allocation needs one depot per truck");
  }
  std::vector<int> bikes(c.depots.size(), 0);
  for (int d : allocation) {
    if (d < 0 || d >= static_cast<int>(c.depots.size())) {
      Fail(ErrorCode::kInvalidDepot, "depot index " + std::to_string(d) + " out of range");
    }
    bikes[d] += c.bikes_per_truck;
  }
  return bikes;
}

DayOutcome StepDay(const SmsConfig& c, std::span<const int> allocation,
                   const DemandDay& demand) {
  DayOutcome out;
  out.bikes_at_start = BikesFromAllocation(c, allocation);
  std::vector<int> bikes = out.bikes_at_start;
  std::vector<int> region_of(c.depots.size(), 0);
  for (size_t r = 0; r < c.regions.size(); ++r) {
    for (int d : c.regions[r]) region_of[d] = static_cast<int>(r);
  }
  out.region_trips.assign(std::max<size_t>(c.regions.size(), 1), 0);
  const double r2 = c.service_radius * c.service_radius;
  for (const Trip& trip : demand.trips) {
    int source = -1;
    double best = INFINITY;
    for (size_t d = 0; d < c.depots.size(); ++d) {
      if (bikes[d] == 0) continue;
      const double dd = Dist2(trip.start_x, trip.start_y, c.depots[d].x, c.depots[d].y);
      if (dd <= r2 && dd < best) {
        best = dd;
        source = static_cast<int>(d);
      }
    }
    if (source < 0) continue;
    --bikes[source];
    ++bikes[NearestDepot(c, trip.end_x, trip.end_y)];
    ++out.region_trips[region_of[source]];
    ++out.total_trips;
  }
  out.bikes_at_end = std::move(bikes);
  return out;
}

std::vector<DemandDay> ParseTripCsv(const std::string& trips_text,
                                    const std::string& covariates_text,
                                    bool skip_weekends) {
  const auto trip_rows = ParseCsv(trips_text, 6, "trips");
  const auto cov_rows = ParseCsv(covariates_text, 3, "covariates");
  std::map<int, DemandDay> days;
  std::map<int, std::array<double, 2>> weather;
  for (const auto& [line, f] : cov_rows) {
    const int day = static_cast<int>(f[0]);
    if (f[0] != day) {
      Fail(ErrorCode::kMalformedRow, "covariates line " + std::to_string(line) +
                                         ": day must be an integer");
    }
    weather[day] = {f[1], f[2]};
    days[day].day = day;
  }
  for (const auto& [line, f] : trip_rows) {
    const int day = static_cast<int>(f[0]);
    if (f[0] != day) {
      Fail(ErrorCode::kMalformedRow,
           "trips line " + std::to_string(line) + ": day must be an integer");
    }
    if (!weather.count(day)) {
      Fail(ErrorCode::kMissingCovariate,
           "no covariates for day " + std::to_string(day) + " (trips line " +
               std::to_string(line) + ")");
    }
    days[day].trips.push_back({f[1], f[2], f[3], f[4], f[5]});
  }
  std::vector<DemandDay> out;
  for (auto& [day, d] : days) {
    if (skip_weekends && (day % 7 == 5 || day % 7 == 6)) continue;
    std::stable_sort(d.trips.begin(), d.trips.end(),
                     [](const Trip& a, const Trip& b) { return a.timestamp < b.timestamp; });
    out.push_back(std::move(d));
  }
  std::vector<double> temp, rain, total;
  for (const DemandDay& d : out) {
    temp.push_back(weather[d.day][0]);
    rain.push_back(weather[d.day][1]);
    total.push_back(static_cast<double>(d.trips.size()));
  }
  MinMax(&temp);
  MinMax(&rain);
  MinMax(&total);
  for (size_t i = 0; i < out.size(); ++i) out[i].covariates = {temp[i], rain[i], total[i]};
  return out;
}

std::vector<DemandDay> LoadTripCsv(const std::string& trips_path,
                                   const std::string& covariates_path,
                                   bool skip_weekends) {
  return ParseTripCsv(ReadFile(trips_path), ReadFile(covariates_path), skip_weekends);
}

std::vector<DemandDay> SynthDemand(const SmsConfig& layout,
                                   const SynthDemandOptions& o) {
  if (o.days < 1) Fail(ErrorCode::kInvalidArgument, "days must be positive");
  const Status st = ValidateSmsConfig(layout);
  if (!st.ok()) Fail(st.code, st.message);
  const int regions = static_cast<int>(layout.regions.size());
  std::vector<double> rates = o.region_rates;
  if (rates.empty()) rates.assign(regions, 25.0);
  if (static_cast<int>(rates.size()) != regions) {
    Fail(ErrorCode::kDimensionMismatch, "one rate per region required");
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Fixed per-depot popularity: a few hot spots per region.
  std::vector<std::discrete_distribution<int>> pick(regions);
  for (int r = 0; r < regions; ++r) {
    std::vector<double> w;
    for (size_t i = 0; i < layout.regions[r].size(); ++i) {
      w.push_back(std::pow(unit(rng), o.popularity_skew) + 1e-3);
    }
    pick[r] = std::discrete_distribution<int>(w.begin(), w.end());
  }

  std::vector<DemandDay> days(o.days);
  std::vector<double> temp(o.days), rain(o.days), total(o.days);
  for (int t = 0; t < o.days; ++t) {
    temp[t] = std::clamp(0.5 + 0.35 * std::sin(2.0 * std::numbers::pi * t / 365.0) +
                             0.1 * gauss(rng), 0.0, 1.0);
    rain[t] = unit(rng) < 0.3 ? unit(rng) : 0.0;
    const double weather = (0.6 + 0.8 * temp[t]) * (1.0 - 0.6 * rain[t]);
    DemandDay& day = days[t];
    day.day = t;
    for (int r = 0; r < regions; ++r) {
      const double mean = std::max(0.0, rates[r] * o.intensity * weather);
      const int n = mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0;
      for (int k = 0; k < n; ++k) {
        const Depot& from = layout.depots[layout.regions[r][pick[r](rng)]];
        int to_region = r;
        if (regions > 1 && unit(rng) < o.cross_region_prob) {
          to_region = static_cast<int>(rng() % regions);
        }
        const Depot& to = layout.depots[layout.regions[to_region][pick[to_region](rng)]];
        day.trips.push_back({from.x + o.start_spread * gauss(rng),
                             from.y + o.start_spread * gauss(rng),
                             to.x + o.start_spread * gauss(rng),
                             to.y + o.start_spread * gauss(rng), 24.0 * unit(rng)});
      }
    }
    std::stable_sort(day.trips.begin(), day.trips.end(),
                     [](const Trip& a, const Trip& b) { return a.timestamp < b.timestamp; });
    total[t] = static_cast<double>(day.trips.size());
  }
  MinMax(&total);
  for (int t = 0; t < o.days; ++t) days[t].covariates = {temp[t], rain[t], total[t]};
  return days;
}

SmsConfig SynthLayout(std::uint64_t seed, int depots, int regions,
                      double region_spacing, double region_radius) {
  if (depots < regions || regions < 1) {
    Fail(ErrorCode::kInvalidArgument, "need at least one depot per region");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SmsConfig c;
  c.regions.resize(regions);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(regions))));
  for (int d = 0; d < depots; ++d) {
    const int r = d % regions;
    const double cx = (r % cols) * region_spacing, cy = (r / cols) * region_spacing;
    const double rad = region_radius * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    c.depots.push_back({d, cx + rad * std::cos(ang), cy + rad * std::sin(ang)});
    c.regions[r].push_back(d);
  }
  return c;
}

SmsModel::SmsModel(const SmsConfig& config, std::vector<std::vector<int>> regions,
                   const Kernel& base, double noise_scale, double beta,
                   std::vector<double> region_scales)
    : config_(config),
      regions_(std::move(regions)),
      beta_(beta),
      region_scales_(std::move(region_scales)) {
  if (region_scales_.size() != regions_.size()) {
    Fail(ErrorCode::kDimensionMismatch, "one trip scale per model region required");
  }
  reward_scale_ = 0.0;
  for (double s : region_scales_) {
    if (!(s > 0.0)) Fail(ErrorCode::kInvalidArgument, "trip scales must be > 0");
    reward_scale_ += s;
  }
  if (!(beta >= 0.0)) Fail(ErrorCode::kInvalidArgument, "beta must be >= 0");
  const double ls = base.lengthscales.empty() ? 0.3 : base.lengthscales[0];
  for (const auto& region : regions_) {
    const int dim = static_cast<int>(region.size()) + 3;
    Kernel k = base;
    k.lengthscales.assign(dim, ls);
    gps_.emplace_back(k, noise_scale);
  }
}

std::vector<double> SmsModel::Features(int region, std::span<const int> bikes,
                                       const Covariates& covariates) const {
  std::vector<double> x;
  const double total = config_.total_bikes();
  for (int d : regions_[region]) x.push_back(bikes[d] / total);
  for (double v : covariates.values()) x.push_back(v);
  return x;
}

void SmsModel::Observe(std::span<const int> allocation, const Covariates& covariates,
                       std::span<const int> region_trips) {
  if (region_trips.size() != regions_.size()) {
    Fail(ErrorCode::kDimensionMismatch, "one trip count per model region required");
  }
  const std::vector<int> bikes = BikesFromAllocation(config_, allocation);
  for (int r = 0; r < region_count(); ++r) {
    gps_[r].Add(Features(r, bikes, covariates), region_trips[r] / region_scales_[r]);
  }
}

std::vector<double> SmsModel::Ucb(const std::vector<std::vector<int>>& allocations,
                                  const Covariates& covariates) const {
  std::vector<double> out(allocations.size(), 0.0);
  std::vector<std::vector<int>> bikes;
  for (const auto& a : allocations) bikes.push_back(BikesFromAllocation(config_, a));
  for (int r = 0; r < region_count(); ++r) {
    const int dim = gps_[r].dim();
    Eigen::MatrixXd q(dim, allocations.size());
    for (size_t j = 0; j < allocations.size(); ++j) {
      const std::vector<double> x = Features(r, bikes[j], covariates);
      for (int d = 0; d < dim; ++d) q(d, j) = x[d];
    }
    GpPosterior::Batch batch;
    gps_[r].Predict(q, false, &batch);
    for (size_t j = 0; j < allocations.size(); ++j) {
      out[j] += region_scales_[r] * std::min(1.0, batch.mean[j] + beta_ * batch.sd[j]);
    }
  }
  for (double& v : out) v /= reward_scale_;
  return out;
}

SmsModel SmsConfidence(const SmsConfig& config, const Kernel& base,
                       double noise_scale, double beta, std::vector<double> region_scales) {
  return SmsModel(config, config.regions, base, noise_scale, beta, std::move(region_scales));
}

SmsModel SmsConfidence(const SmsConfig& config, const Kernel& base,
                       double noise_scale, double beta, double trip_scale) {
  return SmsConfidence(config, base, noise_scale, beta,
                       std::vector<double>(config.regions.size(), trip_scale));
}

std::vector<double> RegionDemandScales(const SmsConfig& config,
                                       const std::vector<DemandDay>& demand) {
  std::vector<int> region_of(config.depots.size(), 0);
  for (size_t r = 0; r < config.regions.size(); ++r) {
    for (int d : config.regions[r]) region_of[d] = static_cast<int>(r);
  }
  std::vector<double> scales(config.regions.size(), 1.0);
  for (const DemandDay& day : demand) {
    std::vector<double> counts(config.regions.size(), 0.0);
    for (const Trip& t : day.trips) {
      counts[region_of[NearestDepot(config, t.start_x, t.start_y)]] += 1.0;
    }
    for (size_t r = 0; r < scales.size(); ++r) scales[r] = std::max(scales[r], counts[r]);
  }
  return scales;
}

SmsModel SmsFlatModel(const SmsConfig& config, const Kernel& base,
                      double noise_scale, double beta, double trip_scale) {
  std::vector<int> all(config.depots.size());
  for (size_t d = 0; d < all.size(); ++d) all[d] = static_cast<int>(d);
  return SmsModel(config, {all}, base, noise_scale, beta, {trip_scale});
}

ActionScorer SmsScorer(const SmsModel& model, const Covariates& covariates) {
  return [&model, covariates](const std::vector<ActionProfile>& profiles) {
    RecordUcbCalls(static_cast<std::int64_t>(profiles.size()));
    std::vector<std::vector<int>> allocations;
    allocations.reserve(profiles.size());
    for (const auto& p : profiles) allocations.push_back(p.agent);
    return model.Ucb(allocations, covariates);
  };
}

CausalGraph SmsTruckGraph(const SmsConfig& config) {
  CausalGraph g;
  g.node_count = 1;
  g.parents = {{}};
  g.agent_action_sizes.assign(config.trucks, static_cast<int>(config.depots.size()));
  g.agent_inputs = {{}};
  for (int t = 0; t < config.trucks; ++t) g.agent_inputs[0].push_back(t);
  g.adversary_inputs = {{}};
  FinalizeGraph(g);
  return g;
}

}  // namespace acbo
