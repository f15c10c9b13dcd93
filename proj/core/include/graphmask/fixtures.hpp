#pragma once

#include <cstdint>

#include "graphmask/datasets.hpp"

namespace graphmask {

struct WeatherFixtureConfig {
  int stations = 48;
  int missing_temperature = 4;  ///< stations reported without temperature
  double width_km = 300.0;
  double height_km = 200.0;
  std::uint64_t seed = 7;
};

/// Stations with planar coordinates ("gps", km) and altitude (m). Monthly
/// normals for temperature, snowfall, precipitation, humidity, sunshine and
/// cloudy_days. Temperature follows altitude through a monthly lapse rate;
/// cloudy days follow smooth regional fields.
StationTable make_weather_fixture(const WeatherFixtureConfig& cfg = {});

/// Station graph behind the temperature field: union edges of the two 10%
/// proximity layers, keeping position-only edges between lowland stations
/// (below the median altitude) and every altitude edge.
Matrix planted_weather_weights(const Matrix& gps, const Matrix& alt);

struct OfficeFixtureConfig {
  int actors = 62;
  int facebook_users = 32;   ///< group A
  int communities = 6;
  int outsiders = 4;  ///< non-A actors in a separate group that never lunches with A
  double lunch_within = 0.8;  ///< lunch probability inside a community
  double lunch_across = 0.02;
  int facebook_edges = 124;
  int work_edges = 68;
  /// Share of A-internal lunch edges in no layer, in both layers, only
  /// facebook and only work.
  double share_outside = 0.16;
  double share_both = 0.44;
  double share_facebook_only = 0.34;
  /// Share of the non-lunch work ties that are also facebook friendships.
  double work_on_facebook = 0.9;
  std::uint64_t seed = 11;
};

/// Actors with relations "facebook" (inside A), "work" (inside A) and
/// "lunch" (everyone, planted as noisy communities).
RelationTable make_office_fixture(const OfficeFixtureConfig& cfg = {});

}  // namespace graphmask
