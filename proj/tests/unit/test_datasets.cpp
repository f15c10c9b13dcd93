#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <graphmask/datasets.hpp>
#include <graphmask/error.hpp>
#include <graphmask/fixtures.hpp>

using namespace graphmask;

namespace {

std::vector<std::pair<std::string, Matrix>> random_features(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  Matrix f(n, 2);
  for (int i = 0; i < n; ++i) f(i, 0) = u(rng), f(i, 1) = u(rng);
  return {{"gps", f}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("graphmask_ds_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(FeatureLayers, EdgeBudgetAndVolume) {
  const MultiLayerGraph ml = layers_from_features(random_features(91, 1), 0.10);
  EXPECT_EQ(ml.layer(0).edges().size(), 409u);  // floor(0.1 * 4095)
  EXPECT_NEAR(ml.layer(0).weights().sum(), 91.0, 1e-9);
  const MultiLayerGraph two = layers_from_features(random_features(2, 2), 0.10);
  EXPECT_EQ(two.layer(0).edges().size(), 1u);
}

TEST(FeatureLayers, ScaleInvariant) {
  auto f = random_features(30, 4);
  const MultiLayerGraph a = layers_from_features(f, 0.2);
  f[0].second *= 1000.0;
  const MultiLayerGraph b = layers_from_features(f, 0.2);
  EXPECT_EQ(a.layer(0).edges(), b.layer(0).edges());
  EXPECT_EQ(a.layer(0).name(), "gps");
}

TEST(FeatureLayers, KeepsClosestPairs) {
  Matrix f(4, 1);
  f << 0.0, 1.0, 5.0, 5.5;
  const MultiLayerGraph ml = layers_from_features({{"line", f}}, 2.0 / 6.0);
  EXPECT_EQ(ml.layer(0).edges(), EdgeSet({{0, 1}, {2, 3}}));
}

TEST(Stations, RoundTripWithMissingValues) {
  StationTable t = make_weather_fixture();
  const auto dir = scratch("stations");
  save_station_table(dir, t);
  const StationTable back = load_station_table(dir);
  ASSERT_EQ(back.ids, t.ids);
  const Matrix& a = t.measurement("temperature");
  const Matrix& b = back.measurement("temperature");
  EXPECT_EQ(a.array().isNaN().count(), b.array().isNaN().count());
  EXPECT_EQ(a.array().isNaN().select(0.0, a), b.array().isNaN().select(0.0, b));
  EXPECT_EQ(back.feature("gps"), t.feature("gps"));
  EXPECT_THROW(back.feature("unknown"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(Stations, SelectionDropsIncompleteRows) {
  const StationTable t = make_weather_fixture();
  const MeasurementSelection s = select_measurement(t, "temperature");
  EXPECT_EQ(s.kept.size(), 44u);
  EXPECT_EQ(s.dropped.size(), 4u);
  EXPECT_EQ(s.monthly.rows(), 44);
  EXPECT_EQ(s.monthly.cols(), kMonths);
  EXPECT_FALSE(s.monthly.array().isNaN().any());
}

TEST(Stations, BundledFixtureLoads) {
  const StationTable t = load_station_table(std::filesystem::path(GRAPHMASK_FIXTURE_DIR) / "weather");
  EXPECT_EQ(t.size(), 48);
  EXPECT_NO_THROW(t.validate());
  const RelationTable r = load_relation_table(std::filesystem::path(GRAPHMASK_FIXTURE_DIR) / "office");
  EXPECT_EQ(r.size(), 62);
  EXPECT_EQ(r.relation("facebook").size(), 124u);
}

TEST(Relations, GroupsAndBipartiteSignals) {
  RelationTable t;
  t.actors = {"a", "b", "c", "d", "e"};
  t.relations["fb"] = EdgeSet({{0, 1}, {1, 2}});
  t.relations["lunch"] = EdgeSet({{0, 3}, {2, 3}, {1, 2}, {3, 4}});
  const ActorGroups g = derive_groups(t, "fb", "lunch");
  EXPECT_EQ(g.a, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(g.b, (std::vector<int>{3}));
  const Matrix x = bipartite_signals(t, "lunch", g);
  ASSERT_EQ(x.rows(), 3);
  ASSERT_EQ(x.cols(), 1);
  EXPECT_EQ(x.sum(), 2.0);
  EXPECT_EQ(x(1, 0), 0.0);
  EXPECT_EQ(induced_edges(t, "lunch", g.a), EdgeSet({{1, 2}}));
  const GraphLayer l = induced_layer(t, "fb", g.a);
  EXPECT_NEAR(l.weights().sum(), 3.0, 1e-12);
  EXPECT_EQ(induced_layer(t, "fb", g.a, false).weights().sum(), 4.0);
  EXPECT_THROW(t.relation("none"), ValidationError);
}

TEST(Relations, RoundTrip) {
  const RelationTable t = make_office_fixture();
  const auto dir = scratch("relations");
  save_relation_table(dir, t);
  const RelationTable back = load_relation_table(dir);
  EXPECT_EQ(back.actors, t.actors);
  EXPECT_EQ(back.relations, t.relations);
  std::filesystem::remove_all(dir);
}
