#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <graphmask/error.hpp>
#include <graphmask/io.hpp>

#include "helpers.hpp"

using namespace graphmask;
using graphmask::testing::random_weights;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("graphmask_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(EdgeList, RoundTripIsExact) {
  const Matrix w = random_weights(9, 0.4, 3);
  std::stringstream ss;
  write_edge_list(ss, w);
  EXPECT_EQ(read_edge_list(ss), w);
}

TEST(EdgeList, HeaderFixesVertexCount) {
  std::stringstream ss("# vertices 6\n0 1 0.5\n");
  const Matrix w = read_edge_list(ss);
  EXPECT_EQ(w.rows(), 6);
  std::stringstream plain("0 1 0.5\n2 3 1\n");
  EXPECT_EQ(read_edge_list(plain).rows(), 4);
  std::stringstream given("0 1 0.5\n");
  EXPECT_EQ(read_edge_list(given, 5).rows(), 5);
}

TEST(EdgeList, RejectsMalformedInput) {
  const char* corpus[] = {
      "1 1 0.5\n",            // self-loop
      "0 1 -2\n",             // negative weight
      "0 1 nan\n",            // non-finite
      "0 1\n",                // missing field
      "0 x 1\n",              // bad index
      "0 1 1\n1 0 2\n",       // conflicting duplicate
      "# vertices 2\n0 3 1\n",  // out of range
      "# only comments\n",
  };
  for (const char* text : corpus) {
    std::stringstream ss(text);
    EXPECT_THROW(read_edge_list(ss), Error) << text;
  }
  std::stringstream dup("0 1 1\n1 0 1\n");
  EXPECT_EQ(read_edge_list(dup)(1, 0), 1.0);
}

TEST(EdgeList, ErrorNamesLine) {
  std::stringstream ss("0 1 1\n# note\n2 2 1\n");
  try {
    read_edge_list(ss);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(Csv, RoundTripAndTruncatedRow) {
  Matrix m(3, 2);
  m << 1.0 / 3.0, -2.0, 1e-300, 4.5, 0.0, 7.125;
  std::stringstream ss;
  write_csv(ss, m);
  EXPECT_EQ(read_csv(ss), m);
  std::stringstream bad("1,2,3\n4,5\n");
  try {
    read_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("expected 3 columns, found 2"), std::string::npos);
  }
  std::stringstream empty("# nothing\n\n");
  EXPECT_THROW(read_csv(empty), ParseError);
}

TEST(Masks, RoundTrip) {
  const MultiLayerGraph ml = graphmask::testing::hand_instance();
  const MaskSet m = MaskSet::uniform(ml);
  std::stringstream ss;
  write_masks(ss, m);
  const MaskSet back = read_masks(ss, 2);
  EXPECT_EQ(back.support(), m.support());
  EXPECT_EQ(back.values(), m.values());
}

TEST(Instance, SaveLoadRoundTrip) {
  SynthConfig cfg;
  cfg.n = 12;
  cfg.k_signals = 7;
  cfg.coverability = 0.8;
  cfg.seed = 5;
  const SynthInstance inst = generate_instance(cfg);
  const auto dir = scratch("instance");
  save_instance(dir, inst);
  const SynthInstance back = load_instance(dir);
  EXPECT_EQ(back.signals, inst.signals);
  EXPECT_EQ(back.true_global.weights(), inst.true_global.weights());
  EXPECT_EQ(back.layers.layer(1).weights(), inst.layers.layer(1).weights());
  EXPECT_EQ(back.true_masks.values(), inst.true_masks.values());
  EXPECT_DOUBLE_EQ(back.coverability_actual, inst.coverability_actual);
  std::filesystem::remove(dir / "signals.csv");
  EXPECT_THROW(load_instance(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST(ResultJson, GlobalGraphRoundTrip) {
  const GlobalGraph g = GlobalGraph::from_weights(random_weights(6, 0.5, 9));
  const LearnedGraph lg{g, {}, {}};
  const GlobalGraph back = global_from_result_json(learned_graph_json("gl-sigrep", lg));
  EXPECT_EQ(back.weights(), g.weights());
  EXPECT_THROW(global_from_result_json("{\"format\": 3}"), ParseError);
  EXPECT_THROW(global_from_result_json("not json"), ParseError);
}
