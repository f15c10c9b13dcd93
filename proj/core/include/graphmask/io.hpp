#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphmask/graph.hpp"
#include "graphmask/inference.hpp"
#include "graphmask/synth.hpp"

namespace graphmask {

inline constexpr const char* kFormatVersion = "graphmask/1";

/// Writes `i j w` lines for i < j with w > 0, after a `# vertices N` header.
void write_edge_list(std::ostream& os, const Matrix& weights);

/// Parses an edge list. Lines starting with '#' are comments; a
/// `# vertices N` comment fixes the vertex count, otherwise it is one more
/// than the largest index (or `n` when given). Rejects self-loops, negative or
/// non-finite weights and a pair listed twice with different weights.
Matrix read_edge_list(std::istream& is, std::optional<int> n = std::nullopt);

/// Comma-separated rows, floats at 17 significant digits.
void write_csv(std::ostream& os, const Matrix& m);

/// Every row must have the column count of the first (or `cols`). Lines
/// starting with '#' and blank lines are skipped.
Matrix read_csv(std::istream& is, std::optional<int> cols = std::nullopt);

/// Mask list: `i j m_1 ... m_T` for every support pair.
void write_masks(std::ostream& os, const MaskSet& masks);
MaskSet read_masks(std::istream& is, int layer_count);

Matrix load_edge_list(const std::filesystem::path& path, std::optional<int> n = std::nullopt);
void save_edge_list(const std::filesystem::path& path, const Matrix& weights);
Matrix load_csv(const std::filesystem::path& path, std::optional<int> cols = std::nullopt);
void save_csv(const std::filesystem::path& path, const Matrix& m);

/// Layer files plus optional names (defaulting to the file stem).
MultiLayerGraph load_layers(const std::vector<std::filesystem::path>& paths, std::optional<int> n = std::nullopt);

/// Instance directory: manifest.json, layer_<t>.edges, global.edges,
/// masks.txt and signals.csv.
void save_instance(const std::filesystem::path& dir, const SynthInstance& inst);
SynthInstance load_instance(const std::filesystem::path& dir);

/// JSON text for results. Weight matrices are written as edge arrays.
std::string ml_result_json(const MultiLayerGraph& ml, const MlResult& result);
std::string learned_graph_json(const std::string& method, const LearnedGraph& result);
std::string conv_result_json(const ConvResult& result);

/// Reads the global graph back from any of the result documents above.
GlobalGraph global_from_result_json(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace graphmask
