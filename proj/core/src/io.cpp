#include "graphmask/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "graphmask/error.hpp"

namespace graphmask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t k = 0;
    while (k < s.size()) {
      while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
      if (k >= s.size()) break;
      std::size_t e = k;
      while (e < s.size() && s[e] != ' ' && s[e] != '\t') ++e;
      out.push_back(s.substr(k, e - k));
      k = e;
    }
    return out;
  }
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k)
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  return out;
}

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("invalid number '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  return v;
}

int parse_index(std::string_view tok, int line) {
  long long v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0 || v > 100000000)
    throw ParseError("invalid vertex index '" + std::string(tok) + "'", line);
  return static_cast<int>(v);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

json edges_json(const Matrix& w) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = i + 1; j < w.cols(); ++j)
      if (w(i, j) > 0.0) arr.push_back({i, j, w(i, j)});
  return arr;
}

json stats_json(const SolveStats& s) {
  return {{"status", to_string(s.status)},
          {"iterations", s.iterations},
          {"objective", s.objective},
          {"variables", s.variables},
          {"kkt_max_rel", s.kkt.max_rel()}};
}

json config_json(const SynthConfig& c) {
  json j = {{"n", c.n},
            {"sigma", c.sigma},
            {"edge_quantile", c.edge_quantile},
            {"tau", c.tau},
            {"coverability", c.coverability},
            {"k_signals", c.k_signals},
            {"seed", c.seed},
            {"max_retries", c.max_retries}};
  j["snr_db"] = c.snr_db ? json(*c.snr_db) : json(nullptr);
  return j;
}

SynthConfig config_from_json(const json& j) {
  SynthConfig c;
  c.n = j.at("n").get<int>();
  c.sigma = j.at("sigma").get<double>();
  c.edge_quantile = j.at("edge_quantile").get<double>();
  c.tau = j.at("tau").get<double>();
  c.coverability = j.at("coverability").get<double>();
  c.k_signals = j.at("k_signals").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_retries = j.value("max_retries", c.max_retries);
  if (j.contains("snr_db") && !j["snr_db"].is_null()) c.snr_db = j["snr_db"].get<double>();
  return c;
}

}  // namespace

void write_edge_list(std::ostream& os, const Matrix& weights) {
  validate_weights(weights);
  os << "# vertices " << weights.rows() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = i + 1; j < weights.cols(); ++j)
      if (weights(i, j) > 0.0) os << i << ' ' << j << ' ' << weights(i, j) << '\n';
}

Matrix read_edge_list(std::istream& is, std::optional<int> n) {
  struct Entry {
    int i, j;
    double w;
    int line;
  };
  std::vector<Entry> entries;
  std::optional<int> declared;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const auto toks = split(s.substr(1), ' ');
      if (toks.size() == 2 && toks[0] == "vertices") declared = parse_index(toks[1], line);
      continue;
    }
    const auto toks = split(s, ' ');
    if (toks.size() != 3) throw ParseError("expected 'i j w', found " + std::to_string(toks.size()) + " fields", line);
    Entry e{parse_index(toks[0], line), parse_index(toks[1], line), parse_double(toks[2], line), line};
    if (e.i == e.j) throw ParseError("self-loop on vertex " + std::to_string(e.i), line);
    if (e.w < 0.0) throw ParseError("negative weight", line);
    entries.push_back(e);
  }
  int size = 0;
  for (const auto& e : entries) size = std::max(size, std::max(e.i, e.j) + 1);
  if (n && declared && *n != *declared)
    throw DimensionError("edge list declares " + std::to_string(*declared) + " vertices, expected " +
                         std::to_string(*n));
  const int count = n ? *n : (declared ? *declared : size);
  if (size > count)
    throw ParseError("vertex index " + std::to_string(size - 1) + " out of range for " + std::to_string(count) +
                     " vertices");
  if (count < 1) throw ParseError("edge list defines no vertices");
  Matrix w = Matrix::Zero(count, count);
  std::map<std::pair<int, int>, double> seen;
  for (const auto& e : entries) {
    const Edge p(e.i, e.j);
    auto [it, fresh] = seen.emplace(std::pair{p.i, p.j}, e.w);
    if (!fresh && it->second != e.w) throw ParseError("pair listed twice with different weights", e.line);
    w(p.i, p.j) = w(p.j, p.i) = e.w;
  }
  return w;
}

void write_csv(std::ostream& os, const Matrix& m) {
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
}

Matrix read_csv(std::istream& is, std::optional<int> cols) {
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> width;
  if (cols) width = static_cast<std::size_t>(*cols);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto toks = split(s, ',');
    if (width && toks.size() != *width)
      throw ParseError("expected " + std::to_string(*width) + " columns, found " + std::to_string(toks.size()), line);
    width = toks.size();
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) row.push_back(parse_double(t, line));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(*width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < *width; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_masks(std::ostream& os, const MaskSet& masks) {
  os << "# layers " << masks.layer_count() << '\n' << std::setprecision(17);
  const auto& v = masks.values();
  for (std::size_t k = 0; k < masks.support().size(); ++k) {
    const auto& e = masks.support().edges()[k];
    os << e.i << ' ' << e.j;
    for (int t = 0; t < masks.layer_count(); ++t) os << ' ' << v(t, static_cast<Eigen::Index>(k));
    os << '\n';
  }
}

MaskSet read_masks(std::istream& is, int layer_count) {
  std::vector<Edge> edges;
  std::vector<std::vector<double>> vals;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto toks = split(s, ' ');
    if (toks.size() != static_cast<std::size_t>(layer_count) + 2)
      throw ParseError("expected " + std::to_string(layer_count + 2) + " fields, found " + std::to_string(toks.size()),
                       line);
    const int i = parse_index(toks[0], line), j = parse_index(toks[1], line);
    if (i == j) throw ParseError("self-loop in mask list", line);
    std::vector<double> v;
    for (int t = 0; t < layer_count; ++t) v.push_back(parse_double(toks[static_cast<std::size_t>(t) + 2], line));
    edges.emplace_back(i, j);
    vals.push_back(std::move(v));
  }
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (edges[order[k]] == edges[order[k - 1]]) throw ParseError("pair listed twice in mask list");
  Matrix m(layer_count, static_cast<Eigen::Index>(edges.size()));
  std::vector<Edge> sorted;
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted.push_back(edges[order[k]]);
    for (int t = 0; t < layer_count; ++t) m(t, static_cast<Eigen::Index>(k)) = vals[order[k]][static_cast<std::size_t>(t)];
  }
  return {EdgeSet(std::move(sorted)), std::move(m)};
}

Matrix load_edge_list(const fs::path& path, std::optional<int> n) {
  auto in = open_in(path);
  try {
    return read_edge_list(in, n);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_edge_list(const fs::path& path, const Matrix& weights) {
  auto out = open_out(path);
  write_edge_list(out, weights);
}

Matrix load_csv(const fs::path& path, std::optional<int> cols) {
  auto in = open_in(path);
  try {
    return read_csv(in, cols);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_csv(const fs::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_csv(out, m);
}

MultiLayerGraph load_layers(const std::vector<fs::path>& paths, std::optional<int> n) {
  if (paths.empty()) throw ValidationError("at least one layer file is required");
  std::vector<GraphLayer> layers;
  for (const auto& p : paths) {
    Matrix w = load_edge_list(p, n);
    if (!n) n = static_cast<int>(w.rows());
    layers.emplace_back(std::move(w), p.stem().string());
  }
  return MultiLayerGraph(std::move(layers));
}

void save_instance(const fs::path& dir, const SynthInstance& inst) {
  fs::create_directories(dir);
  json layers = json::array();
  for (int t = 0; t < inst.layers.layer_count(); ++t) {
    const std::string file = "layer_" + std::to_string(t + 1) + ".edges";
    save_edge_list(dir / file, inst.layers.layer(t).weights());
    layers.push_back({{"name", inst.layers.layer(t).name()}, {"file", file}});
  }
  save_edge_list(dir / "global.edges", inst.true_global.weights());
  {
    auto out = open_out(dir / "masks.txt");
    write_masks(out, inst.true_masks);
  }
  save_csv(dir / "signals.csv", inst.signals);
  if (inst.coords.size() > 0) save_csv(dir / "coords.csv", inst.coords);

  json reserved = json::array();
  for (const auto& e : inst.reserved) reserved.push_back({e.i, e.j});
  json manifest = {{"format", kFormatVersion},
                   {"kind", "synth-instance"},
                   {"n", inst.layers.size()},
                   {"k", inst.signals.cols()},
                   {"config", config_json(inst.config)},
                   {"layers", layers},
                   {"global", "global.edges"},
                   {"masks", "masks.txt"},
                   {"signals", "signals.csv"},
                   {"coords", inst.coords.size() > 0 ? json("coords.csv") : json(nullptr)},
                   {"coverability_actual", inst.coverability_actual},
                   {"layer_scale", inst.layer_scale},
                   {"groups", inst.groups},
                   {"reserved", reserved}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

SynthInstance load_instance(const fs::path& dir) {
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ParseError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    if (m.at("format").get<std::string>() != kFormatVersion)
      throw ValidationError("unsupported manifest format '" + m.at("format").get<std::string>() + "'");
    const int n = m.at("n").get<int>();
    std::vector<GraphLayer> layers;
    for (const auto& l : m.at("layers"))
      layers.emplace_back(load_edge_list(dir / l.at("file").get<std::string>(), n), l.value("name", std::string{}));
    MultiLayerGraph ml(std::move(layers));
    Matrix gw = load_edge_list(dir / m.at("global").get<std::string>(), n);
    MaskSet masks = [&] {
      auto in = open_in(dir / m.at("masks").get<std::string>());
      return read_masks(in, ml.layer_count());
    }();
    Matrix x = load_csv(dir / m.at("signals").get<std::string>());
    if (x.rows() != n)
      throw DimensionError("signals have " + std::to_string(x.rows()) + " rows, manifest says " + std::to_string(n));
    if (m.contains("k") && x.cols() != m["k"].get<Eigen::Index>())
      throw DimensionError("signals have " + std::to_string(x.cols()) + " columns, manifest says " +
                           std::to_string(m["k"].get<long>()));
    Matrix coords;
    if (m.contains("coords") && !m["coords"].is_null()) coords = load_csv(dir / m["coords"].get<std::string>(), 2);
    std::vector<Edge> reserved;
    for (const auto& e : m.value("reserved", json::array())) reserved.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return {std::move(ml),
            std::move(masks),
            GlobalGraph::from_weights(gw),
            std::move(x),
            m.value("coverability_actual", 1.0),
            m.value("layer_scale", 1.0),
            m.value("groups", std::vector<int>{}),
            EdgeSet(std::move(reserved)),
            std::move(coords),
            config_from_json(m.at("config"))};
  } catch (const json::exception& e) {
    throw ParseError((dir / "manifest.json").string() + ": " + e.what());
  }
}

std::string ml_result_json(const MultiLayerGraph& ml, const MlResult& r) {
  json names = json::array();
  for (const auto& l : ml.layers()) names.push_back(l.name());
  json masks = json::array();
  for (std::size_t k = 0; k < r.masks.support().size(); ++k) {
    const auto& e = r.masks.support().edges()[k];
    json row = {e.i, e.j};
    for (int t = 0; t < r.masks.layer_count(); ++t) row.push_back(r.masks.values()(t, static_cast<Eigen::Index>(k)));
    masks.push_back(row);
  }
  json j = {{"format", kFormatVersion},
            {"method", r.use_corrective ? "ml" : "ml-reduced"},
            {"n", r.global.size()},
            {"gamma", r.use_corrective ? json(r.gamma) : json(nullptr)},
            {"trace", r.trace},
            {"stats", stats_json(r.stats)},
            {"layer_names", names},
            {"layer_contributions", r.layer_contributions},
            {"corrective_frobenius_squared", r.corrective.frobenius_squared()},
            {"warnings", r.warnings},
            {"edges", edges_json(r.global.weights())},
            {"masks", masks}};
  return j.dump(2) + "\n";
}

std::string learned_graph_json(const std::string& method, const LearnedGraph& r) {
  json j = {{"format", kFormatVersion},
            {"method", method},
            {"n", r.global.size()},
            {"trace", r.global.trace()},
            {"stats", stats_json(r.stats)},
            {"warnings", r.warnings},
            {"edges", edges_json(r.global.weights())}};
  return j.dump(2) + "\n";
}

std::string conv_result_json(const ConvResult& r) {
  std::vector<double> alphas(r.alphas.data(), r.alphas.data() + r.alphas.size());
  json j = {{"format", kFormatVersion},
            {"method", "gl-conv"},
            {"n", r.global.size()},
            {"trace", r.global.trace()},
            {"stats", stats_json(r.stats)},
            {"alphas", alphas},
            {"edges", edges_json(r.global.weights())}};
  return j.dump(2) + "\n";
}

GlobalGraph global_from_result_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatVersion) throw ValidationError("unsupported result format");
    const int n = j.at("n").get<int>();
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : j.at("edges")) {
      const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
      if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ValidationError("invalid edge in result");
      w(a, b) = w(b, a) = e.at(2).get<double>();
    }
    return GlobalGraph::from_weights(w);
  } catch (const json::exception& e) {
    throw ParseError(std::string("result document: ") + e.what());
  }
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace graphmask
