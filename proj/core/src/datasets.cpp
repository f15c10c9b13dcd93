#include "graphmask/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "graphmask/error.hpp"

namespace graphmask {

namespace fs = std::filesystem;

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table t;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split_csv(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(path.string() + ": expected " + std::to_string(t.header.size()) + " columns, found " +
                           std::to_string(cells.size()),
                       line);
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line);
  }
  if (t.header.empty()) throw ParseError(path.string() + ": missing header");
  return t;
}

double parse_cell(const std::string& s, int line, bool allow_missing) {
  if (s.empty() || s == "NA" || s == "nan") {
    if (allow_missing) return kMissing;
    throw ParseError("missing value", line);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("invalid number '" + s + "'", line);
  return v;
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\n\r") != std::string::npos)
    throw ValidationError("invalid identifier '" + id + "'");
}

std::string cell(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

const Matrix& StationTable::feature(const std::string& notion) const {
  for (const auto& [name, m] : features)
    if (name == notion) return m;
  throw ValidationError("unknown feature notion '" + notion + "'");
}

const Matrix& StationTable::measurement(const std::string& type) const {
  for (const auto& [name, m] : measurements)
    if (name == type) return m;
  throw ValidationError("unknown measurement type '" + type + "'");
}

void StationTable::validate() const {
  const auto n = static_cast<Eigen::Index>(ids.size());
  std::set<std::string> uniq;
  for (const auto& id : ids) {
    check_id(id);
    if (!uniq.insert(id).second) throw ValidationError("duplicate station id '" + id + "'");
  }
  for (const auto& [name, m] : features) {
    if (m.rows() != n) throw DimensionError("feature block '" + name + "' has " + std::to_string(m.rows()) + " rows");
    if (!m.allFinite()) throw ValidationError("feature block '" + name + "' has missing values");
  }
  for (const auto& [name, m] : measurements)
    if (m.rows() != n || m.cols() != kMonths + 1)
      throw DimensionError("measurement block '" + name + "' must be " + std::to_string(n) + " x 13");
}

MeasurementSelection select_measurement(const StationTable& table, const std::string& type) {
  const Matrix& m = table.measurement(type);
  MeasurementSelection sel;
  for (int i = 0; i < table.size(); ++i) {
    if (m.row(i).head(kMonths).array().isNaN().any()) sel.dropped.push_back(table.ids[static_cast<std::size_t>(i)]);
    else sel.kept.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(sel.kept.size());
  sel.monthly.resize(k, kMonths);
  sel.yearly.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const int i = sel.kept[static_cast<std::size_t>(r)];
    sel.monthly.row(r) = m.row(i).head(kMonths);
    const double y = m(i, kMonths);
    sel.yearly(r) = std::isnan(y) ? m.row(i).head(kMonths).mean() : y;
  }
  return sel;
}

std::vector<std::pair<std::string, Matrix>> subset_features(const StationTable& table, const std::vector<int>& rows) {
  std::vector<std::pair<std::string, Matrix>> out;
  for (const auto& [name, m] : table.features) {
    Matrix s(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) s.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
    out.emplace_back(name, std::move(s));
  }
  return out;
}

MultiLayerGraph layers_from_features(const std::vector<std::pair<std::string, Matrix>>& features, double sparsity) {
  if (features.empty()) throw ValidationError("at least one feature block is required");
  if (!(sparsity > 0.0 && sparsity < 1.0)) throw ValidationError("sparsity target must lie in (0, 1)");
  std::vector<GraphLayer> layers;
  for (const auto& [name, f] : features) {
    const auto n = static_cast<int>(f.rows());
    if (n < 2) throw ValidationError("layer construction needs at least two vertices");
    struct Pair {
      double d;
      Edge e;
    };
    std::vector<Pair> pairs;
    pairs.reserve(pair_count(n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.push_back({(f.row(i) - f.row(j)).squaredNorm(), Edge(i, j)});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(pairs.size()) + 1e-9)));
    const double w = static_cast<double>(n) / (2.0 * static_cast<double>(m));
    Matrix adj = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k) adj(pairs[k].e.i, pairs[k].e.j) = adj(pairs[k].e.j, pairs[k].e.i) = w;
    layers.emplace_back(std::move(adj), name);
  }
  return MultiLayerGraph(std::move(layers));
}

StationTable load_station_table(const fs::path& dir) {
  StationTable table;
  const Table st = read_table(dir / "stations.csv");
  if (st.header.size() < 2 || st.header[0] != "id") throw ParseError("stations.csv: header must start with 'id'");
  const auto n = static_cast<Eigen::Index>(st.rows.size());
  std::vector<std::pair<std::string, std::vector<std::size_t>>> blocks;
  for (std::size_t c = 1; c < st.header.size(); ++c) {
    const std::string notion = st.header[c].substr(0, st.header[c].find('.'));
    auto it = std::find_if(blocks.begin(), blocks.end(), [&](const auto& b) { return b.first == notion; });
    if (it == blocks.end()) blocks.push_back({notion, {c}});
    else it->second.push_back(c);
  }
  for (const auto& [notion, cols] : blocks) {
    Matrix m(n, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index r = 0; r < n; ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        m(r, static_cast<Eigen::Index>(c)) =
            parse_cell(st.rows[static_cast<std::size_t>(r)][cols[c]], st.lines[static_cast<std::size_t>(r)], false);
    table.features.emplace_back(notion, std::move(m));
  }
  for (const auto& row : st.rows) table.ids.push_back(row[0]);

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    if (!index.emplace(table.ids[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate station id '" + table.ids[i] + "'");
  }
  const Table ms = read_table(dir / "measurements.csv");
  if (ms.header.size() != static_cast<std::size_t>(kMonths) + 3 || ms.header[0] != "id" || ms.header[1] != "measurement")
    throw ParseError("measurements.csv: header must be id,measurement,m01..m12,year");
  for (std::size_t r = 0; r < ms.rows.size(); ++r) {
    const auto& row = ms.rows[r];
    const auto it = index.find(row[0]);
    if (it == index.end()) throw ParseError("unknown station '" + row[0] + "'", ms.lines[r]);
    auto block = std::find_if(table.measurements.begin(), table.measurements.end(),
                              [&](const auto& b) { return b.first == row[1]; });
    if (block == table.measurements.end()) {
      table.measurements.emplace_back(row[1], Matrix::Constant(n, kMonths + 1, kMissing));
      block = std::prev(table.measurements.end());
    }
    for (int c = 0; c <= kMonths; ++c)
      block->second(it->second, c) = parse_cell(row[static_cast<std::size_t>(c) + 2], ms.lines[r], true);
  }
  table.validate();
  return table;
}

void save_station_table(const fs::path& dir, const StationTable& table) {
  table.validate();
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "stations.csv");
    if (!out) throw Error("cannot write " + (dir / "stations.csv").string());
    out << "id";
    for (const auto& [name, m] : table.features) {
      if (m.cols() == 1) out << ',' << name;
      else
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << name << '.' << (c == 0 ? "x" : c == 1 ? "y" : std::to_string(c));
    }
    out << '\n';
    for (int i = 0; i < table.size(); ++i) {
      out << table.ids[static_cast<std::size_t>(i)];
      for (const auto& [name, m] : table.features)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << cell(m(i, c));
      out << '\n';
    }
  }
  std::ofstream out(dir / "measurements.csv");
  if (!out) throw Error("cannot write " + (dir / "measurements.csv").string());
  out << "id,measurement";
  for (int c = 1; c <= kMonths; ++c) out << ",m" << (c < 10 ? "0" : "") << c;
  out << ",year\n";
  for (const auto& [name, m] : table.measurements)
    for (int i = 0; i < table.size(); ++i) {
      out << table.ids[static_cast<std::size_t>(i)] << ',' << name;
      for (int c = 0; c <= kMonths; ++c) out << ',' << cell(m(i, c));
      out << '\n';
    }
}

const EdgeSet& RelationTable::relation(const std::string& name) const {
  const auto it = relations.find(name);
  if (it == relations.end()) throw ValidationError("unknown relation '" + name + "'");
  return it->second;
}

int RelationTable::actor_index(const std::string& id) const {
  const auto it = std::find(actors.begin(), actors.end(), id);
  if (it == actors.end()) throw ValidationError("unknown actor '" + id + "'");
  return static_cast<int>(it - actors.begin());
}

void RelationTable::validate() const {
  std::set<std::string> uniq;
  for (const auto& a : actors) {
    check_id(a);
    if (!uniq.insert(a).second) throw ValidationError("duplicate actor id '" + a + "'");
  }
  for (const auto& [name, edges] : relations) {
    check_id(name);
    for (const auto& e : edges)
      if (e.i < 0 || e.j >= size() || e.i == e.j) throw ValidationError("relation '" + name + "' has an invalid pair");
  }
}

ActorGroups derive_groups(const RelationTable& table, const std::string& anchor, const std::string& signal) {
  const int n = table.size();
  std::vector<char> in_a(static_cast<std::size_t>(n), 0), in_b(static_cast<std::size_t>(n), 0);
  for (const auto& e : table.relation(anchor)) in_a[static_cast<std::size_t>(e.i)] = in_a[static_cast<std::size_t>(e.j)] = 1;
  for (const auto& e : table.relation(signal)) {
    const bool ai = in_a[static_cast<std::size_t>(e.i)] != 0, aj = in_a[static_cast<std::size_t>(e.j)] != 0;
    if (ai && !aj) in_b[static_cast<std::size_t>(e.j)] = 1;
    if (aj && !ai) in_b[static_cast<std::size_t>(e.i)] = 1;
  }
  ActorGroups g;
  for (int v = 0; v < n; ++v) {
    if (in_a[static_cast<std::size_t>(v)]) g.a.push_back(v);
    else if (in_b[static_cast<std::size_t>(v)]) g.b.push_back(v);
  }
  if (g.a.empty()) throw ValidationError("group A is empty: no actor has a '" + anchor + "' edge");
  if (g.b.empty()) throw ValidationError("group B is empty: no outside actor shares a '" + signal + "' edge with A");
  return g;
}

Matrix bipartite_signals(const RelationTable& table, const std::string& relation, const ActorGroups& groups) {
  if (groups.a.empty() || groups.b.empty()) throw ValidationError("bipartite signals need two nonempty groups");
  const EdgeSet& rel = table.relation(relation);
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(groups.a.size()), static_cast<Eigen::Index>(groups.b.size()));
  for (std::size_t r = 0; r < groups.a.size(); ++r)
    for (std::size_t c = 0; c < groups.b.size(); ++c)
      if (groups.a[r] != groups.b[c] && rel.contains(Edge(groups.a[r], groups.b[c])))
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
  return x;
}

EdgeSet induced_edges(const RelationTable& table, const std::string& relation, const std::vector<int>& members) {
  std::map<int, int> pos;
  for (std::size_t k = 0; k < members.size(); ++k) pos[members[k]] = static_cast<int>(k);
  std::vector<Edge> out;
  for (const auto& e : table.relation(relation)) {
    const auto a = pos.find(e.i), b = pos.find(e.j);
    if (a != pos.end() && b != pos.end()) out.emplace_back(a->second, b->second);
  }
  return EdgeSet(std::move(out));
}

GraphLayer induced_layer(const RelationTable& table, const std::string& relation, const std::vector<int>& members,
                         bool normalize) {
  const auto n = static_cast<int>(members.size());
  const EdgeSet edges = induced_edges(table, relation, members);
  const double w = normalize && !edges.empty() ? static_cast<double>(n) / (2.0 * static_cast<double>(edges.size())) : 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (const auto& e : edges) m(e.i, e.j) = m(e.j, e.i) = w;
  return GraphLayer(std::move(m), relation);
}

RelationTable load_relation_table(const fs::path& dir) {
  RelationTable table;
  const Table at = read_table(dir / "actors.csv");
  if (at.header.empty() || at.header[0] != "id") throw ParseError("actors.csv: header must start with 'id'");
  std::map<std::string, int> index;
  for (std::size_t r = 0; r < at.rows.size(); ++r) {
    if (!index.emplace(at.rows[r][0], static_cast<int>(r)).second)
      throw ParseError("duplicate actor '" + at.rows[r][0] + "'", at.lines[r]);
    table.actors.push_back(at.rows[r][0]);
  }
  const Table rt = read_table(dir / "relations.csv");
  if (rt.header != std::vector<std::string>{"relation", "a", "b"})
    throw ParseError("relations.csv: header must be relation,a,b");
  std::map<std::string, std::vector<Edge>> rel;
  for (std::size_t r = 0; r < rt.rows.size(); ++r) {
    const auto& row = rt.rows[r];
    const auto a = index.find(row[1]), b = index.find(row[2]);
    if (a == index.end() || b == index.end())
      throw ParseError("unknown actor '" + (a == index.end() ? row[1] : row[2]) + "'", rt.lines[r]);
    if (a->second == b->second) throw ParseError("self relation for '" + row[1] + "'", rt.lines[r]);
    rel[row[0]].emplace_back(a->second, b->second);
  }
  for (auto& [name, edges] : rel) table.relations.emplace(name, EdgeSet(std::move(edges)));
  table.validate();
  return table;
}

void save_relation_table(const fs::path& dir, const RelationTable& table) {
  table.validate();
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "actors.csv");
    if (!out) throw Error("cannot write " + (dir / "actors.csv").string());
    out << "id\n";
    for (const auto& a : table.actors) out << a << '\n';
  }
  std::ofstream out(dir / "relations.csv");
  if (!out) throw Error("cannot write " + (dir / "relations.csv").string());
  out << "relation,a,b\n";
  for (const auto& [name, edges] : table.relations)
    for (const auto& e : edges)
      out << name << ',' << table.actors[static_cast<std::size_t>(e.i)] << ',' << table.actors[static_cast<std::size_t>(e.j)]
          << '\n';
}

}  // namespace graphmask
