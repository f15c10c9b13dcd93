#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "graphmask/graph.hpp"

namespace graphmask {

/// Weather-style data: per-station feature blocks (one per proximity notion)
/// and measurement blocks of 12 monthly values plus a yearly average.
/// Missing measurements are NaN.
struct StationTable {
  std::vector<std::string> ids;
  std::vector<std::pair<std::string, Matrix>> features;  ///< notion -> N x d
  std::vector<std::pair<std::string, Matrix>> measurements;  ///< type -> N x 13

  int size() const noexcept { return static_cast<int>(ids.size()); }
  const Matrix& feature(const std::string& notion) const;
  const Matrix& measurement(const std::string& type) const;
  void validate() const;
};

inline constexpr int kMonths = 12;

struct MeasurementSelection {
  Matrix monthly;                    ///< kept stations x 12
  Vector yearly;
  std::vector<int> kept;             ///< row indices into the table
  std::vector<std::string> dropped;  ///< ids of stations with missing values
};

/// Rows of `type` without missing values.
MeasurementSelection select_measurement(const StationTable& table, const std::string& type);

/// Feature blocks restricted to `rows`.
std::vector<std::pair<std::string, Matrix>> subset_features(const StationTable& table, const std::vector<int>& rows);

/// One unweighted layer per notion: the max(1, floor(s * N(N-1)/2)) closest
/// pairs in Euclidean distance (ties broken by pair order), scaled so the
/// layer volume sum_ij W_ij equals N.
MultiLayerGraph layers_from_features(const std::vector<std::pair<std::string, Matrix>>& features, double sparsity);

/// stations.csv holds `id,<notion>[.<component>]...`; measurements.csv holds
/// `id,measurement,m01..m12,year` with empty or NA cells for missing values.
StationTable load_station_table(const std::filesystem::path& dir);
void save_station_table(const std::filesystem::path& dir, const StationTable& table);

/// Social-style data: typed undirected relations among named actors.
struct RelationTable {
  std::vector<std::string> actors;
  std::map<std::string, EdgeSet> relations;

  int size() const noexcept { return static_cast<int>(actors.size()); }
  const EdgeSet& relation(const std::string& name) const;
  int actor_index(const std::string& id) const;
  void validate() const;
};

struct ActorGroups {
  std::vector<int> a;  ///< sorted actor indices
  std::vector<int> b;
};

/// A: actors with at least one `anchor` edge. B: other actors sharing a
/// `signal` edge with someone in A.
ActorGroups derive_groups(const RelationTable& table, const std::string& anchor, const std::string& signal);

/// |A| x |B| binary matrix, 1 iff the pair shares `relation`.
Matrix bipartite_signals(const RelationTable& table, const std::string& relation, const ActorGroups& groups);

/// Edges of `relation` inside `members`, reindexed to positions in `members`.
EdgeSet induced_edges(const RelationTable& table, const std::string& relation, const std::vector<int>& members);

/// Binary layer on `members` scaled to volume |members| (left binary when `normalize` is false).
GraphLayer induced_layer(const RelationTable& table, const std::string& relation, const std::vector<int>& members,
                         bool normalize = true);

/// actors.csv holds `id`; relations.csv holds `relation,a,b`.
RelationTable load_relation_table(const std::filesystem::path& dir);
void save_relation_table(const std::filesystem::path& dir, const RelationTable& table);

}  // namespace graphmask
