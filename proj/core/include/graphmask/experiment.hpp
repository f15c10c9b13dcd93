#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphmask/datasets.hpp"
#include "graphmask/inference.hpp"
#include "graphmask/inpaint.hpp"
#include "graphmask/metrics.hpp"
#include "graphmask/synth.hpp"

namespace graphmask {

enum class Method { Ml, MlReduced, GlSigrep, GlInformed, GlConv };

std::string to_string(Method m);
/// Accepts ml, ml-reduced, gl-sigrep, gl-informed, gl-conv. Throws ValidationError otherwise.
Method parse_method(const std::string& name);
std::vector<Method> all_methods();

/// Parameters shared by every method in a run.
struct MethodSettings {
  double ml_gamma = 100.0;
  /// Baseline gamma as a factor of the centered signal energy (see auto_gamma).
  double gl_gamma_factor = 0.01;
  std::optional<double> gl_gamma;  ///< absolute baseline gamma, overrides the factor
  double conv_beta = 1.0;
  std::optional<double> trace;     ///< target volume, defaults to N
  QpSettings qp;
};

/// Learned global graph of one method, plus masks for the mask methods.
struct MethodOutput {
  Method method = Method::Ml;
  GlobalGraph global;
  std::optional<MaskSet> masks;
  SolveStats stats;
};

MethodOutput run_method(Method m, const MultiLayerGraph& ml, const Matrix& x, const MethodSettings& s);

struct TrialMetrics {
  Method method = Method::Ml;
  bool ok = false;
  std::string error;
  EdgeClassificationReport edges;
  WeightErrorReport weights;
  std::optional<EdgeClassificationReport> masks;
};

/// Scores every method against the planted graph and masks of `inst`.
/// Solver failures are recorded per method instead of thrown.
std::vector<TrialMetrics> run_trial(const SynthInstance& inst, const std::vector<Method>& methods,
                                    const MethodSettings& settings);

enum class SweepAxis { Coverability, Gamma, Signals, Snr };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& name);

/// Gamma of the mask method at a given coverability: 100 up to 0.75, 1e4 up
/// to 0.8, 1e5 up to 0.9, 1e6 above.
double scheduled_gamma(double coverability);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Coverability;
  std::vector<double> values;
  std::vector<Method> methods = all_methods();
  int repetitions = 20;
  std::uint64_t seed = 1;
  SynthConfig base;
  MethodSettings settings;
  /// Coverability sweeps take ml_gamma from scheduled_gamma.
  bool gamma_schedule = true;
  int threads = 0;

  void validate() const;
};

/// One output line: the mean of each metric over the successful trials.
struct SweepRow {
  double value = 0.0;
  std::string method;
  std::vector<double> metrics;  ///< aligned with SweepTable::metrics; NaN when undefined
  int trials = 0;
  int failures = 0;
};

struct SweepTable {
  std::string axis;
  std::vector<std::string> metrics;
  std::vector<SweepRow> rows;  ///< sorted by value, then method order

  /// Column index of a metric name, or -1.
  int metric_index(const std::string& name) const;
  const SweepRow* find(double value, const std::string& method) const;
};

/// Trial r uses synthetic seed derive_seed(spec.seed, "trial", r) at every grid
/// point, so grid points differ only in the swept parameter.
SweepTable run_sweep(const SweepSpec& spec);

struct WeatherExperimentConfig {
  std::string measurement = "temperature";
  double sparsity = 0.10;
  double ml_gamma = 1000.0;
  double gl_gamma_factor = 0.01;
  double conv_beta = 1.0;
  double inpaint_gamma = 1.0;
  std::map<std::string, double> gamma_override;  ///< inpainting gamma per method
  HoldoutSpec holdout;
  int threads = 0;
};

struct WeatherExperimentResult {
  InpaintExperimentResult inpaint;
  std::vector<std::string> dropped;
  int stations = 0;
  int columns = 0;
};

/// Monthly values of one measurement, layers from every feature notion, and
/// the leave-one-month-out inpainting protocol for ml, gl-sigrep,
/// gl-informed and gl-conv.
WeatherExperimentResult run_weather_experiment(const StationTable& table, const WeatherExperimentConfig& cfg);

struct OfficeExperimentConfig {
  std::string anchor = "facebook";
  std::string signal = "lunch";
  std::vector<std::string> layers = {"facebook", "work"};
  double ml_gamma = 0.6;
  std::optional<double> trace;  ///< defaults to |A|
  double gl_gamma_factor = 0.01;
  /// Below this many signals the mask method runs without the corrective term.
  int reduced_below = 10;
  /// Scale each binary layer to volume |A|; raw 0/1 weights when false.
  bool normalize_layers = true;
  QpSettings qp;
};

/// Layers and signals of the social task.
struct OfficeData {
  ActorGroups groups;
  MultiLayerGraph layers;
  Matrix signals;  ///< |A| x |B|
  EdgeSet truth;   ///< signal relation inside A
};

OfficeData prepare_office(const RelationTable& table, const OfficeExperimentConfig& cfg);

struct OfficeScore {
  std::string method;
  EdgeClassificationReport edges;
  double jaccard = 0.0;
  std::size_t edge_count = 0;
};

struct OfficeExperimentResult {
  int group_a = 0;
  int group_b = 0;
  double coverability = 0.0;
  std::vector<OfficeScore> scores;  ///< ml, gl-sigrep, gl-informed, gl-conv, union, then each layer
  std::vector<double> ml_contributions;
};

OfficeExperimentResult run_office_experiment(const RelationTable& table, const OfficeExperimentConfig& cfg);

/// For each K, `draws` random subsets of K signal columns; mean F-score and
/// Jaccard of ml, gl-sigrep and gl-informed.
SweepTable run_office_signal_sweep(const RelationTable& table, const OfficeExperimentConfig& cfg,
                                   const std::vector<int>& ks, int draws, std::uint64_t seed, int threads = 0);

}  // namespace graphmask
