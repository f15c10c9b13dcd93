#pragma once

#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace graphmask::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInfeasible = 3, kNumeric = 4 };

/// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthArgs {
  int n = 20;
  int k = 50;
  double coverability = 1.0;
  std::optional<double> snr;
  double sigma = 0.45;
  std::optional<double> edge_quantile;
  double tau = 0.8;
  std::uint64_t seed = 1;
  std::string out;
};

struct LearnArgs {
  std::string method = "ml";
  std::optional<double> gamma;
  double gamma_factor = 0.01;
  double beta = 1.0;
  std::optional<double> trace;
  std::string instance;
  std::vector<std::string> layers;
  std::string signals;
  std::string relations;
  std::string anchor = "facebook";
  std::string signal = "lunch";
  std::vector<std::string> layer_relations = {"facebook", "work"};
  std::string out;
};

struct EvalArgs {
  std::string instance;
  std::vector<std::string> results;
  std::vector<std::string> methods;
  std::optional<double> ml_gamma;
  double gamma_factor = 0.01;
  double beta = 1.0;
  std::string json;
};

struct SweepArgs {
  std::string axis = "coverability";
  std::vector<double> values;
  std::vector<std::string> methods;
  int reps = 20;
  std::uint64_t seed = 1;
  int n = 20;
  int k = 50;
  double coverability = 1.0;
  std::optional<double> snr;
  std::optional<double> ml_gamma;
  bool no_schedule = false;
  double gamma_factor = 0.01;
  double beta = 1.0;
  int threads = 0;
  std::string relations;
  std::string out;
};

struct InpaintArgs {
  std::string stations;
  std::string measurement = "temperature";
  double sparsity = 0.10;
  double ml_gamma = 1000.0;
  double gamma_factor = 0.01;
  double beta = 1.0;
  double gamma = 1.0;
  std::vector<std::string> overrides;
  double holdout = 0.5;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string json;
};

struct SocialArgs {
  std::string relations;
  std::string anchor = "facebook";
  std::string signal = "lunch";
  std::vector<std::string> layer_relations = {"facebook", "work"};
  double gamma = 0.6;
  std::optional<double> trace;
  double gamma_factor = 0.01;
  int reduced_below = 10;
  std::string json;
};

struct PlotArgs {
  std::string table;
  std::string metric = "f_score";
  std::string out;
  std::string tsv;
  bool log_x = false;
};

struct FixtureArgs {
  std::string kind;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int run_synth(const SynthArgs& a);
int run_learn(const LearnArgs& a);
int run_eval(const EvalArgs& a);
int run_sweep(const SweepArgs& a);
int run_inpaint(const InpaintArgs& a);
int run_social(const SocialArgs& a);
int run_plot(const PlotArgs& a);
int run_fixture(const FixtureArgs& a);

}  // namespace graphmask::cli
