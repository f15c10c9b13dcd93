#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <graphmask/datasets.hpp>
#include <graphmask/experiment.hpp>
#include <graphmask/fixtures.hpp>
#include <graphmask/inference.hpp>
#include <graphmask/io.hpp>
#include <graphmask/report.hpp>
#include <graphmask/synth.hpp>

namespace graphmask::cli {

namespace fs = std::filesystem;

namespace {

std::vector<Method> methods_or_all(const std::vector<std::string>& names) {
  if (names.empty()) return all_methods();
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

struct LearnInput {
  MultiLayerGraph layers;
  Matrix signals;
};

LearnInput learn_input(const LearnArgs& a) {
  const int sources = !a.instance.empty() + !a.relations.empty() + (!a.layers.empty() || !a.signals.empty());
  if (sources != 1) throw UsageError("give exactly one of --instance, --relations or --layers/--signals");
  if (!a.instance.empty()) {
    SynthInstance inst = load_instance(a.instance);
    return {inst.layers, inst.signals};
  }
  if (!a.relations.empty()) {
    OfficeExperimentConfig cfg;
    cfg.anchor = a.anchor;
    cfg.signal = a.signal;
    cfg.layers = a.layer_relations;
    OfficeData d = prepare_office(load_relation_table(a.relations), cfg);
    return {d.layers, d.signals};
  }
  if (a.layers.empty() || a.signals.empty()) throw UsageError("--layers and --signals go together");
  std::vector<fs::path> paths(a.layers.begin(), a.layers.end());
  MultiLayerGraph ml = load_layers(paths);
  Matrix x = load_csv(a.signals);
  if (x.rows() != ml.size())
    throw UsageError("signals have " + std::to_string(x.rows()) + " rows, layers have " + std::to_string(ml.size()) +
                     " vertices");
  return {ml, x};
}

void print_stats(const char* method, const SolveStats& s) {
  std::printf("method      %s\nstatus      %s\nobjective   %.10g\niterations  %d\nkkt         %.3g\n", method,
              to_string(s.status).c_str(), s.objective, s.iterations, s.kkt.max_rel());
}

void write_if_set(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  write_text(path, text);
}

std::map<std::string, double> parse_overrides(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override must look like method=gamma: " + s);
    try {
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad gamma in override " + s);
    }
  }
  return out;
}

}  // namespace

int run_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.n = a.n;
  cfg.k_signals = a.k;
  cfg.coverability = a.coverability;
  cfg.snr_db = a.snr;
  cfg.sigma = a.sigma;
  if (a.edge_quantile) cfg.edge_quantile = *a.edge_quantile;
  cfg.tau = a.tau;
  cfg.seed = a.seed;
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const SynthInstance inst = generate_instance(cfg);
  save_instance(a.out, inst);
  std::printf("wrote %s: n %d, k %d, layer edges %zu / %zu, global edges %zu, coverability %.4f\n", a.out.c_str(),
              cfg.n, cfg.k_signals, inst.layers.layer(0).edges().size(), inst.layers.layer(1).edges().size(),
              inst.true_global.edges().size(), inst.coverability_actual);
  return kOk;
}

int run_learn(const LearnArgs& a) {
  const Method method = parse_method(a.method);
  const LearnInput in = learn_input(a);
  const double trace = a.trace ? *a.trace : static_cast<double>(in.layers.size());
  std::string doc;
  switch (method) {
    case Method::Ml:
    case Method::MlReduced: {
      MlConfig cfg;
      cfg.gamma = a.gamma ? *a.gamma : 100.0;
      cfg.trace = trace;
      cfg.use_corrective = method == Method::Ml;
      const MlResult r = solve_ml(in.layers, in.signals, cfg);
      print_stats(a.method.c_str(), r.stats);
      std::printf("edges       %zu\n", r.global.edges().size());
      std::vector<std::vector<std::string>> rows;
      for (int t = 0; t < in.layers.layer_count(); ++t) {
        const std::string name = in.layers.layer(t).name().empty() ? "layer " + std::to_string(t) : in.layers.layer(t).name();
        rows.push_back({name, r.layer_contributions.empty() ? "-" : format_number(r.layer_contributions[t])});
      }
      std::cout << aligned_table({"layer", "contribution%"}, rows);
      for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      doc = ml_result_json(in.layers, r);
      break;
    }
    case Method::GlSigrep:
    case Method::GlInformed: {
      const double g = a.gamma ? *a.gamma : auto_gamma(in.signals, a.gamma_factor);
      const LearnedGraph r = method == Method::GlSigrep ? solve_gl_sigrep(in.signals, g, trace)
                                                        : solve_gl_informed(in.layers, in.signals, g, trace);
      print_stats(a.method.c_str(), r.stats);
      std::printf("gamma       %.10g\nedges       %zu\n", g, r.global.edges().size());
      doc = learned_graph_json(a.method, r);
      break;
    }
    case Method::GlConv: {
      const ConvResult r = solve_gl_conv(in.layers, in.signals, a.beta, trace);
      print_stats(a.method.c_str(), r.stats);
      std::printf("alpha      ");
      for (Eigen::Index t = 0; t < r.alphas.size(); ++t) std::printf(" %.6g", r.alphas(t));
      std::printf("\nedges       %zu\n", r.global.edges().size());
      doc = conv_result_json(r);
      break;
    }
  }
  write_if_set(a.out, doc);
  return kOk;
}

int run_eval(const EvalArgs& a) {
  const SynthInstance inst = load_instance(a.instance);
  std::vector<TrialMetrics> trial;
  if (!a.results.empty()) {
    for (const auto& path : a.results) {
      const GlobalGraph g = global_from_result_json(read_text(path));
      TrialMetrics t;
      t.ok = true;
      t.edges = edge_report(g, inst.true_global);
      t.weights = weight_report(g, inst.true_global);
      trial.push_back(t);
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < trial.size(); ++k)
      rows.push_back({a.results[k], format_number(trial[k].edges.precision), format_number(trial[k].edges.recall),
                      format_number(trial[k].edges.f_score), format_number(trial[k].weights.mse),
                      format_number(trial[k].weights.rse)});
    std::cout << aligned_table({"result", "precision", "recall", "f_score", "mse", "rse"}, rows);
    return kOk;
  }
  MethodSettings s;
  s.ml_gamma = a.ml_gamma ? *a.ml_gamma : scheduled_gamma(inst.coverability_actual);
  s.gl_gamma_factor = a.gamma_factor;
  s.conv_beta = a.beta;
  trial = run_trial(inst, methods_or_all(a.methods), s);
  std::cout << trial_text(trial);
  write_if_set(a.json, trial_json(trial));
  return kOk;
}

int run_sweep(const SweepArgs& a) {
  if (a.values.empty()) throw UsageError("--values is required");
  SweepTable table;
  if (!a.relations.empty()) {
    if (a.axis != "signals") throw UsageError("relation data supports only --axis signals");
    OfficeExperimentConfig cfg;
    if (a.ml_gamma) cfg.ml_gamma = *a.ml_gamma;
    cfg.gl_gamma_factor = a.gamma_factor;
    std::vector<int> ks;
    for (double v : a.values) {
      if (v != static_cast<int>(v)) throw UsageError("signal counts must be integers");
      ks.push_back(static_cast<int>(v));
    }
    table = run_office_signal_sweep(load_relation_table(a.relations), cfg, ks, a.reps, a.seed, a.threads);
  } else {
    SweepSpec spec;
    try {
      spec.axis = parse_axis(a.axis);
      spec.methods = methods_or_all(a.methods);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    spec.values = a.values;
    spec.repetitions = a.reps;
    spec.seed = a.seed;
    spec.base.n = a.n;
    spec.base.k_signals = a.k;
    spec.base.coverability = a.coverability;
    spec.base.snr_db = a.snr;
    spec.gamma_schedule = !a.no_schedule && !a.ml_gamma;
    if (a.ml_gamma) spec.settings.ml_gamma = *a.ml_gamma;
    spec.settings.gl_gamma_factor = a.gamma_factor;
    spec.settings.conv_beta = a.beta;
    spec.threads = a.threads;
    try {
      spec.validate();
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    table = graphmask::run_sweep(spec);
  }
  const std::string text = sweep_table_text(table);
  std::cout << text;
  if (!a.out.empty()) {
    write_text(a.out + ".txt", text);
    write_text(a.out + ".tsv", sweep_table_tsv(table));
    write_text(a.out + ".json", sweep_table_json(table));
  }
  return kOk;
}

int run_inpaint(const InpaintArgs& a) {
  WeatherExperimentConfig cfg;
  cfg.measurement = a.measurement;
  cfg.sparsity = a.sparsity;
  cfg.ml_gamma = a.ml_gamma;
  cfg.gl_gamma_factor = a.gamma_factor;
  cfg.conv_beta = a.beta;
  cfg.inpaint_gamma = a.gamma;
  cfg.gamma_override = parse_overrides(a.overrides);
  cfg.holdout.fraction = a.holdout;
  cfg.holdout.seed = a.seed;
  cfg.threads = a.threads;
  const WeatherExperimentResult r = run_weather_experiment(load_station_table(a.stations), cfg);
  std::cout << weather_result_text(r);
  write_if_set(a.json, weather_result_json(r));
  return kOk;
}

int run_social(const SocialArgs& a) {
  OfficeExperimentConfig cfg;
  cfg.anchor = a.anchor;
  cfg.signal = a.signal;
  cfg.layers = a.layer_relations;
  cfg.ml_gamma = a.gamma;
  cfg.trace = a.trace;
  cfg.gl_gamma_factor = a.gamma_factor;
  cfg.reduced_below = a.reduced_below;
  const OfficeExperimentResult r = run_office_experiment(load_relation_table(a.relations), cfg);
  std::cout << office_result_text(r);
  write_if_set(a.json, office_result_json(r));
  return kOk;
}

int run_plot(const PlotArgs& a) {
  const SweepTable t = sweep_table_from_json(read_text(a.table));
  write_text(a.out, sweep_svg(t, a.metric, a.log_x));
  if (!a.tsv.empty()) write_text(a.tsv, sweep_table_tsv(t));
  std::printf("wrote %s\n", a.out.c_str());
  return kOk;
}

int run_fixture(const FixtureArgs& a) {
  if (a.kind == "weather") {
    WeatherFixtureConfig cfg;
    if (a.seed) cfg.seed = *a.seed;
    const StationTable t = make_weather_fixture(cfg);
    save_station_table(a.out, t);
    std::printf("wrote %s: %d stations\n", a.out.c_str(), t.size());
  } else if (a.kind == "office") {
    OfficeFixtureConfig cfg;
    if (a.seed) cfg.seed = *a.seed;
    const RelationTable t = make_office_fixture(cfg);
    save_relation_table(a.out, t);
    std::printf("wrote %s: %d actors\n", a.out.c_str(), t.size());
  } else {
    throw UsageError("--kind must be weather or office");
  }
  return kOk;
}

}  // namespace graphmask::cli
