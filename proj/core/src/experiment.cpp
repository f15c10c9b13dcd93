#include "graphmask/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "graphmask/error.hpp"
#include "graphmask/parallel.hpp"
#include "graphmask/rng.hpp"

namespace graphmask {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double gl_gamma(const MethodSettings& s, const Matrix& x) {
  return s.gl_gamma ? *s.gl_gamma : auto_gamma(x, s.gl_gamma_factor);
}

const std::vector<std::string> kSynthMetrics = {"f_score", "precision", "recall", "mse", "rse", "mask_f"};

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Ml: return "ml";
    case Method::MlReduced: return "ml-reduced";
    case Method::GlSigrep: return "gl-sigrep";
    case Method::GlInformed: return "gl-informed";
    case Method::GlConv: return "gl-conv";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (to_string(m) == name) return m;
  throw ValidationError("unknown method '" + name + "'");
}

std::vector<Method> all_methods() {
  return {Method::Ml, Method::MlReduced, Method::GlSigrep, Method::GlInformed, Method::GlConv};
}

MethodOutput run_method(Method m, const MultiLayerGraph& ml, const Matrix& x, const MethodSettings& s) {
  const double trace = s.trace ? *s.trace : static_cast<double>(ml.size());
  switch (m) {
    case Method::Ml:
    case Method::MlReduced: {
      MlConfig cfg;
      cfg.gamma = s.ml_gamma;
      cfg.trace = trace;
      cfg.use_corrective = m == Method::Ml;
      cfg.qp = s.qp;
      MlResult r = solve_ml(ml, x, cfg);
      return {m, r.global, r.masks, r.stats};
    }
    case Method::GlSigrep: {
      LearnedGraph r = solve_gl_sigrep(x, gl_gamma(s, x), trace, s.qp);
      return {m, r.global, std::nullopt, r.stats};
    }
    case Method::GlInformed: {
      LearnedGraph r = solve_gl_informed(ml, x, gl_gamma(s, x), trace, s.qp);
      return {m, r.global, std::nullopt, r.stats};
    }
    case Method::GlConv: {
      ConvResult r = solve_gl_conv(ml, x, s.conv_beta, trace, s.qp);
      return {m, r.global, std::nullopt, r.stats};
    }
  }
  throw ValidationError("unknown method");
}

std::vector<TrialMetrics> run_trial(const SynthInstance& inst, const std::vector<Method>& methods,
                                    const MethodSettings& settings) {
  std::vector<TrialMetrics> out;
  out.reserve(methods.size());
  for (Method m : methods) {
    TrialMetrics t;
    t.method = m;
    try {
      MethodOutput r = run_method(m, inst.layers, inst.signals, settings);
      t.edges = edge_report(r.global, inst.true_global);
      t.weights = weight_report(r.global, inst.true_global);
      if (r.masks) t.masks = mask_report(inst.layers, *r.masks, inst.true_masks);
      t.ok = true;
    } catch (const Error& e) {
      t.error = e.what();
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Coverability: return "coverability";
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::Signals: return "signals";
    case SweepAxis::Snr: return "snr";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::Coverability, SweepAxis::Gamma, SweepAxis::Signals, SweepAxis::Snr})
    if (to_string(a) == name) return a;
  throw ValidationError("unknown sweep axis '" + name + "'");
}

double scheduled_gamma(double coverability) {
  constexpr double eps = 1e-9;
  if (coverability <= 0.75 + eps) return 100.0;
  if (coverability <= 0.8 + eps) return 1e4;
  if (coverability <= 0.9 + eps) return 1e5;
  return 1e6;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  if (methods.empty()) throw ValidationError("sweep needs at least one method");
  if (repetitions < 1) throw ValidationError("repetitions must be positive");
  for (double v : values) {
    switch (axis) {
      case SweepAxis::Coverability:
        if (!(v > 0.0 && v <= 1.0)) throw ValidationError("coverability values must lie in (0, 1]");
        break;
      case SweepAxis::Gamma:
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("gamma values must be positive");
        break;
      case SweepAxis::Signals:
        if (v < 1.0 || v != std::floor(v)) throw ValidationError("signal counts must be positive integers");
        break;
      case SweepAxis::Snr:
        if (std::isnan(v)) throw ValidationError("snr values must be numbers");
        break;
    }
  }
  base.validate();
}

int SweepTable::metric_index(const std::string& name) const {
  for (std::size_t k = 0; k < metrics.size(); ++k)
    if (metrics[k] == name) return static_cast<int>(k);
  return -1;
}

const SweepRow* SweepTable::find(double value, const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method && std::abs(r.value - value) <= 1e-12 * std::max(1.0, std::abs(value))) return &r;
  return nullptr;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  const std::size_t nr = static_cast<std::size_t>(spec.repetitions);
  std::vector<std::vector<TrialMetrics>> results(nv * nr);

  parallel_for(
      nv * nr,
      [&](std::size_t job) {
        const std::size_t vi = job / nr;
        const std::size_t r = job % nr;
        const double v = spec.values[vi];
        SynthConfig cfg = spec.base;
        MethodSettings settings = spec.settings;
        cfg.seed = derive_seed(spec.seed, "trial", r);
        switch (spec.axis) {
          case SweepAxis::Coverability:
            cfg.coverability = v;
            if (spec.gamma_schedule) settings.ml_gamma = scheduled_gamma(v);
            break;
          case SweepAxis::Gamma: settings.ml_gamma = v; break;
          case SweepAxis::Signals:
            cfg.k_signals = static_cast<int>(v);
            if (spec.gamma_schedule) settings.ml_gamma = scheduled_gamma(cfg.coverability);
            break;
          case SweepAxis::Snr:
            cfg.snr_db = v;
            if (spec.gamma_schedule) settings.ml_gamma = scheduled_gamma(cfg.coverability);
            break;
        }
        try {
          const SynthInstance inst = generate_instance(cfg);
          results[job] = run_trial(inst, spec.methods, settings);
        } catch (const Error& e) {
          std::vector<TrialMetrics> failed(spec.methods.size());
          for (std::size_t m = 0; m < failed.size(); ++m) {
            failed[m].method = spec.methods[m];
            failed[m].error = e.what();
          }
          results[job] = std::move(failed);
        }
      },
      spec.threads);

  SweepTable table;
  table.axis = to_string(spec.axis);
  table.metrics = kSynthMetrics;
  for (std::size_t vi = 0; vi < nv; ++vi) {
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      SweepRow row;
      row.value = spec.values[vi];
      row.method = to_string(spec.methods[m]);
      std::vector<double> sum(kSynthMetrics.size(), 0.0);
      int mask_trials = 0;
      for (std::size_t r = 0; r < nr; ++r) {
        const TrialMetrics& t = results[vi * nr + r][m];
        if (!t.ok) {
          ++row.failures;
          continue;
        }
        ++row.trials;
        sum[0] += t.edges.f_score;
        sum[1] += t.edges.precision;
        sum[2] += t.edges.recall;
        sum[3] += t.weights.mse;
        sum[4] += t.weights.rse;
        if (t.masks) {
          sum[5] += t.masks->f_score;
          ++mask_trials;
        }
      }
      row.metrics.assign(kSynthMetrics.size(), kNaN);
      if (row.trials > 0)
        for (std::size_t k = 0; k < 5; ++k) row.metrics[k] = sum[k] / row.trials;
      if (mask_trials > 0) row.metrics[5] = sum[5] / mask_trials;
      table.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
  return table;
}

WeatherExperimentResult run_weather_experiment(const StationTable& table, const WeatherExperimentConfig& cfg) {
  table.validate();
  const MeasurementSelection sel = select_measurement(table, cfg.measurement);
  if (sel.monthly.rows() < 2) throw ValidationError("fewer than two stations with complete " + cfg.measurement);
  const MultiLayerGraph layers = layers_from_features(subset_features(table, sel.kept), cfg.sparsity);
  const double n = static_cast<double>(sel.monthly.rows());

  GraphLearner learner = [&](const Matrix& train) {
    std::vector<std::pair<std::string, GlobalGraph>> out;
    MlConfig ml;
    ml.gamma = cfg.ml_gamma;
    ml.trace = n;
    out.emplace_back("ml", solve_ml_full(layers, train, ml).global);
    const double g = auto_gamma(train, cfg.gl_gamma_factor);
    out.emplace_back("gl-sigrep", solve_gl_sigrep(train, g, n).global);
    out.emplace_back("gl-informed", solve_gl_informed(layers, train, g, n).global);
    out.emplace_back("gl-conv", solve_gl_conv(layers, train, cfg.conv_beta, n).global);
    return out;
  };

  WeatherExperimentResult res;
  res.inpaint = inpaint_experiment(sel.monthly, learner, cfg.holdout, cfg.inpaint_gamma, cfg.gamma_override, cfg.threads);
  res.dropped = sel.dropped;
  res.stations = static_cast<int>(sel.monthly.rows());
  res.columns = static_cast<int>(sel.monthly.cols());
  return res;
}

OfficeData prepare_office(const RelationTable& table, const OfficeExperimentConfig& cfg) {
  table.validate();
  ActorGroups groups = derive_groups(table, cfg.anchor, cfg.signal);
  if (groups.a.empty() || groups.b.empty()) throw ValidationError("empty actor group");
  if (cfg.layers.empty()) throw ValidationError("no layer relations given");
  std::vector<GraphLayer> layers;
  for (const auto& name : cfg.layers) layers.push_back(induced_layer(table, name, groups.a, cfg.normalize_layers));
  Matrix x = bipartite_signals(table, cfg.signal, groups);
  EdgeSet truth = induced_edges(table, cfg.signal, groups.a);
  return {std::move(groups), MultiLayerGraph(std::move(layers)), std::move(x), std::move(truth)};
}

namespace {

OfficeScore score_edges(const std::string& method, const EdgeSet& e, const EdgeSet& truth) {
  OfficeScore s;
  s.method = method;
  s.edges = edge_report(e, truth);
  s.jaccard = e.empty() && truth.empty() ? 1.0 : jaccard(e, truth);
  s.edge_count = e.size();
  return s;
}

MethodSettings office_settings(const OfficeExperimentConfig& cfg, int n) {
  MethodSettings s;
  s.ml_gamma = cfg.ml_gamma;
  s.gl_gamma_factor = cfg.gl_gamma_factor;
  s.trace = cfg.trace ? *cfg.trace : static_cast<double>(n);
  s.qp = cfg.qp;
  return s;
}

}  // namespace

OfficeExperimentResult run_office_experiment(const RelationTable& table, const OfficeExperimentConfig& cfg) {
  const OfficeData d = prepare_office(table, cfg);
  const MethodSettings s = office_settings(cfg, d.layers.size());
  const Method ml_method = d.signals.cols() < cfg.reduced_below ? Method::MlReduced : Method::Ml;

  OfficeExperimentResult res;
  res.group_a = static_cast<int>(d.groups.a.size());
  res.group_b = static_cast<int>(d.groups.b.size());
  res.coverability = d.truth.empty() ? 0.0 : coverability(d.truth, d.layers.union_edges());

  MlConfig mc;
  mc.gamma = s.ml_gamma;
  mc.trace = s.trace;
  mc.use_corrective = ml_method == Method::Ml;
  mc.qp = s.qp;
  const MlResult ml = solve_ml(d.layers, d.signals, mc);
  res.scores.push_back(score_edges("ml", ml.global.edges(), d.truth));
  res.ml_contributions = ml.layer_contributions;
  for (Method m : {Method::GlSigrep, Method::GlInformed, Method::GlConv})
    res.scores.push_back(score_edges(to_string(m), run_method(m, d.layers, d.signals, s).global.edges(), d.truth));
  res.scores.push_back(score_edges("union", d.layers.union_edges(), d.truth));
  for (const auto& layer : d.layers.layers()) res.scores.push_back(score_edges(layer.name(), layer.edges(), d.truth));
  return res;
}

SweepTable run_office_signal_sweep(const RelationTable& table, const OfficeExperimentConfig& cfg,
                                   const std::vector<int>& ks, int draws, std::uint64_t seed, int threads) {
  if (ks.empty()) throw ValidationError("signal sweep needs at least one K");
  if (draws < 1) throw ValidationError("draws must be positive");
  const OfficeData d = prepare_office(table, cfg);
  const int kmax = static_cast<int>(d.signals.cols());
  for (int k : ks)
    if (k < 1 || k > kmax) throw ValidationError("K must lie in [1, " + std::to_string(kmax) + "]");
  const MethodSettings s = office_settings(cfg, d.layers.size());
  const std::vector<std::string> names = {"ml", "gl-sigrep", "gl-informed"};

  struct Cell {
    double f[3] = {0, 0, 0};
    double j[3] = {0, 0, 0};
    bool ok[3] = {false, false, false};
  };
  const std::size_t nd = static_cast<std::size_t>(draws);
  std::vector<Cell> cells(ks.size() * nd);

  parallel_for(
      cells.size(),
      [&](std::size_t job) {
        const int k = ks[job / nd];
        const std::size_t draw = job % nd;
        std::vector<int> cols(static_cast<std::size_t>(kmax));
        std::iota(cols.begin(), cols.end(), 0);
        Rng rng(derive_seed(seed, "office-draw", static_cast<std::uint64_t>(k) * 1000003ULL + draw));
        std::shuffle(cols.begin(), cols.end(), rng);
        cols.resize(static_cast<std::size_t>(k));
        std::sort(cols.begin(), cols.end());
        Matrix x(d.signals.rows(), k);
        for (int c = 0; c < k; ++c) x.col(c) = d.signals.col(cols[static_cast<std::size_t>(c)]);

        const Method ml_method = k < cfg.reduced_below ? Method::MlReduced : Method::Ml;
        const Method methods[3] = {ml_method, Method::GlSigrep, Method::GlInformed};
        Cell& cell = cells[job];
        for (int m = 0; m < 3; ++m) {
          try {
            const OfficeScore sc = score_edges(names[static_cast<std::size_t>(m)],
                                               run_method(methods[m], d.layers, x, s).global.edges(), d.truth);
            cell.f[m] = sc.edges.f_score;
            cell.j[m] = sc.jaccard;
            cell.ok[m] = true;
          } catch (const Error&) {
          }
        }
      },
      threads);

  SweepTable out;
  out.axis = "signals";
  out.metrics = {"f_score", "jaccard"};
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    for (int m = 0; m < 3; ++m) {
      SweepRow row;
      row.value = ks[ki];
      row.method = names[static_cast<std::size_t>(m)];
      double fs = 0, js = 0;
      for (std::size_t dr = 0; dr < nd; ++dr) {
        const Cell& c = cells[ki * nd + dr];
        if (!c.ok[m]) {
          ++row.failures;
          continue;
        }
        ++row.trials;
        fs += c.f[m];
        js += c.j[m];
      }
      row.metrics = {row.trials ? fs / row.trials : kNaN, row.trials ? js / row.trials : kNaN};
      out.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
  return out;
}

}  // namespace graphmask
