#include <cstdio>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <graphmask/error.hpp>
#include <graphmask/inference.hpp>

#include "commands.hpp"
#include "json_config.hpp"

using namespace graphmask::cli;

namespace {

CLI::App* add_command(CLI::App& app, const char* name, const char* desc) {
  CLI::App* sub = app.add_subcommand(name, desc);
  sub->fallthrough();
  return sub;
}

std::string command_name(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (argv[i][0] != '-') return argv[i];
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph learning from multi-layer graphs and smooth signals"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>(command_name(argc, argv)));
  app.set_config("--config", "", "JSON file supplying any flag of the command");
  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;

  SynthArgs synth;
  {
    auto* c = add_command(app, "synth", "Generate a synthetic instance directory");
    c->add_option("--n", synth.n, "Vertices")->capture_default_str();
    c->add_option("--k", synth.k, "Signals")->capture_default_str();
    c->add_option("--coverability", synth.coverability, "Target coverability in (0, 1]")->capture_default_str();
    c->add_option("--snr", synth.snr, "Signal-to-noise ratio in dB");
    c->add_option("--sigma", synth.sigma, "Gaussian kernel width")->capture_default_str();
    c->add_option("--edge-quantile", synth.edge_quantile, "Share of pairs kept as layer edges");
    c->add_option("--tau", synth.tau, "Kernel weight above which edges are reserved")->capture_default_str();
    c->add_option("--seed", synth.seed)->capture_default_str();
    c->add_option("--out", synth.out, "Output directory")->required();
    commands.emplace_back(c, [&] { return run_synth(synth); });
  }

  LearnArgs learn;
  {
    auto* c = add_command(app, "learn", "Learn a global graph with one method");
    c->add_option("--method", learn.method)
        ->check(CLI::IsMember({"ml", "ml-reduced", "gl-sigrep", "gl-informed", "gl-conv"}))
        ->capture_default_str();
    c->add_option("--gamma", learn.gamma, "Regularization weight (absolute)");
    c->add_option("--gamma-factor", learn.gamma_factor, "Baseline gamma relative to the centered signal energy")
        ->capture_default_str();
    c->add_option("--beta", learn.beta, "Weight penalty of gl-conv")->capture_default_str();
    c->add_option("--trace", learn.trace, "Target volume (default: vertex count)");
    c->add_option("--instance", learn.instance, "Synthetic instance directory");
    c->add_option("--layers", learn.layers, "Layer edge lists");
    c->add_option("--signals", learn.signals, "Signal CSV, one row per vertex");
    c->add_option("--relations", learn.relations, "Relation table directory");
    c->add_option("--anchor", learn.anchor)->capture_default_str();
    c->add_option("--signal", learn.signal)->capture_default_str();
    c->add_option("--layer-relations", learn.layer_relations)->capture_default_str();
    c->add_option("--out", learn.out, "Result JSON");
    commands.emplace_back(c, [&] { return run_learn(learn); });
  }

  EvalArgs eval;
  {
    auto* c = add_command(app, "eval", "Score methods or saved results on a synthetic instance");
    c->add_option("--instance", eval.instance)->required();
    c->add_option("--result", eval.results, "Result JSON files to score");
    c->add_option("--methods", eval.methods);
    c->add_option("--ml-gamma", eval.ml_gamma, "Default follows the coverability schedule");
    c->add_option("--gamma-factor", eval.gamma_factor)->capture_default_str();
    c->add_option("--beta", eval.beta)->capture_default_str();
    c->add_option("--json", eval.json);
    commands.emplace_back(c, [&] { return run_eval(eval); });
  }

  SweepArgs sweep;
  {
    auto* c = add_command(app, "sweep", "Run a parameter grid with repeated seeded trials");
    c->add_option("--axis", sweep.axis)
        ->check(CLI::IsMember({"coverability", "gamma", "signals", "snr"}))
        ->capture_default_str();
    c->add_option("--values", sweep.values)->required()->delimiter(',');
    c->add_option("--methods", sweep.methods)->delimiter(',');
    c->add_option("--reps", sweep.reps, "Repetitions per grid point")->capture_default_str();
    c->add_option("--seed", sweep.seed)->capture_default_str();
    c->add_option("--n", sweep.n)->capture_default_str();
    c->add_option("--k", sweep.k)->capture_default_str();
    c->add_option("--coverability", sweep.coverability)->capture_default_str();
    c->add_option("--snr", sweep.snr);
    c->add_option("--ml-gamma", sweep.ml_gamma, "Fixed ml gamma instead of the coverability schedule");
    c->add_flag("--no-schedule", sweep.no_schedule);
    c->add_option("--gamma-factor", sweep.gamma_factor)->capture_default_str();
    c->add_option("--beta", sweep.beta)->capture_default_str();
    c->add_option("--threads", sweep.threads, "Worker count (0: hardware, capped by GRAPHMASK_THREADS)")
        ->capture_default_str();
    c->add_option("--relations", sweep.relations, "Relation table directory for a signal-count sweep");
    c->add_option("--out", sweep.out, "Output prefix for .txt, .tsv and .json tables");
    commands.emplace_back(c, [&] { return run_sweep(sweep); });
  }

  InpaintArgs inpaint;
  {
    auto* c = add_command(app, "inpaint", "Leave-one-column-out inpainting on a station table");
    c->add_option("--stations", inpaint.stations, "Station table directory")->required();
    c->add_option("--measurement", inpaint.measurement)->capture_default_str();
    c->add_option("--sparsity", inpaint.sparsity)->capture_default_str();
    c->add_option("--ml-gamma", inpaint.ml_gamma)->capture_default_str();
    c->add_option("--gamma-factor", inpaint.gamma_factor)->capture_default_str();
    c->add_option("--beta", inpaint.beta)->capture_default_str();
    c->add_option("--gamma", inpaint.gamma, "Inpainting regularization")->capture_default_str();
    c->add_option("--override", inpaint.overrides, "method=gamma");
    c->add_option("--holdout", inpaint.holdout, "Share of vertices hidden")->capture_default_str();
    c->add_option("--seed", inpaint.seed)->capture_default_str();
    c->add_option("--threads", inpaint.threads)->capture_default_str();
    c->add_option("--json", inpaint.json);
    commands.emplace_back(c, [&] { return run_inpaint(inpaint); });
  }

  SocialArgs social;
  {
    auto* c = add_command(app, "social", "Recover a relation inside the anchor group");
    c->add_option("--relations", social.relations)->required();
    c->add_option("--anchor", social.anchor)->capture_default_str();
    c->add_option("--signal", social.signal)->capture_default_str();
    c->add_option("--layer-relations", social.layer_relations)->capture_default_str();
    c->add_option("--gamma", social.gamma)->capture_default_str();
    c->add_option("--trace", social.trace);
    c->add_option("--gamma-factor", social.gamma_factor)->capture_default_str();
    c->add_option("--reduced-below", social.reduced_below)->capture_default_str();
    c->add_option("--json", social.json);
    commands.emplace_back(c, [&] { return run_social(social); });
  }

  PlotArgs plot;
  {
    auto* c = add_command(app, "plot", "Render a sweep table as an SVG line chart");
    c->add_option("--table", plot.table, "Sweep table JSON")->required();
    c->add_option("--metric", plot.metric)->capture_default_str();
    c->add_option("--out", plot.out, "SVG file")->required();
    c->add_option("--tsv", plot.tsv, "Also write columnar data");
    c->add_flag("--log-x", plot.log_x);
    commands.emplace_back(c, [&] { return run_plot(plot); });
  }

  FixtureArgs fixture;
  {
    auto* c = add_command(app, "fixture", "Write a bundled synthetic dataset");
    c->add_option("--kind", fixture.kind)->check(CLI::IsMember({"weather", "office"}))->required();
    c->add_option("--out", fixture.out)->required();
    c->add_option("--seed", fixture.seed);
    commands.emplace_back(c, [&] { return run_fixture(fixture); });
  }

  try {
    app.parse(argc, argv);
    for (auto& [sub, run] : commands)
      if (sub->parsed()) return run();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const graphmask::VolumeRangeError& e) {
    std::fprintf(stderr, "infeasible: %s\nfeasible volume interval: [%.10g, %.10g]\n", e.what(), e.range().lower,
                 e.range().upper);
    return kInfeasible;
  } catch (const graphmask::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const graphmask::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const graphmask::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kOk;
}
