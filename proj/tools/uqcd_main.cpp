#include <iostream>

#include <CLI11.hpp>

#include "uqcd/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quickest change detection with unlabeled samples"};
  app.set_version_flag("--version", std::string("uqcd ") + UQCD_VERSION);
  app.require_subcommand(1);

  uqcd::CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  std::string algorithm, trace_path;
  double threshold = 0.0, gamma = 0.0;
  std::uint64_t change_point = 0, horizon = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output file (default: config output, else stdout)");
    sub->add_option("--seed", seed, "base seed, overrides the config");
    sub->add_option("--threads", opts.threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
  };

  const struct {
    const char* name;
    const char* help;
  } subs[] = {
      {"divergence", "per-type divergences I_k and I*"},
      {"solve-weights", "optimal mixture weights with KKT certificate"},
      {"run-detector", "one seeded detector run with an evolution trace"},
      {"simulate", "ADD and ARL for each detector at its threshold"},
      {"oc-curve", "ADD and ARL over the threshold grid"},
      {"verify", "run the invariant suite on the configured network"},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (std::string(s.name) == "run-detector") {
      sub->add_flag("--trace", opts.trace, "include the statistic trace");
      sub->add_option("--algorithm", algorithm, "gm, weighted or bayes-uniform");
      auto* thr = sub->add_option("--threshold", threshold, "threshold in nats");
      auto* gam = sub->add_option("--gamma", gamma, "target run length; threshold is calibrated");
      thr->excludes(gam);
      sub->add_option("--change-point", change_point, "first anomalous step");
      sub->add_option("--horizon", horizon, "number of steps");
      sub->add_option("--trace-path", trace_path, "write the trace as CSV (step,statistic,stopped)");
    }
  }

  CLI11_PARSE(app, argc, argv);

  auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) opts.out = out;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->get_name() == "run-detector") {
    if (sub->count("--algorithm")) opts.algorithm = algorithm;
    if (sub->count("--threshold")) opts.threshold = threshold;
    if (sub->count("--gamma")) opts.gamma = gamma;
    if (sub->count("--change-point")) opts.change_point = change_point;
    if (sub->count("--horizon")) opts.horizon = horizon;
    if (sub->count("--trace-path")) opts.trace_path = trace_path;
  }
  return uqcd::dispatch(sub->get_name(), opts, std::cout, std::cerr);
}
