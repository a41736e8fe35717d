#include "uqcd/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "uqcd/config.hpp"
#include "uqcd/divergence.hpp"
#include "uqcd/error.hpp"
#include "uqcd/mixture.hpp"
#include "uqcd/sim.hpp"
#include "uqcd/verify.hpp"
#include "uqcd/weights.hpp"

namespace uqcd {

using nlohmann::json;

namespace {

constexpr const char* kTool = "uqcd";

class NonConvergence : public Error {
 public:
  using Error::Error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Context {
  ExperimentConfig cfg;
  const CommandOptions& opts;
  std::ostream& out;
  std::ostream& err;
  std::unique_ptr<MixtureModel> model;
  std::optional<KktReport> kkt;

  Context(ExperimentConfig c, const CommandOptions& o, std::ostream& os, std::ostream& es)
      : cfg(std::move(c)), opts(o), out(os), err(es) {}

  json meta() const {
    return json{{"tool", kTool}, {"version", UQCD_VERSION}, {"seed", cfg.seed}, {"config", to_json(cfg)}};
  }

  void csv_meta(std::ostream& os) const {
    os << "# tool: " << kTool << ' ' << UQCD_VERSION << '\n';
    os << "# seed: " << cfg.seed << '\n';
    os << "# config: " << to_json(cfg).dump() << '\n';
  }

  SolverOptions solver_options() const {
    SolverOptions s;
    s.tol = cfg.solver.tol;
    s.max_iters = cfg.solver.max_iters;
    return s;
  }

  const KktReport& optimal() {
    if (!kkt) {
      kkt = solve_optimal_weights(*model, solver_options(), cfg.support_guard, cfg.solver.mc_reps, cfg.seed);
    }
    return *kkt;
  }

  DetectorConfig resolve(const DetectorDecl& d) {
    DetectorConfig c;
    c.algorithm = d.algorithm;
    c.label = d.label;
    c.threshold = resolve_threshold(d, model->types());
    if (d.algorithm == Algorithm::weighted) {
      if (d.beta) {
        c.beta = WeightVector(*d.beta);
      } else {
        const auto& r = optimal();
        if (!r.converged) {
          throw NonConvergence("optimal weight solver did not reach the KKT tolerance (residual " +
                               num(r.residual) + ")");
        }
        c.beta = r.beta;
      }
    } else if (d.algorithm == Algorithm::bayes_uniform) {
      c.beta = WeightVector::uniform(model->types());
    }
    return c;
  }

  // Writes to the output path when one is set, else to `out`.
  template <typename F>
  void emit(F&& write) {
    const auto path = opts.out ? opts.out : cfg.output;
    if (path) {
      std::ofstream f(*path);
      if (!f) throw ConfigError("output", "cannot open '" + *path + "' for writing");
      write(f);
    } else {
      write(out);
    }
  }
};

json detector_json(const DetectorConfig& d) {
  json j{{"algorithm", to_string(d.algorithm)}, {"label", d.label}, {"threshold_nats", d.threshold}};
  if (d.beta) j["beta"] = d.beta->values();
  return j;
}

int cmd_divergence(Context& ctx) {
  const auto r = information_report(*ctx.model, ctx.cfg.support_guard, 100'000, ctx.cfg.seed);
  json j = ctx.meta();
  j["per_type"] = r.per_type;
  j["i_star"] = r.i_star;
  j["argmin_type"] = r.argmin_type + 1;
  j["exact"] = r.exact;
  if (!r.exact) {
    j["mc_stderr"] = r.mc_stderr;
    j["mc_reps"] = r.mc_reps;
  }
  ctx.emit([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kExitOk;
}

int cmd_solve_weights(Context& ctx) {
  const auto& r = ctx.optimal();
  json j = ctx.meta();
  j["beta"] = r.beta.values();
  j["i_beta"] = r.i_beta;
  j["per_type_drift"] = r.per_type_drift;
  j["kkt_residual"] = r.residual;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["exact"] = r.exact;
  if (!r.exact) j["mc_reps"] = r.mc_reps;
  j["objective_history"] = r.objective_history;
  ctx.emit([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!r.converged) {
    ctx.err << "solve-weights: KKT residual " << num(r.residual) << " above tolerance\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_run_detector(Context& ctx) {
  const auto& o = ctx.opts;
  DetectorDecl decl;
  if (!ctx.cfg.detectors.empty()) decl = ctx.cfg.detectors.front();
  if (o.algorithm) {
    try {
      decl.algorithm = algorithm_from_string(*o.algorithm);
    } catch (const ParameterError& e) {
      throw ConfigError("--algorithm", e.what());
    }
    decl.label = *o.algorithm;
    if (decl.algorithm == Algorithm::weighted && !decl.beta) decl.optimal_beta = true;
    if (decl.algorithm != Algorithm::weighted) decl.beta.reset();
  } else if (ctx.cfg.detectors.empty()) {
    throw ConfigError("detectors", "run-detector needs a detector (config or --algorithm)");
  }
  if (o.threshold && o.gamma) throw ConfigError("--threshold", "give at most one of --threshold and --gamma");
  if (o.threshold) {
    if (!(*o.threshold > 0.0)) throw ConfigError("--threshold", "must be positive");
    decl.threshold = o.threshold;
    decl.gamma.reset();
  }
  if (o.gamma) {
    if (!(*o.gamma > 1.0)) throw ConfigError("--gamma", "must exceed 1");
    decl.gamma = o.gamma;
    decl.threshold.reset();
  }
  if (!decl.threshold && !decl.gamma) throw ConfigError("--threshold", "a threshold or gamma is required");
  if (o.change_point) {
    if (*o.change_point < 1) throw ConfigError("--change-point", "must be >= 1");
    ctx.cfg.change_point = *o.change_point;
  }
  if (o.horizon) {
    if (*o.horizon < 1) throw ConfigError("--horizon", "must be >= 1");
    ctx.cfg.horizon = *o.horizon;
  }
  if (!ctx.cfg.trajectory) throw ConfigError("trajectory", "run-detector needs a trajectory");

  const DetectorConfig det = ctx.resolve(decl);
  SimOptions so;
  so.threads = o.threads;
  Simulator sim(*ctx.model, so);
  const auto path = sim.evolution_path(det, *ctx.cfg.trajectory, ctx.cfg.change_point, ctx.cfg.horizon,
                                       ctx.cfg.seed);

  double pre_max = 0.0;
  for (std::uint64_t t = 1; t <= path.statistic.size() && t < ctx.cfg.change_point; ++t) {
    pre_max = std::max(pre_max, path.statistic[t - 1]);
  }
  json j = ctx.meta();
  j["detector"] = detector_json(det);
  j["trajectory"] = trajectory_to_json(*ctx.cfg.trajectory);
  j["change_point"] = ctx.cfg.change_point;
  j["horizon"] = ctx.cfg.horizon;
  j["stop_time"] = path.first_crossing ? json(*path.first_crossing) : json(nullptr);
  const bool false_alarm = path.first_crossing && *path.first_crossing < ctx.cfg.change_point;
  j["false_alarm"] = false_alarm;
  if (path.first_crossing && !false_alarm) j["post_change_samples"] = *path.first_crossing - ctx.cfg.change_point + 1;
  j["pre_change_max"] = pre_max;
  j["final_statistic"] = path.statistic.empty() ? 0.0 : path.statistic.back();

  auto write_trace = [&](std::ostream& os) {
    ctx.csv_meta(os);
    os << "# detector: " << detector_json(det).dump() << '\n';
    os << "step,statistic,stopped\n";
    for (std::size_t t = 1; t <= path.statistic.size(); ++t) {
      const bool stopped = path.first_crossing && t >= *path.first_crossing;
      os << t << ',' << num(path.statistic[t - 1]) << ',' << (stopped ? 1 : 0) << '\n';
    }
  };
  if (o.trace_path) {
    std::ofstream f(*o.trace_path);
    if (!f) throw ConfigError("--trace-path", "cannot open '" + *o.trace_path + "' for writing");
    write_trace(f);
    j["trace_path"] = *o.trace_path;
  } else if (o.trace) {
    j["trace"] = path.statistic;
  }
  ctx.emit([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kExitOk;
}

void write_oc_csv(Context& ctx, const std::vector<OcRow>& rows, const std::string& add_note) {
  ctx.emit([&](std::ostream& os) {
    ctx.csv_meta(os);
    os << "# add: " << add_note << '\n';
    os << "# censoring cap: " << ctx.cfg.cap << " steps; censored runs enter the means at the cap\n";
    os << "detector,threshold_nats,reps,add_mean,add_stderr,arl_mean,arl_stderr,censored\n";
    for (const auto& r : rows) {
      os << r.detector << ',' << num(r.threshold) << ',' << r.add.reps << ',' << num(r.add.mean) << ','
         << num(r.add.std_error) << ',' << num(r.arl.mean) << ',' << num(r.arl.std_error) << ','
         << (r.add.censored + r.arl.censored) << '\n';
    }
  });
}

int cmd_simulate(Context& ctx, bool curve) {
  auto& cfg = ctx.cfg;
  if (cfg.detectors.empty()) throw ConfigError("detectors", "at least one detector is required");
  if (curve && cfg.thresholds.empty()) throw ConfigError("thresholds", "oc-curve needs a threshold grid");
  const bool proxy = !cfg.trajectories.empty();
  if (!proxy) {
    if (!cfg.trajectory) throw ConfigError("trajectory", "a trajectory or a trajectory set is required");
    if (cfg.trajectory->kind() == Trajectory::Kind::none) {
      throw ConfigError("trajectory", "delay estimation needs an anomaly trajectory");
    }
  }
  std::vector<DetectorConfig> dets;
  for (const auto& d : cfg.detectors) {
    if (curve && !d.threshold && !d.gamma) continue;
    dets.push_back(ctx.resolve(d));
  }
  SimOptions so;
  so.cap = cfg.cap;
  so.threads = ctx.opts.threads;
  Simulator sim(*ctx.model, so);

  auto run = [&](std::span<const DetectorConfig> ds, std::span<const double> thr) {
    if (proxy) return sim.operating_characteristic(ds, cfg.trajectories, thr, cfg.reps, cfg.seed);
    return sim.operating_characteristic(ds, *cfg.trajectory, thr, cfg.reps, cfg.seed);
  };
  std::vector<OcRow> rows;
  if (curve) {
    rows = run(dets, cfg.thresholds);
  } else {
    for (const auto& d : dets) {
      const double thr = d.threshold;
      auto r = run(std::span<const DetectorConfig>(&d, 1), std::span<const double>(&thr, 1));
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  std::string note;
  if (proxy) {
    note = "worst-case proxy: max of ADD over trajectories";
    for (const auto& t : cfg.trajectories) note += ' ' + t.describe();
  } else {
    note = "trajectory " + cfg.trajectory->describe();
  }
  write_oc_csv(ctx, rows, note);
  return kExitOk;
}

int cmd_verify(Context& ctx) {
  VerifyOptions vo;
  vo.seed = ctx.cfg.seed;
  vo.support_guard = ctx.cfg.support_guard;
  vo.solver = ctx.solver_options();
  vo.mc_reps = ctx.cfg.solver.mc_reps;
  const auto checks = run_property_suite(*ctx.model, vo);
  bool all = true;
  json list = json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"detail", c.detail}});
    if (!c.passed) ctx.err << "verify: " << c.name << " failed: " << c.detail << '\n';
  }
  json j = ctx.meta();
  j["checks"] = list;
  j["all_passed"] = all;
  ctx.emit([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int dispatch_text(const std::string& subcommand, const std::string& config_text, const CommandOptions& opts,
                  std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = parse_config(config_text);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads < 1) throw ConfigError("--threads", "must be >= 1");
    Context ctx(std::move(cfg), opts, out, err);
    ctx.model = std::make_unique<MixtureModel>(ctx.cfg.network);

    if (subcommand == "divergence") return cmd_divergence(ctx);
    if (subcommand == "solve-weights") return cmd_solve_weights(ctx);
    if (subcommand == "run-detector") return cmd_run_detector(ctx);
    if (subcommand == "simulate") return cmd_simulate(ctx, false);
    if (subcommand == "oc-curve") return cmd_simulate(ctx, true);
    if (subcommand == "verify") return cmd_verify(ctx);
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RatioUnbounded& e) {
    err << "numerical guard [mixture]: " << e.what() << '\n';
    return kExitNumericalGuard;
  } catch (const DivergenceInfinite& e) {
    err << "numerical guard [divergence]: " << e.what() << '\n';
    return kExitNumericalGuard;
  } catch (const SupportGuardExceeded& e) {
    err << "numerical guard [divergence]: " << e.what() << '\n';
    return kExitNumericalGuard;
  } catch (const EnumerationTooLarge& e) {
    err << "numerical guard [labels]: " << e.what() << '\n';
    return kExitNumericalGuard;
  } catch (const NonConvergence& e) {
    err << "non-convergence [weights]: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int dispatch(const std::string& subcommand, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  std::ifstream f(opts.config_path);
  if (!f) {
    err << "config error: cannot read '" << opts.config_path << "'\n";
    return kExitConfig;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return dispatch_text(subcommand, ss.str(), opts, out, err);
}

}  // namespace uqcd
