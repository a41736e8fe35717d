#include "uqcd/config.hpp"

#include <cmath>
#include <set>

#include "uqcd/error.hpp"

namespace uqcd {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  require_object(j, path);
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::uint64_t get_count(const json& j, const std::string& path, std::uint64_t min_value) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  const auto v = j.get<std::uint64_t>();
  if (v < min_value) throw ConfigError(path, "must be >= " + std::to_string(min_value));
  return v;
}

std::vector<double> get_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], index(path, i)));
  return out;
}

struct ParsedDistribution {
  DiscreteDistribution dist;
  json decl;
};

ParsedDistribution parse_distribution(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.contains("binomial")) {
    check_keys(j, path, {"binomial"});
    const std::string bp = join(path, "binomial");
    check_keys(j["binomial"], bp, {"trials", "p"});
    if (!j["binomial"].contains("trials")) throw ConfigError(join(bp, "trials"), "required");
    if (!j["binomial"].contains("p")) throw ConfigError(join(bp, "p"), "required");
    const auto trials = get_count(j["binomial"]["trials"], join(bp, "trials"), 1);
    const double p = get_number(j["binomial"]["p"], join(bp, "p"));
    if (p < 0.0 || p > 1.0) throw ConfigError(join(bp, "p"), "must lie in [0, 1]");
    return {binomial(static_cast<int>(trials), p), json{{"binomial", {{"trials", trials}, {"p", p}}}}};
  }
  check_keys(j, path, {"support", "probs"});
  if (!j.contains("support")) throw ConfigError(join(path, "support"), "required");
  if (!j.contains("probs")) throw ConfigError(join(path, "probs"), "required");
  const auto& js = j["support"];
  if (!js.is_array()) throw ConfigError(join(path, "support"), "expected an array");
  std::vector<int> support;
  for (std::size_t i = 0; i < js.size(); ++i) {
    if (!js[i].is_number_integer()) throw ConfigError(index(join(path, "support"), i), "expected an integer");
    support.push_back(js[i].get<int>());
  }
  auto probs = get_number_array(j["probs"], join(path, "probs"));
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (support[i] <= support[i - 1]) throw ConfigError(join(path, "support"), "must be strictly increasing");
  }
  if (support.size() != probs.size()) throw ConfigError(join(path, "probs"), "length differs from support");
  try {
    auto d = DiscreteDistribution::from_table(support, probs);
    return {std::move(d), json{{"support", support}, {"probs", probs}}};
  } catch (const ParameterError& e) {
    throw ConfigError(join(path, "probs"), e.what());
  }
}

struct ParsedNetwork {
  NetworkSpec net;
  json decl;
};

ParsedNetwork parse_network(const json& j, const std::string& path) {
  check_keys(j, path, {"types"});
  if (!j.contains("types")) throw ConfigError(join(path, "types"), "required");
  const auto& jt = j["types"];
  const std::string tp = join(path, "types");
  if (!jt.is_array() || jt.empty()) throw ConfigError(tp, "expected a non-empty array");
  std::vector<SensorType> types;
  json decl = json::array();
  for (std::size_t k = 0; k < jt.size(); ++k) {
    const std::string p = index(tp, k);
    check_keys(jt[k], p, {"count", "pre", "post"});
    const std::uint64_t count = jt[k].contains("count") ? get_count(jt[k]["count"], join(p, "count"), 1) : 1;
    if (!jt[k].contains("pre")) throw ConfigError(join(p, "pre"), "required");
    if (!jt[k].contains("post")) throw ConfigError(join(p, "post"), "required");
    auto pre = parse_distribution(jt[k]["pre"], join(p, "pre"));
    auto post = parse_distribution(jt[k]["post"], join(p, "post"));
    decl.push_back({{"count", count}, {"pre", pre.decl}, {"post", post.decl}});
    types.push_back({static_cast<std::size_t>(count), std::move(pre.dist), std::move(post.dist)});
  }
  NetworkSpec net(std::move(types));
  return {std::move(net), json{{"types", decl}}};
}

Trajectory parse_trajectory(const json& j, const std::string& path, std::size_t types) {
  Trajectory t;
  if (j.is_string()) {
    if (j.get<std::string>() != "none") throw ConfigError(path, "unknown trajectory '" + j.get<std::string>() + "'");
    return Trajectory::none();
  }
  require_object(j, path);
  if (j.size() != 1) throw ConfigError(path, "expected exactly one of static, iid, explicit");
  if (j.contains("static")) {
    const auto k = get_count(j["static"], join(path, "static"), 1);
    t = Trajectory::static_type(static_cast<std::size_t>(k - 1));
  } else if (j.contains("iid")) {
    t = Trajectory::iid(get_number_array(j["iid"], join(path, "iid")));
  } else if (j.contains("explicit")) {
    const auto& je = j["explicit"];
    const std::string ep = join(path, "explicit");
    if (!je.is_array() || je.empty()) throw ConfigError(ep, "expected a non-empty array");
    std::vector<Affected> seq;
    for (std::size_t i = 0; i < je.size(); ++i) {
      const auto v = get_count(je[i], index(ep, i), 0);
      seq.push_back(v == 0 ? kNoAnomaly : Affected(static_cast<std::size_t>(v - 1)));
    }
    t = Trajectory::explicit_sequence(std::move(seq));
  } else {
    throw ConfigError(join(path, j.begin().key()), "unknown key");
  }
  try {
    t.validate(types);
  } catch (const ParameterError& e) {
    throw ConfigError(path, e.what());
  }
  return t;
}

DetectorDecl parse_detector(const json& j, const std::string& path, std::size_t types) {
  check_keys(j, path, {"algorithm", "threshold", "gamma", "beta", "label"});
  DetectorDecl d;
  if (!j.contains("algorithm") || !j["algorithm"].is_string()) {
    throw ConfigError(join(path, "algorithm"), "required string");
  }
  try {
    d.algorithm = algorithm_from_string(j["algorithm"].get<std::string>());
  } catch (const ParameterError& e) {
    throw ConfigError(join(path, "algorithm"), e.what());
  }
  if (j.contains("threshold") == j.contains("gamma")) {
    throw ConfigError(path, "exactly one of threshold and gamma is required");
  }
  if (j.contains("threshold")) {
    d.threshold = get_number(j["threshold"], join(path, "threshold"));
    if (!(*d.threshold > 0.0)) throw ConfigError(join(path, "threshold"), "must be positive");
  } else {
    d.gamma = get_number(j["gamma"], join(path, "gamma"));
    if (!(*d.gamma > 1.0)) throw ConfigError(join(path, "gamma"), "must exceed 1");
  }
  if (j.contains("beta")) {
    if (d.algorithm != Algorithm::weighted) throw ConfigError(join(path, "beta"), "only the weighted detector takes beta");
    const auto& jb = j["beta"];
    if (jb.is_string()) {
      if (jb.get<std::string>() != "optimal") throw ConfigError(join(path, "beta"), "expected \"optimal\" or an array");
      d.optimal_beta = true;
    } else {
      auto b = get_number_array(jb, join(path, "beta"));
      if (b.size() != types) throw ConfigError(join(path, "beta"), "needs one weight per type");
      try {
        WeightVector check(b);
      } catch (const ParameterError& e) {
        throw ConfigError(join(path, "beta"), e.what());
      }
      d.beta = std::move(b);
    }
  } else if (d.algorithm == Algorithm::weighted) {
    d.optimal_beta = true;
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ConfigError(join(path, "label"), "expected a string");
    d.label = j["label"].get<std::string>();
  }
  if (d.label.empty()) d.label = to_string(d.algorithm);
  return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, "",
             {"network", "detectors", "trajectory", "trajectories", "change_point", "horizon", "cap", "reps",
              "seed", "thresholds", "solver", "support_guard", "output"});
  if (!doc.contains("network")) throw ConfigError("network", "required");
  ParsedNetwork pn = [&] {
    try {
      return parse_network(doc["network"], "network");
    } catch (const ParameterError& e) {
      throw ConfigError("network", e.what());
    }
  }();
  ExperimentConfig cfg{.network_decl = pn.decl, .network = std::move(pn.net)};
  const std::size_t types = cfg.network.types();

  if (doc.contains("detectors")) {
    const auto& jd = doc["detectors"];
    if (!jd.is_array()) throw ConfigError("detectors", "expected an array");
    for (std::size_t i = 0; i < jd.size(); ++i) cfg.detectors.push_back(parse_detector(jd[i], index("detectors", i), types));
  }
  if (doc.contains("trajectory")) cfg.trajectory = parse_trajectory(doc["trajectory"], "trajectory", types);
  if (doc.contains("trajectories")) {
    const auto& jt = doc["trajectories"];
    if (!jt.is_array()) throw ConfigError("trajectories", "expected an array");
    for (std::size_t i = 0; i < jt.size(); ++i) {
      cfg.trajectories.push_back(parse_trajectory(jt[i], index("trajectories", i), types));
      if (cfg.trajectories.back().kind() == Trajectory::Kind::none) {
        throw ConfigError(index("trajectories", i), "the proxy set needs anomaly trajectories");
      }
    }
  }
  if (doc.contains("change_point")) cfg.change_point = get_count(doc["change_point"], "change_point", 1);
  if (doc.contains("horizon")) cfg.horizon = get_count(doc["horizon"], "horizon", 1);
  if (doc.contains("cap")) cfg.cap = get_count(doc["cap"], "cap", 1);
  if (doc.contains("reps")) cfg.reps = static_cast<std::size_t>(get_count(doc["reps"], "reps", 1));
  if (doc.contains("seed")) cfg.seed = get_count(doc["seed"], "seed", 0);
  if (doc.contains("thresholds")) {
    cfg.thresholds = get_number_array(doc["thresholds"], "thresholds");
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
      if (!(cfg.thresholds[i] > 0.0)) throw ConfigError(index("thresholds", i), "must be positive");
      if (i > 0 && !(cfg.thresholds[i] > cfg.thresholds[i - 1])) throw ConfigError("thresholds", "must be increasing");
    }
  }
  if (doc.contains("solver")) {
    const auto& js = doc["solver"];
    check_keys(js, "solver", {"tol", "max_iters", "mc_reps"});
    if (js.contains("tol")) {
      cfg.solver.tol = get_number(js["tol"], "solver.tol");
      if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    }
    if (js.contains("max_iters")) cfg.solver.max_iters = get_count(js["max_iters"], "solver.max_iters", 1);
    if (js.contains("mc_reps")) cfg.solver.mc_reps = get_count(js["mc_reps"], "solver.mc_reps", 100);
  }
  if (doc.contains("support_guard")) cfg.support_guard = get_count(doc["support_guard"], "support_guard", 1);
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output", "expected a string");
    cfg.output = doc["output"].get<std::string>();
  }
  if (cfg.horizon < cfg.change_point && doc.contains("horizon")) {
    throw ConfigError("horizon", "must be >= change_point");
  }
  return cfg;
}

json trajectory_to_json(const Trajectory& t) {
  switch (t.kind()) {
    case Trajectory::Kind::none:
      return "none";
    case Trajectory::Kind::static_type:
      return json{{"static", t.static_index() + 1}};
    case Trajectory::Kind::iid:
      return json{{"iid", t.probs()}};
    case Trajectory::Kind::explicit_sequence: {
      json seq = json::array();
      for (const auto& s : t.sequence()) seq.push_back(s ? *s + 1 : 0);
      return json{{"explicit", seq}};
    }
  }
  return nullptr;
}

json to_json(const ExperimentConfig& cfg) {
  json out;
  out["network"] = cfg.network_decl;
  out["detectors"] = json::array();
  for (const auto& d : cfg.detectors) {
    json jd{{"algorithm", to_string(d.algorithm)}, {"label", d.label}};
    if (d.threshold) jd["threshold"] = *d.threshold;
    if (d.gamma) jd["gamma"] = *d.gamma;
    if (d.algorithm == Algorithm::weighted) {
      if (d.optimal_beta) {
        jd["beta"] = "optimal";
      } else {
        jd["beta"] = *d.beta;
      }
    }
    out["detectors"].push_back(jd);
  }
  if (cfg.trajectory) out["trajectory"] = trajectory_to_json(*cfg.trajectory);
  if (!cfg.trajectories.empty()) {
    out["trajectories"] = json::array();
    for (const auto& t : cfg.trajectories) out["trajectories"].push_back(trajectory_to_json(t));
  }
  out["change_point"] = cfg.change_point;
  out["horizon"] = cfg.horizon;
  out["cap"] = cfg.cap;
  out["reps"] = cfg.reps;
  out["seed"] = cfg.seed;
  if (!cfg.thresholds.empty()) out["thresholds"] = cfg.thresholds;
  out["solver"] = {{"tol", cfg.solver.tol}, {"max_iters", cfg.solver.max_iters}, {"mc_reps", cfg.solver.mc_reps}};
  out["support_guard"] = cfg.support_guard;
  if (cfg.output) out["output"] = *cfg.output;
  return out;
}

double resolve_threshold(const DetectorDecl& d, std::size_t types) {
  if (d.threshold) return *d.threshold;
  return calibrate_threshold(d.algorithm, types, *d.gamma);
}

}  // namespace uqcd
