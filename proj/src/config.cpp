#include "rbstc/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "rbstc/errors.hpp"

namespace rbstc {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "/" + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

int integer(const json& j, const std::string& path, int lo) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo || v > 100000000) throw ConfigError(path, "out of range");
  return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

Eigen::MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of rows");
  // A flat array is read as a single row.
  if (!j.front().is_array()) {
    Eigen::MatrixXd m(1, j.size());
    for (size_t c = 0; c < j.size(); ++c) m(0, c) = number(j[c], path + "/" + std::to_string(c));
    return m;
  }
  const size_t cols = j.front().size();
  if (cols == 0) throw ConfigError(path, "empty row");
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(rp, "rows must have equal length");
    for (size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

Eigen::VectorXd vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], path + "/" + std::to_string(i));
  return v;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(path + "/" + it.key(), "unknown field");
  }
}

}  // namespace

AnalysisConfig parse_config(const json& j) {
  check_keys(j, "", {"system", "trigger", "partition", "tolerances", "seed", "analysis", "a1"});
  AnalysisConfig cfg;

  const json& sys = require(j, "system", "");
  check_keys(sys, "/system", {"A", "B", "K", "desired_poles"});
  cfg.A = matrix(require(sys, "A", "/system"), "/system/A");
  cfg.B = matrix(require(sys, "B", "/system"), "/system/B");
  // A column vector may be written flat.
  if (cfg.B.rows() == 1 && cfg.A.rows() > 1) cfg.B.transposeInPlace();
  const bool has_k = sys.contains("K"), has_poles = sys.contains("desired_poles");
  if (has_k == has_poles) throw ConfigError("/system", "supply exactly one of K or desired_poles");
  if (has_k) cfg.K = matrix(sys.at("K"), "/system/K");
  if (has_poles) {
    const json& p = sys.at("desired_poles");
    if (!p.is_array()) throw ConfigError("/system/desired_poles", "expected an array");
    for (size_t i = 0; i < p.size(); ++i) {
      const std::string pp = "/system/desired_poles/" + std::to_string(i);
      if (p[i].is_array()) {
        if (p[i].size() != 2) throw ConfigError(pp, "complex poles are [re, im]");
        cfg.desired_poles.emplace_back(number(p[i][0], pp + "/0"), number(p[i][1], pp + "/1"));
      } else {
        cfg.desired_poles.emplace_back(number(p[i], pp), 0.0);
      }
    }
  }

  if (j.contains("trigger")) {
    const json& t = j.at("trigger");
    check_keys(t, "/trigger", {"type", "sigma", "horizon", "grid_steps"});
    const json& type = require(t, "type", "/trigger");
    if (!type.is_string() || type.get<std::string>() != "relative") {
      throw ConfigError("/trigger/type", "only \"relative\" is supported");
    }
    TriggerSpec ts;
    ts.sigma = positive(require(t, "sigma", "/trigger"), "/trigger/sigma");
    ts.horizon = positive(require(t, "horizon", "/trigger"), "/trigger/horizon");
    if (t.contains("grid_steps")) ts.steps = integer(t.at("grid_steps"), "/trigger/grid_steps", 10);
    cfg.trigger = ts;
  }

  const json& p = require(j, "partition", "");
  const json& mode = require(p, "mode", "/partition");
  if (!mode.is_string()) throw ConfigError("/partition/mode", "expected a string");
  cfg.partition.mode = mode.get<std::string>();
  PartitionSpec& ps = cfg.partition;
  if (ps.mode == "tau-slices") {
    check_keys(p, "/partition", {"mode", "r", "tau_min", "tau_max", "bound_samples"});
    if (!cfg.trigger) throw ConfigError("/trigger", "tau-slices mode requires a trigger");
    ps.r = integer(require(p, "r", "/partition"), "/partition/r", 1);
    if (p.contains("tau_min")) ps.tau_min = positive(p.at("tau_min"), "/partition/tau_min");
    if (p.contains("tau_max")) ps.tau_max = positive(p.at("tau_max"), "/partition/tau_max");
    if (ps.tau_min.has_value() != ps.tau_max.has_value()) {
      throw ConfigError("/partition", "give both tau_min and tau_max or neither");
    }
    if (ps.tau_min && !(*ps.tau_min < *ps.tau_max)) {
      throw ConfigError("/partition/tau_max", "must exceed tau_min");
    }
    if (p.contains("bound_samples")) {
      ps.bound_samples = integer(p.at("bound_samples"), "/partition/bound_samples", 100);
    }
  } else if (ps.mode == "cones") {
    check_keys(p, "/partition", {"mode", "centers", "taus", "random"});
    if (p.contains("random") == p.contains("centers")) {
      throw ConfigError("/partition", "supply exactly one of centers or random");
    }
    if (p.contains("centers")) {
      const json& c = p.at("centers");
      if (!c.is_array() || c.empty()) throw ConfigError("/partition/centers", "expected an array");
      for (size_t i = 0; i < c.size(); ++i) {
        ps.centers.push_back(vec(c[i], "/partition/centers/" + std::to_string(i)));
      }
      const json& t = require(p, "taus", "/partition");
      if (!t.is_array() || t.size() != c.size()) {
        throw ConfigError("/partition/taus", "need one tau per center");
      }
      for (size_t i = 0; i < t.size(); ++i) {
        ps.taus.push_back(positive(t[i], "/partition/taus/" + std::to_string(i)));
      }
    } else {
      const json& r = p.at("random");
      check_keys(r, "/partition/random", {"count", "tau_lo", "tau_hi", "decimals"});
      RandomCones rc;
      rc.count = integer(require(r, "count", "/partition/random"), "/partition/random/count", 1);
      rc.tau_lo = positive(require(r, "tau_lo", "/partition/random"), "/partition/random/tau_lo");
      rc.tau_hi = positive(require(r, "tau_hi", "/partition/random"), "/partition/random/tau_hi");
      if (!(rc.tau_lo < rc.tau_hi)) throw ConfigError("/partition/random/tau_hi", "must exceed tau_lo");
      if (r.contains("decimals")) rc.decimals = integer(r.at("decimals"), "/partition/random/decimals", 1);
      ps.random = rc;
    }
  } else if (ps.mode == "polyhedral") {
    check_keys(p, "/partition", {"mode", "cones", "taus"});
    const json& c = require(p, "cones", "/partition");
    if (!c.is_array() || c.empty()) throw ConfigError("/partition/cones", "expected an array");
    for (size_t i = 0; i < c.size(); ++i) {
      ps.normals.push_back(matrix(c[i], "/partition/cones/" + std::to_string(i)));
    }
    const json& t = require(p, "taus", "/partition");
    if (!t.is_array() || t.size() != c.size()) throw ConfigError("/partition/taus", "need one tau per cone");
    for (size_t i = 0; i < t.size(); ++i) {
      ps.taus.push_back(positive(t[i], "/partition/taus/" + std::to_string(i)));
    }
  } else {
    throw ConfigError("/partition/mode", "expected \"tau-slices\", \"cones\" or \"polyhedral\"");
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, "/tolerances", {"eig", "rank", "orth", "member", "conv"});
    if (t.contains("eig")) cfg.tol.eig = positive(t.at("eig"), "/tolerances/eig");
    if (t.contains("rank")) cfg.tol.rank = positive(t.at("rank"), "/tolerances/rank");
    if (t.contains("orth")) cfg.tol.orth = positive(t.at("orth"), "/tolerances/orth");
    if (t.contains("member")) cfg.tol.member = positive(t.at("member"), "/tolerances/member");
    if (t.contains("conv")) cfg.tol.conv = positive(t.at("conv"), "/tolerances/conv");
    try {
      cfg.tol.validate();
    } catch (const std::exception& e) {
      throw ConfigError("/tolerances", e.what());
    }
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("/seed", "expected an unsigned integer");
    }
    cfg.seed = s.get<unsigned long long>();
  }

  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    check_keys(a, "/analysis", {"pirs", "subspaces", "unions", "screening", "stability", "probe",
                                "samples", "starts", "max_denominator", "periodic"});
    AnalysisOptions& o = cfg.analysis;
    if (a.contains("pirs")) o.pirs = boolean(a.at("pirs"), "/analysis/pirs");
    if (a.contains("subspaces")) o.subspaces = boolean(a.at("subspaces"), "/analysis/subspaces");
    if (a.contains("unions")) o.unions = boolean(a.at("unions"), "/analysis/unions");
    if (a.contains("screening")) o.screening = boolean(a.at("screening"), "/analysis/screening");
    if (a.contains("stability")) o.stability = boolean(a.at("stability"), "/analysis/stability");
    if (a.contains("probe")) o.probe = boolean(a.at("probe"), "/analysis/probe");
    if (a.contains("samples")) o.samples = integer(a.at("samples"), "/analysis/samples", 1);
    if (a.contains("starts")) o.starts = integer(a.at("starts"), "/analysis/starts", 1);
    if (a.contains("max_denominator")) {
      o.max_denominator = integer(a.at("max_denominator"), "/analysis/max_denominator", 2);
    }
    if (a.contains("periodic")) {
      const json& pp = a.at("periodic");
      if (pp.is_boolean()) {
        cfg.periodic.enabled = pp.get<bool>();
      } else {
        check_keys(pp, "/analysis/periodic",
                   {"enabled", "max_period", "window", "simulations", "events", "enumerate_length"});
        PeriodicSpec& s = cfg.periodic;
        if (pp.contains("enabled")) s.enabled = boolean(pp.at("enabled"), "/analysis/periodic/enabled");
        if (pp.contains("max_period")) s.max_period = integer(pp.at("max_period"), "/analysis/periodic/max_period", 1);
        if (pp.contains("window")) s.window = integer(pp.at("window"), "/analysis/periodic/window", 2);
        if (pp.contains("simulations")) s.simulations = integer(pp.at("simulations"), "/analysis/periodic/simulations", 0);
        if (pp.contains("events")) s.events = integer(pp.at("events"), "/analysis/periodic/events", 1);
        if (pp.contains("enumerate_length")) {
          s.enumerate_length = integer(pp.at("enumerate_length"), "/analysis/periodic/enumerate_length", 0);
        }
        if (s.events < s.window) throw ConfigError("/analysis/periodic/events", "must be >= window");
      }
    }
  }
  if (j.contains("a1")) {
    const json& a = j.at("a1");
    check_keys(a, "/a1", {"samples"});
    if (a.contains("samples")) cfg.a1_samples = integer(a.at("samples"), "/a1/samples", 1);
  }
  cfg.analysis.tol = cfg.tol;
  cfg.analysis.seed = cfg.seed;
  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

LinearSystem build_system(const AnalysisConfig& cfg) {
  const int n = static_cast<int>(cfg.A.rows());
  if (cfg.A.cols() != n) throw ConfigError("/system/A", "must be square");
  if (cfg.B.rows() != n) throw ConfigError("/system/B", "row count must match A");
  Eigen::MatrixXd k;
  if (cfg.K) {
    k = *cfg.K;
  } else {
    if (static_cast<int>(cfg.desired_poles.size()) != n) {
      throw ConfigError("/system/desired_poles", "need exactly n poles");
    }
    try {
      k = pole_place_companion(cfg.A, cfg.B, cfg.desired_poles);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/system/desired_poles", e.what());
    }
  }
  try {
    LinearSystem sys(cfg.A, cfg.B, k);
    sys.validate();
    return sys;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/system", e.what());
  }
}

Model build_model(const AnalysisConfig& cfg) {
  Model m;
  m.system = build_system(cfg);
  const int n = m.system.n();
  if (cfg.trigger) {
    m.trigger = make_relative_trigger(m.system, cfg.trigger->sigma, cfg.trigger->horizon, cfg.tol.conv);
    if (cfg.trigger->steps != TriggerFlow::kDefaultSteps) {
      m.trigger->flow = std::make_shared<TriggerFlow>(m.system, cfg.trigger->horizon, cfg.trigger->steps);
    }
  }
  const PartitionSpec& ps = cfg.partition;
  try {
    if (ps.mode == "tau-slices") {
      double lo, hi;
      if (ps.tau_min) {
        lo = *ps.tau_min;
        hi = *ps.tau_max;
      } else {
        m.bounds = estimate_tau_bounds(*m.trigger, ps.bound_samples, cfg.seed);
        lo = m.bounds->tau_min;
        hi = m.bounds->tau_max;
        if (!(lo < hi)) throw ConfigError("/partition", "sampled trigger times are constant; give tau_min/tau_max");
      }
      m.partition = build_trigger_partition(*m.trigger, ps.r, lo, hi);
    } else if (ps.mode == "cones") {
      std::vector<Eigen::VectorXd> centers = ps.centers;
      std::vector<double> taus = ps.taus;
      if (ps.random) {
        centers = unit_sphere_samples(n, ps.random->count, cfg.seed);
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_real_distribution<double> ud(ps.random->tau_lo, ps.random->tau_hi);
        const double scale = std::pow(10.0, ps.random->decimals);
        taus.clear();
        for (int i = 0; i < ps.random->count; ++i) taus.push_back(std::round(ud(rng) * scale) / scale);
      }
      for (size_t i = 0; i < centers.size(); ++i) {
        if (centers[i].size() != n) {
          throw ConfigError("/partition/centers/" + std::to_string(i), "dimension must match A");
        }
      }
      m.partition = build_cone_partition(centers, taus);
    } else {
      for (size_t i = 0; i < ps.normals.size(); ++i) {
        if (ps.normals[i].cols() != n) {
          throw ConfigError("/partition/cones/" + std::to_string(i), "normal length must match A");
        }
      }
      m.partition = Partition::polyhedral(ps.normals, ps.taus);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("/partition", e.what());
  }
  m.gs = transition_matrices(m.system, m.partition->taus());
  return m;
}

}  // namespace rbstc
