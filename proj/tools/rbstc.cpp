// Command line front end: analyze, simulate, tau-e, calibrate-sigma, periodic.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rbstc/config.hpp"
#include "rbstc/errors.hpp"
#include "rbstc/kernels.hpp"
#include "rbstc/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAssumption = 2;

rbstc::AnalysisConfig load(const std::string& path) {
  rbstc::AnalysisConfig cfg = rbstc::load_config(path);
  if (const char* env = std::getenv("RBSTC_SEED")) {
    char* end = nullptr;
    const unsigned long long s = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw rbstc::ConfigError("RBSTC_SEED", "expected an unsigned integer");
    cfg.seed = s;
    cfg.analysis.seed = s;
  }
  return cfg;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw rbstc::ConfigError("--out", "cannot write " + out);
  f << text;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw rbstc::ConfigError("--x0", "expected comma separated numbers");
    }
  }
  Eigen::VectorXd v(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) v(i) = vals[i];
  return v;
}

std::vector<int> parse_pattern(const std::string& s) {
  std::vector<int> p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      p.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw rbstc::ConfigError("--pattern", "expected comma separated region indices");
    }
  }
  return p;
}

int analyze(const std::string& config, const std::string& out, const std::vector<std::string>& patterns,
            int enumerate, bool force_periodic) {
  rbstc::AnalysisConfig cfg = load(config);
  if (force_periodic) cfg.periodic.enabled = true;
  if (enumerate > 0) cfg.periodic.enumerate_length = enumerate;
  std::vector<std::vector<int>> extra;
  for (const auto& p : patterns) extra.push_back(parse_pattern(p));
  rbstc::AnalysisRun run = rbstc::run_analysis(cfg, extra);
  emit(rbstc::dump_json(run.report), out);
  if (!run.a1_passed) {
    std::cerr << "assumption A1 violated; see assumption_a1 in the report\n";
    return kAssumption;
  }
  return kOk;
}

int simulate(const std::string& config, const std::string& x0s, int events, const std::string& csv,
             const std::string& json_out) {
  rbstc::AnalysisConfig cfg = load(config);
  rbstc::Model m = rbstc::build_model(cfg);
  Eigen::VectorXd x0 = parse_vector(x0s);
  if (x0.size() != m.system.n()) throw rbstc::ConfigError("--x0", "dimension must match A");
  if (!(x0.norm() > 0.0)) throw rbstc::ConfigError("--x0", "must be nonzero");
  if (events < 1) throw rbstc::ConfigError("--events", "must be positive");
  rbstc::IETTrace tr = rbstc::simulate(m.part(), m.gs, x0, events, cfg.tol);
  const int window = std::min(cfg.periodic.window, tr.size());
  rbstc::SteadyState ss = rbstc::detect_steady_state(tr, m.part().taus(), window,
                                                     std::min(cfg.periodic.max_period, std::max(1, window / 2)));
  if (!csv.empty()) {
    std::ostringstream os;
    rbstc::write_trace_csv(os, tr);
    emit(os.str(), csv);
  }
  if (!json_out.empty()) emit(rbstc::dump_json(rbstc::trace_to_json(tr, ss)), json_out);
  std::cout << "steady-state: " << rbstc::to_string(ss.kind);
  if (ss.kind != rbstc::SteadyState::Kind::None) {
    std::cout << " onset=" << ss.onset_index << " taus=[";
    for (size_t k = 0; k < ss.tau_pattern.size(); ++k) {
      std::cout << (k ? "," : "") << rbstc::format_double(ss.tau_pattern[k]);
    }
    std::cout << "] regions=[";
    for (size_t k = 0; k < ss.region_pattern.size(); ++k) std::cout << (k ? "," : "") << ss.region_pattern[k];
    std::cout << "]";
  }
  std::cout << "\n";
  return kOk;
}

int tau_e(const std::string& config, int samples, const std::string& out) {
  rbstc::AnalysisConfig cfg = load(config);
  if (!cfg.trigger) throw rbstc::ConfigError("/trigger", "the tau-e command needs a trigger");
  if (samples < 1) throw rbstc::ConfigError("--samples", "must be positive");
  rbstc::LinearSystem sys = rbstc::build_system(cfg);
  rbstc::RelativeTrigger trig = rbstc::make_relative_trigger(sys, cfg.trigger->sigma, cfg.trigger->horizon, cfg.tol.conv);
  if (cfg.trigger->steps != rbstc::TriggerFlow::kDefaultSteps) {
    trig.flow = std::make_shared<rbstc::TriggerFlow>(sys, cfg.trigger->horizon, cfg.trigger->steps);
  }
  const auto xs = rbstc::unit_sphere_samples(sys.n(), samples, cfg.seed);
  const auto ts = rbstc::tau_e_field(trig, xs);
  double lo = ts.front(), hi = ts.front();
  for (double t : ts) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  std::ostringstream os;
  for (int i = 0; i < sys.n(); ++i) os << "x" << (i + 1) << ",";
  os << "tau_e\n";
  for (size_t k = 0; k < xs.size(); ++k) {
    for (int i = 0; i < sys.n(); ++i) os << rbstc::format_double(xs[k](i)) << ",";
    os << rbstc::format_double(ts[k]) << "\n";
  }
  if (!out.empty()) emit(os.str(), out);
  std::cout << "samples=" << samples << " tau_min=" << rbstc::format_double(lo)
            << " tau_max=" << rbstc::format_double(hi) << "\n";
  return kOk;
}

int calibrate(const std::string& config, double tmin, double tmax, int samples) {
  rbstc::AnalysisConfig cfg = load(config);
  if (!cfg.trigger) throw rbstc::ConfigError("/trigger", "calibration needs a trigger horizon");
  if (!(tmin > 0.0) || !(tmin < tmax)) throw rbstc::ConfigError("--target-tmin", "need 0 < tmin < tmax");
  rbstc::LinearSystem sys = rbstc::build_system(cfg);
  rbstc::SigmaCalibration c = rbstc::calibrate_sigma(sys, cfg.trigger->horizon, tmin, tmax, samples, cfg.seed);
  rbstc::ordered_json j;
  j["ok"] = c.ok;
  j["sigma"] = c.sigma;
  j["tau_min"] = c.bounds.tau_min;
  j["tau_max"] = c.bounds.tau_max;
  j["residual_min"] = c.residual_min;
  j["residual_max"] = c.residual_max;
  j["iterations"] = c.iterations;
  j["samples"] = c.bounds.samples;
  std::cout << rbstc::dump_json(j);
  if (!c.ok) {
    std::cerr << "calibration failed: no sigma in the search bracket reaches the target within 20%\n";
    return kConfigError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-based self-triggered control: inter-event time analysis"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads for parallel kernels (0 = runtime default)")->check(CLI::NonNegativeNumber);

  std::string config, out;
  std::vector<std::string> patterns;
  int enumerate = 0;

  auto* an = app.add_subcommand("analyze", "Full invariant-set and stability report");
  an->add_option("config", config, "Configuration JSON")->required();
  an->add_option("--out", out, "Report path (default stdout)");
  an->add_option("--pattern", patterns, "Extra periodic pattern, e.g. 0,1");

  auto* pe = app.add_subcommand("periodic", "Analyze with periodic-pattern enumeration enabled");
  pe->add_option("config", config, "Configuration JSON")->required();
  pe->add_option("--out", out, "Report path (default stdout)");
  pe->add_option("--pattern", patterns, "Extra periodic pattern, e.g. 0,1");
  pe->add_option("--enumerate", enumerate, "Enumerate all patterns up to this length")->check(CLI::NonNegativeNumber);

  std::string x0, json_out;
  int events = 200;
  auto* si = app.add_subcommand("simulate", "Simulate the event sequence from x0");
  si->add_option("config", config, "Configuration JSON")->required();
  si->add_option("--x0", x0, "Initial state, comma separated")->required();
  si->add_option("--events", events, "Number of events");
  si->add_option("--out", out, "CSV trace path");
  si->add_option("--json", json_out, "JSON trace path");

  int samples = 10000;
  auto* te = app.add_subcommand("tau-e", "Trigger times on seeded unit-sphere samples");
  te->add_option("config", config, "Configuration JSON")->required();
  te->add_option("--samples", samples, "Sample count");
  te->add_option("--out", out, "CSV path");

  double tmin = 0.0, tmax = 0.0;
  int cal_samples = 4000;
  auto* ca = app.add_subcommand("calibrate-sigma", "Fit the relative threshold to target trigger bounds");
  ca->add_option("config", config, "Configuration JSON")->required();
  ca->add_option("--target-tmin", tmin, "Target minimum trigger time")->required();
  ca->add_option("--target-tmax", tmax, "Target maximum trigger time")->required();
  ca->add_option("--samples", cal_samples, "Sphere samples per evaluation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  rbstc::set_max_threads(jobs);

  try {
    if (*an) return analyze(config, out, patterns, 0, false);
    if (*pe) return analyze(config, out, patterns, enumerate, true);
    if (*si) return simulate(config, x0, events, out, json_out);
    if (*te) return tau_e(config, samples, out);
    if (*ca) return calibrate(config, tmin, tmax, cal_samples);
  } catch (const rbstc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rbstc::AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumption;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
