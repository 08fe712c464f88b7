#include "rbstc/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "rbstc/errors.hpp"
#include "rbstc/kernels.hpp"

namespace rbstc {

namespace {

void dump(const ordered_json& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ordered_json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump(e, out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case ordered_json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

ordered_json vectors(const std::vector<Eigen::VectorXd>& vs) {
  ordered_json a = ordered_json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep JSON numbers recognisable as floats.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const ordered_json& j, int indent) {
  std::string out;
  dump(j, out, indent, 0);
  out += '\n';
  return out;
}

ordered_json to_json(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

ordered_json to_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json to_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json to_json(const Spectrum& s) {
  ordered_json j;
  j["spectral_radius"] = s.spectral_radius;
  ordered_json ev = ordered_json::array();
  for (const auto& c : s.clusters) {
    ordered_json e;
    e["value"] = to_json(c.value);
    e["magnitude"] = std::abs(c.value);
    e["algebraic"] = c.algebraic;
    e["geometric"] = c.geometric;
    e["defective"] = to_string(c.defective);
    ev.push_back(e);
  }
  j["eigenvalues"] = ev;
  return j;
}

ordered_json to_json(const Subspace& s) {
  ordered_json j;
  j["dim"] = s.dim();
  ordered_json b = ordered_json::array();
  for (int c = 0; c < s.dim(); ++c) b.push_back(to_json(Eigen::VectorXd(s.basis().col(c))));
  j["basis"] = b;
  return j;
}

ordered_json to_json(const PisCandidate& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["rays"] = vectors(c.rays);
  j["span"] = to_json(c.span);
  ordered_json ev = ordered_json::array();
  for (auto z : c.eigenvalues) ev.push_back(to_json(z));
  j["eigenvalues"] = ev;
  j["contained"] = c.contained;
  j["verified"] = c.verified;
  j["min_margin"] = c.min_margin;
  return j;
}

ordered_json to_json(const StabilityVerdict& v) {
  ordered_json j;
  j["verdict"] = to_string(v.verdict);
  j["defective"] = to_string(v.defective);
  ordered_json r = ordered_json::array();
  for (const auto& c : v.reasons) {
    r.push_back(ordered_json{{"clause", c.name}, {"value", c.value}, {"detail", c.detail}});
  }
  j["clauses"] = r;
  auto list = [](const std::vector<Complex>& qs) {
    ordered_json a = ordered_json::array();
    for (auto q : qs) a.push_back(to_json(q));
    return a;
  };
  j["spectral_partition"] = ordered_json{{"q1", list(v.partition.q1)},
                                         {"q2", list(v.partition.q2)},
                                         {"q3", list(v.partition.q3)},
                                         {"q4", list(v.partition.q4)}};
  j["interior_margin"] = v.interior_margin;
  return j;
}

ordered_json to_json(const ProbeResult& p) {
  ordered_json j;
  j["verdict"] = to_string(p.verdict);
  ordered_json lv = ordered_json::array();
  for (const auto& l : p.levels) {
    lv.push_back(ordered_json{{"eps", l.eps},
                              {"trials", l.trials},
                              {"max_distance", l.max_distance},
                              {"final_distance", l.final_distance},
                              {"escaped", l.escaped},
                              {"left_cone", l.left_cone}});
  }
  j["levels"] = lv;
  return j;
}

ordered_json to_json(const CandidateAnalysis& a) {
  ordered_json j = to_json(a.candidate);
  j["status"] = a.status;
  if (!a.message.empty()) j["message"] = a.message;
  j["stability"] = a.verdict ? to_json(*a.verdict) : ordered_json(nullptr);
  if (a.probe) j["probe"] = to_json(*a.probe);
  j["limit_set"] = to_json(a.limit_set);
  return j;
}

ordered_json to_json(const SMuReport& r) {
  ordered_json j;
  ordered_json e = ordered_json::array();
  for (const auto& x : r.entries) {
    ordered_json k;
    k["mu"] = x.mu;
    k["dim"] = x.s.dim();
    k["status"] = to_string(x.hit.status);
    k["best_margin"] = x.hit.best_margin;
    k["witnesses"] = vectors(x.hit.witnesses);
    e.push_back(k);
  }
  j["entries"] = e;
  j["mu_max"] = r.mu_max ? ordered_json(*r.mu_max) : ordered_json(nullptr);
  j["pis_free"] = r.pis_free;
  j["pis_free_certified"] = r.pis_free_certified;
  return j;
}

ordered_json to_json(const PisWithoutPirReport& r) {
  ordered_json j;
  j["negative_eigenline_meets_closure"] = r.negative_line;
  ordered_json ne = ordered_json::array();
  for (auto z : r.negative_eigenvalues) ne.push_back(to_json(z));
  j["negative_eigenvalues"] = ne;
  j["equal_magnitude_meets_closure"] = r.equal_magnitude;
  j["equal_magnitude_mus"] = r.equal_magnitude_mus;
  j["has_pir"] = r.has_pir;
  j["decided_exactly"] = r.decided_exactly;
  j["verdict"] = r.verdict;
  return j;
}

ordered_json to_json(const ViewAnalysis& v) {
  ordered_json j;
  j["pattern"] = v.pattern;
  j["taus"] = v.taus;
  j["G"] = to_json(v.G);
  j["spectrum"] = to_json(v.spectrum);
  j["s_mu"] = v.screening ? to_json(*v.screening) : ordered_json(nullptr);
  j["pis_without_pir"] = v.without_pir ? to_json(*v.without_pir) : ordered_json(nullptr);
  ordered_json c = ordered_json::array();
  for (const auto& a : v.candidates) c.push_back(to_json(a));
  j["candidates"] = c;
  j["notes"] = v.notes;
  j["certified"] = v.certified;
  j["asymptotically_stable"] = v.asymptotically_stable;
  return j;
}

ordered_json to_json(const A1Report& r) {
  ordered_json j;
  j["passed"] = r.passed;
  ordered_json v = ordered_json::array();
  for (const auto& x : r.violations) {
    ordered_json k;
    k["kind"] = x.kind == A1Violation::Kind::DuplicateTau ? "duplicate-tau" : "null-direction";
    k["region"] = x.region;
    k["other_region"] = x.other_region;
    k["power"] = x.power;
    k["witness"] = to_json(x.witness);
    k["message"] = x.message;
    v.push_back(k);
  }
  j["violations"] = v;
  return j;
}

ordered_json to_json(const SteadyState& s) {
  ordered_json j;
  j["kind"] = to_string(s.kind);
  j["region_pattern"] = s.region_pattern;
  j["tau_pattern"] = s.tau_pattern;
  j["onset_index"] = s.onset_index;
  return j;
}

AnalysisRun run_analysis(const AnalysisConfig& cfg,
                         const std::vector<std::vector<int>>& extra_patterns) {
  Model m = build_model(cfg);
  const Partition& part = m.part();
  AnalysisRun run;
  ordered_json& rep = run.report;
  rep["tool"] = "rbstc";
  rep["format_version"] = 1;
  rep["seed"] = cfg.seed;

  ordered_json sys;
  sys["n"] = m.system.n();
  sys["m"] = m.system.m();
  sys["A"] = to_json(m.system.A);
  sys["B"] = to_json(m.system.B);
  sys["K"] = to_json(m.system.K);
  sys["closed_loop_spectrum"] = to_json(eig(m.system.closed_loop(), cfg.tol));
  sys["closed_loop_hurwitz"] = m.system.closed_loop_hurwitz();
  rep["system"] = sys;

  if (cfg.trigger) {
    rep["trigger"] = ordered_json{{"type", "relative"},
                                  {"sigma", cfg.trigger->sigma},
                                  {"horizon", cfg.trigger->horizon},
                                  {"grid_steps", cfg.trigger->steps}};
  } else {
    rep["trigger"] = nullptr;
  }
  ordered_json pj;
  pj["mode"] = to_string(part.mode());
  pj["regions"] = part.size();
  pj["taus"] = part.taus();
  if (m.bounds) {
    pj["sampled_tau_bounds"] = ordered_json{
        {"tau_min", m.bounds->tau_min}, {"tau_max", m.bounds->tau_max}, {"samples", m.bounds->samples}};
  }
  rep["partition"] = pj;

  const A1Report a1 = check_assumption_a1(part, m.gs, cfg.tol, cfg.a1_samples, cfg.seed + 5);
  run.a1_passed = a1.passed;
  rep["assumption_a1"] = to_json(a1);

  ordered_json regions = ordered_json::array();
  ordered_json summary;
  std::map<std::string, int> verified;
  std::map<std::string, int> verdicts;
  for (int i = 0; i < part.size(); ++i) {
    ViewAnalysis va = analyze_region(part, m.gs, i, cfg.analysis);
    ordered_json rj;
    rj["index"] = i;
    rj["tau"] = part.tau(i);
    ordered_json body = to_json(va);
    for (auto it = body.begin(); it != body.end(); ++it) {
      if (it.key() != "pattern" && it.key() != "taus") rj[it.key()] = it.value();
    }
    for (const auto& a : va.candidates) {
      if (a.candidate.verified) verified[to_string(a.candidate.kind)]++;
      if (a.verdict) verdicts[std::string(to_string(a.candidate.kind)) + ":" + to_string(a.verdict->verdict)]++;
    }
    regions.push_back(rj);
  }
  rep["regions"] = regions;

  ordered_json periodic;
  if (cfg.periodic.enabled) {
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> patterns;
    auto add = [&](const std::vector<int>& p) {
      auto c = canonical_rotation(p);
      if (c.size() >= 2 && seen.insert(c).second) patterns.push_back(c);
    };
    std::vector<std::vector<int>> harvested;
    if (cfg.periodic.simulations > 0) {
      harvested = harvest_patterns(part, m.gs, cfg.periodic.simulations, cfg.periodic.events,
                                   cfg.seed + 31, cfg.periodic.window, cfg.periodic.max_period, cfg.tol);
    }
    for (const auto& p : harvested) add(p);
    for (const auto& p : extra_patterns) add(p);
    if (cfg.periodic.enumerate_length >= 2) {
      for (const auto& p : enumerate_patterns(part.size(), cfg.periodic.enumerate_length)) add(p);
    }
    ordered_json hv = ordered_json::array();
    for (const auto& p : harvested) hv.push_back(p);
    periodic["harvested"] = hv;
    ordered_json pats = ordered_json::array();
    for (const auto& p : patterns) {
      for (int j : p) {
        if (j < 0 || j >= part.size()) throw ConfigError("/patterns", "pattern index out of range");
      }
      ViewAnalysis va = analyze_pattern(part, m.gs, p, cfg.analysis);
      pats.push_back(to_json(va));
      for (const auto& a : va.candidates) {
        if (a.verdict) verdicts["pattern:" + std::string(to_string(a.verdict->verdict))]++;
      }
    }
    periodic["patterns"] = pats;
  } else {
    periodic = nullptr;
  }
  rep["periodic"] = periodic;

  ordered_json vj = ordered_json::object();
  for (const auto& [k, v] : verified) vj[k] = v;
  summary["verified_candidates"] = vj;
  ordered_json dj = ordered_json::object();
  for (const auto& [k, v] : verdicts) dj[k] = v;
  summary["verdicts"] = dj;
  summary["assumption_a1_passed"] = a1.passed;
  rep["summary"] = summary;
  return run;
}

void write_trace_csv(std::ostream& out, const IETTrace& trace) {
  const int n = trace.states.empty() ? 0 : static_cast<int>(trace.states.front().size());
  out << "k,t_k,region,iet";
  for (int i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << ",log_norm\n";
  for (int k = 0; k < trace.size(); ++k) {
    out << k << ',' << format_double(trace.event_times[k]) << ',' << trace.regions[k] << ','
        << format_double(trace.iets[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(trace.states[k](i));
    out << ',' << format_double(trace.log_norms[k]) << '\n';
  }
}

ordered_json trace_to_json(const IETTrace& trace, const SteadyState& steady) {
  ordered_json j;
  j["events"] = trace.size();
  j["event_times"] = trace.event_times;
  j["regions"] = trace.regions;
  j["iets"] = trace.iets;
  j["log_norms"] = trace.log_norms;
  ordered_json st = ordered_json::array();
  for (const auto& s : trace.states) st.push_back(to_json(s));
  j["states"] = st;
  j["steady_state"] = to_json(steady);
  return j;
}

}  // namespace rbstc
