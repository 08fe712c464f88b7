#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rbstc/config.hpp"
#include "rbstc/gamma.hpp"
#include "rbstc/periodic.hpp"

namespace rbstc {

using ordered_json = nlohmann::ordered_json;

/// Deterministic JSON text: doubles with 17 significant digits, non-finite
/// values as null, keys in insertion order.
std::string dump_json(const ordered_json& j, int indent = 2);

ordered_json to_json(const Eigen::MatrixXd& m);
ordered_json to_json(const Eigen::VectorXd& v);
ordered_json to_json(Complex z);
ordered_json to_json(const Spectrum& s);
ordered_json to_json(const Subspace& s);
ordered_json to_json(const PisCandidate& c);
ordered_json to_json(const StabilityVerdict& v);
ordered_json to_json(const ProbeResult& p);
ordered_json to_json(const CandidateAnalysis& a);
ordered_json to_json(const SMuReport& r);
ordered_json to_json(const PisWithoutPirReport& r);
ordered_json to_json(const ViewAnalysis& v);
ordered_json to_json(const A1Report& r);
ordered_json to_json(const SteadyState& s);

struct AnalysisRun {
  ordered_json report;
  bool a1_passed = true;
};

/// Builds the model and runs the whole pipeline. `extra_patterns` are
/// analyzed in addition to the harvested ones.
AnalysisRun run_analysis(const AnalysisConfig& cfg,
                         const std::vector<std::vector<int>>& extra_patterns = {});

/// CSV columns: k, t_k, region, iet, x_1..x_n, log_norm.
void write_trace_csv(std::ostream& out, const IETTrace& trace);
ordered_json trace_to_json(const IETTrace& trace, const SteadyState& steady);

/// Shortest-round-trip-free fixed formatting used in CSV and JSON output.
std::string format_double(double x);

}  // namespace rbstc
