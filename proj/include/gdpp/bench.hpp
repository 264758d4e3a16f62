#pragma once

#include "gdpp/chebyshev.hpp"
#include "gdpp/common.hpp"
#include "gdpp/dpp.hpp"
#include "gdpp/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdpp {

enum class Method { UniformIid, DiagIidExact, DiagIidEstimated, DppApprox, DppIdeal };

inline constexpr Method kAllMethods[] = {Method::UniformIid, Method::DiagIidExact, Method::DiagIidEstimated,
                                         Method::DppApprox, Method::DppIdeal};

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

/// Fresh randomness per signal, or one set shared by all signals.
inline bool is_deterministic(Method m) { return m == Method::DppApprox || m == Method::DppIdeal; }

/// Uniform random m-subset of {0..n-1}, no replacement (partial shuffle).
SampleSet sample_uniform_iid(Index n, Index m, Rng& rng);

/// Sequential draws without replacement, each proportional to the weights
/// of the nodes not yet drawn. Throws if fewer than m weights are positive.
SampleSet sample_weighted_iid(const Eigen::VectorXd& weights, Index m, Rng& rng);

enum class CutoffSource {
  /// Stochastic eigencount bisection, no eigendecomposition.
  Estimated,
  /// Midpoint of lambda_k and lambda_{k+1} from the partial spectrum.
  Exact,
};

struct BenchConfig {
  /// Edge-list file; when empty the SBM below is generated.
  std::optional<std::filesystem::path> graph_path;
  SbmConfig sbm;
  Index k = 10;
  std::vector<Index> m_grid{10, 12, 15, 20, 30, 40, 60};
  Index n_signals = 100;
  double noise_std = 1e-3;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  Index r = 50;
  /// 0 selects 10 ceil(log2 N).
  Index n_probes = 0;
  bool jackson = true;
  CutoffSource cutoff = CutoffSource::Estimated;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct BenchRow {
  Method method = Method::UniformIid;
  Index m = 0;
  double median_error = 0;
  double q1_error = 0;
  double q3_error = 0;
  /// Draws whose sampled rows were rank-deficient (error counted as +inf).
  Index failures = 0;
  Index n_signals = 0;
  /// Trials where ||x_rec - x|| exceeded ||noise|| / sigma_1.
  Index bound_violations = 0;
  bool fixed_sample = false;
  std::uint64_t seed = 0;
  double wall_time_s = 0;
  /// Per-signal errors; not part of the report.
  std::vector<double> errors;

  friend bool operator==(const BenchRow& a, const BenchRow& b);
};

struct BenchResult {
  Index n_nodes = 0;
  Index n_edges = 0;
  Index k = 0;
  double lambda_max = 0;
  double cutoff = 0;
  std::string cutoff_source;
  Index r = 0;
  Index n_probes = 0;
  double noise_std = 0;
  std::uint64_t seed = 0;
  std::vector<BenchRow> rows;

  const BenchRow* find(Method method, Index m) const;

  friend bool operator==(const BenchResult& a, const BenchResult& b);
};

BenchResult run_benchmark(const BenchConfig& cfg);
BenchResult run_benchmark(const BenchConfig& cfg, const Graph& graph);

/// Linear-interpolation quantile (type 7) of sorted data. +inf entries
/// propagate whenever they carry non-zero interpolation weight.
double sorted_quantile(const std::vector<double>& sorted, double q);

// ---------------------------------------------------------------------------
// Serialization (src/report.cpp, src/serialize.cpp)

enum class ReportFormat { Csv, Json };
ReportFormat report_format_from_string(std::string_view s);

/// CSV columns: method,m,median_error,q1_error,q3_error,failures,n_signals,
/// bound_violations,fixed_sample,seed and, with timings, wall_time_s.
/// Non-finite errors are written as "inf". Timings are opt-in so the
/// default report is byte-identical across runs.
std::string format_report(const BenchResult& res, ReportFormat format, bool include_timings = false);
void emit_report(const BenchResult& res, const std::filesystem::path& path, ReportFormat format,
                 bool include_timings = false);
BenchResult parse_json_report(std::string_view text);

BenchConfig parse_bench_config(std::string_view json_text);
std::string bench_config_to_json(const BenchConfig& cfg);

std::string sample_set_to_json(const SampleSet& s, std::string_view method, std::uint64_t seed);
struct LabeledSampleSet {
  SampleSet sample;
  std::string method;
  std::uint64_t seed = 0;
};
LabeledSampleSet parse_sample_set_json(std::string_view text);

/// Filter provenance: {"lambda_k", "lambda_max", "r", "jackson"}.
std::string filter_spec_to_json(const ChebyshevFilter<double>& f);
ChebyshevFilter<double> filter_from_json(std::string_view text);

}  // namespace gdpp
