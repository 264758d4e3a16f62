#include "gdpp/bench.hpp"

#include "gdpp/approx_sampler.hpp"
#include "gdpp/reconstruction.hpp"
#include "gdpp/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace gdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::UniformIid: return "uniform-iid";
    case Method::DiagIidExact: return "diag-iid-exact";
    case Method::DiagIidEstimated: return "diag-iid-estimated";
    case Method::DppApprox: return "dpp-approx";
    case Method::DppIdeal: return "dpp-ideal";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown sampling method '" + std::string(name) + "'");
}

SampleSet sample_uniform_iid(Index n, Index m, Rng& rng) {
  if (m < 0 || m > n) throw std::invalid_argument("sample_uniform_iid: need 0 <= m <= N");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  perm.resize(static_cast<std::size_t>(m));
  return SampleSet{std::move(perm)};
}

SampleSet sample_weighted_iid(const Eigen::VectorXd& weights, Index m, Rng& rng) {
  const Index n = weights.size();
  if (m < 0 || m > n) throw std::invalid_argument("sample_weighted_iid: need 0 <= m <= N");
  if ((weights.array() < 0).any() || !weights.allFinite())
    throw std::invalid_argument("sample_weighted_iid: weights must be finite and non-negative");
  if ((weights.array() > 0).count() < m)
    throw std::invalid_argument("sample_weighted_iid: fewer than m positive weights");
  Eigen::VectorXd w = weights;
  SampleSet out;
  for (Index step = 0; step < m; ++step) {
    const double total = w.sum();
    std::uniform_real_distribution<double> unif(0.0, total);
    const double u = unif(rng);
    double run = 0;
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (w(i) <= 0) continue;
      run += w(i);
      pick = i;
      if (u < run) break;
    }
    out.nodes.push_back(pick);
    w(pick) = 0;
  }
  return out;
}

void BenchConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (n_signals < 1) throw std::invalid_argument("n_signals must be at least 1");
  if (!(noise_std >= 0)) throw std::invalid_argument("noise_std must be non-negative");
  if (r < 10) throw std::invalid_argument("r must be at least 10");
  if (n_probes < 0) throw std::invalid_argument("n_probes must be non-negative");
  if (methods.empty()) throw std::invalid_argument("no sampling methods selected");
  for (Index m : m_grid)
    if (m < 1) throw std::invalid_argument("m grid entries must be positive");
  if (m_grid.empty() && std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::DppIdeal; }))
    throw std::invalid_argument("m grid is empty");
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  if (std::isinf(sorted[lo]) || std::isinf(sorted[hi])) return kInf;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool operator==(const BenchRow& a, const BenchRow& b) {
  return a.method == b.method && a.m == b.m && same_double(a.median_error, b.median_error) &&
         same_double(a.q1_error, b.q1_error) && same_double(a.q3_error, b.q3_error) && a.failures == b.failures &&
         a.n_signals == b.n_signals && a.bound_violations == b.bound_violations &&
         a.fixed_sample == b.fixed_sample && a.seed == b.seed;
}

bool operator==(const BenchResult& a, const BenchResult& b) {
  return a.n_nodes == b.n_nodes && a.n_edges == b.n_edges && a.k == b.k && same_double(a.lambda_max, b.lambda_max) &&
         same_double(a.cutoff, b.cutoff) && a.cutoff_source == b.cutoff_source && a.r == b.r &&
         a.n_probes == b.n_probes && same_double(a.noise_std, b.noise_std) && a.seed == b.seed && a.rows == b.rows;
}

const BenchRow* BenchResult::find(Method method, Index m) const {
  for (const auto& row : rows)
    if (row.method == method && row.m == m) return &row;
  return nullptr;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.graph_path) return run_benchmark(cfg, load_graph(*cfg.graph_path));
  return run_benchmark(cfg, generate_sbm(cfg.sbm));
}

BenchResult run_benchmark(const BenchConfig& cfg, const Graph& graph) {
  cfg.validate();
  const Index n = graph.n_nodes();
  if (cfg.k >= n) throw std::invalid_argument("k must be smaller than the number of nodes");
  for (Index m : cfg.m_grid)
    if (m > n) throw std::invalid_argument("m grid entry exceeds the number of nodes");

  const auto lap = build_laplacian<double>(graph);
  const bool need_next = cfg.cutoff == CutoffSource::Exact;
  auto spectrum = partial_eigendecomposition(lap, cfg.k + (need_next ? 1 : 0));
  EigenBasis<double> basis;
  basis.vectors = spectrum.vectors.leftCols(cfg.k);
  basis.values = spectrum.values.head(cfg.k);

  BenchResult res;
  res.n_nodes = n;
  res.n_edges = graph.n_edges();
  res.k = cfg.k;
  res.r = cfg.r;
  res.n_probes = cfg.n_probes > 0 ? cfg.n_probes : default_probe_count(n);
  res.noise_std = cfg.noise_std;
  res.seed = cfg.seed;
  res.lambda_max = estimate_lambda_max(lap);

  const bool needs_filter = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
    return m == Method::DppApprox || m == Method::DiagIidEstimated;
  });
  ChebyshevFilter<double> filter;
  Eigen::VectorXd estimated_diag;
  if (needs_filter) {
    if (cfg.cutoff == CutoffSource::Exact) {
      res.cutoff = 0.5 * (spectrum.values(cfg.k - 1) + spectrum.values(cfg.k));
      res.cutoff_source = "exact";
    } else {
      Rng cut_rng(derive_seed(cfg.seed, 0x6375746fULL));
      res.cutoff = estimate_lambda_k(lap, cfg.k, cfg.r, res.n_probes, cut_rng).value;
      res.cutoff_source = "estimated";
    }
    filter = fit_ideal_lowpass(res.cutoff, res.lambda_max, cfg.r, cfg.jackson);
    Rng probe_rng(derive_seed(cfg.seed, 0x70726f62ULL));
    estimated_diag = estimate_diagonal(filter, lap, random_probes<double>(n, res.n_probes, probe_rng));
  }
  const Eigen::VectorXd exact_diag = basis.vectors.rowwise().squaredNorm();

  std::vector<BandlimitedSignal<double>> signals;
  signals.reserve(static_cast<std::size_t>(cfg.n_signals));
  for (Index i = 0; i < cfg.n_signals; ++i) {
    Rng srng(derive_seed(cfg.seed, 0x7369676eULL, i));
    signals.push_back(generate_bandlimited_signal(basis, srng));
  }

  auto run_point = [&](Method method, Index m) {
    const auto t0 = std::chrono::steady_clock::now();
    BenchRow row;
    row.method = method;
    row.m = m;
    row.n_signals = cfg.n_signals;
    row.fixed_sample = is_deterministic(method);
    row.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(method) + 1, m);

    SampleSet fixed;
    if (method == Method::DppApprox) fixed = sample_approx_with(filter, lap, estimated_diag, m).sample;
    if (method == Method::DppIdeal) fixed = sample_mdpp_greedy(kernel_from_basis(basis), m);

    for (Index i = 0; i < cfg.n_signals; ++i) {
      Rng trial(derive_seed(row.seed, i));
      SampleSet a;
      switch (method) {
        case Method::UniformIid: a = sample_uniform_iid(n, m, trial); break;
        case Method::DiagIidExact: a = sample_weighted_iid(exact_diag, m, trial); break;
        case Method::DiagIidEstimated: a = sample_weighted_iid(estimated_diag, m, trial); break;
        case Method::DppApprox:
        case Method::DppIdeal: a = fixed; break;
      }
      const auto& x = signals[static_cast<std::size_t>(i)].values;
      const auto meas = measure(x, a, cfg.noise_std, trial);
      double err = kInf;
      try {
        const Eigen::VectorXd rec = reconstruct(meas, basis);
        err = (rec - x).norm();
        Eigen::VectorXd noise = meas.values;
        for (Index j = 0; j < a.size(); ++j) noise(j) -= x(a.nodes[static_cast<std::size_t>(j)]);
        const double sigma1 = singular_spectrum(basis, a)(0);
        if (err > noise.norm() / sigma1 * (1 + 1e-9) + 1e-12) ++row.bound_violations;
      } catch (const RankDeficientError&) {
        ++row.failures;
      }
      row.errors.push_back(err);
    }
    std::vector<double> sorted = row.errors;
    std::sort(sorted.begin(), sorted.end());
    row.median_error = sorted_quantile(sorted, 0.5);
    row.q1_error = sorted_quantile(sorted, 0.25);
    row.q3_error = sorted_quantile(sorted, 0.75);
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.rows.push_back(std::move(row));
  };

  // dpp-ideal samples exactly k nodes: it is evaluated once, at m = k.
  std::set<Method> requested(cfg.methods.begin(), cfg.methods.end());
  for (Method method : kAllMethods) {
    if (!requested.count(method)) continue;
    if (method == Method::DppIdeal) {
      run_point(method, cfg.k);
      continue;
    }
    for (Index m : cfg.m_grid) run_point(method, m);
  }
  return res;
}

}  // namespace gdpp
