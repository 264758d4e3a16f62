#include "gdpp/approx_sampler.hpp"
#include "gdpp/bench.hpp"
#include "gdpp/reconstruction.hpp"
#include "gdpp/spectral.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace gdpp;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

Eigen::VectorXd read_signal(const std::string& path, Index n) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::getline(in, tok);
      continue;
    }
    values.push_back(std::stod(tok));
  }
  if (static_cast<Index>(values.size()) != n)
    throw std::runtime_error("signal file has " + std::to_string(values.size()) + " values, graph has " +
                             std::to_string(n) + " nodes");
  return Eigen::Map<Eigen::VectorXd>(values.data(), n);
}

// Graph source shared by sample and reconstruct: an edge-list file, or the
// SBM described by a bench config.
struct GraphSource {
  std::string graph_path;
  std::string config_path;

  Graph load(std::uint64_t seed, bool seed_given) const {
    if (!graph_path.empty()) return load_graph(graph_path);
    BenchConfig cfg;
    if (!config_path.empty()) cfg = parse_bench_config(read_file(config_path));
    if (cfg.graph_path) return load_graph(*cfg.graph_path);
    if (seed_given) cfg.sbm.seed = seed;
    return generate_sbm(cfg.sbm);
  }
};

int run_gen_graph(const std::string& config_path, SbmConfig sbm, bool seed_given, std::uint64_t seed,
                  const std::string& out) {
  if (!config_path.empty()) sbm = parse_bench_config(read_file(config_path)).sbm;
  if (seed_given) sbm.seed = seed;
  std::ostringstream os;
  write_edge_list(os, generate_sbm(sbm));
  write_output(out, os.str());
  return 0;
}

int run_sample(const GraphSource& src, const std::string& method_name, Index k, Index m, Index r, Index n_probes,
               bool exact_cutoff, std::uint64_t seed, bool seed_given, const std::string& out) {
  const Method method = method_from_string(method_name);
  const Graph g = src.load(seed, seed_given);
  const auto lap = build_laplacian<double>(g);
  const Index n = g.n_nodes();
  if (n_probes == 0) n_probes = default_probe_count(n);
  if (method == Method::DppIdeal) m = k;
  Rng rng(derive_seed(seed, 0x73616d70ULL));

  SampleSet s;
  switch (method) {
    case Method::UniformIid: s = sample_uniform_iid(n, m, rng); break;
    case Method::DiagIidExact:
      s = sample_weighted_iid(partial_eigendecomposition(lap, k).vectors.rowwise().squaredNorm(), m, rng);
      break;
    case Method::DppIdeal: s = sample_mdpp_greedy(kernel_from_basis(partial_eigendecomposition(lap, k)), k); break;
    case Method::DiagIidEstimated:
    case Method::DppApprox: {
      double cutoff;
      if (exact_cutoff) {
        const auto spec = partial_eigendecomposition(lap, k + 1);
        cutoff = 0.5 * (spec.values(k - 1) + spec.values(k));
      } else {
        cutoff = estimate_lambda_k(lap, k, r, n_probes, rng).value;
      }
      const auto filter = fit_ideal_lowpass(cutoff, estimate_lambda_max(lap), r);
      const Eigen::VectorXd diag = estimate_diagonal(filter, lap, n_probes, rng);
      s = method == Method::DppApprox ? sample_approx_with(filter, lap, diag, m).sample
                                      : sample_weighted_iid(diag, m, rng);
      break;
    }
  }
  write_output(out, sample_set_to_json(s, to_string(method), seed) + "\n");
  return 0;
}

int run_reconstruct(const GraphSource& src, const std::string& signal_path, const std::string& samples_path, Index k,
                    double noise, std::uint64_t seed, bool seed_given, const std::string& out) {
  const Graph g = src.load(seed, seed_given);
  const auto basis = partial_eigendecomposition(build_laplacian<double>(g), k);
  const Eigen::VectorXd x = read_signal(signal_path, g.n_nodes());
  const auto samples = parse_sample_set_json(read_file(samples_path));
  Rng rng(derive_seed(seed, 0x6e6f6973ULL));
  const auto meas = measure(x, samples.sample, noise, rng);
  try {
    const Eigen::VectorXd rec = reconstruct(meas, basis);
    std::cout << "error " << std::setprecision(17) << (rec - x).norm() << "\n";
    if (!out.empty()) {
      std::ostringstream os;
      os << std::setprecision(17);
      for (Index i = 0; i < rec.size(); ++i) os << rec(i) << "\n";
      write_output(out, os.str());
    }
  } catch (const RankDeficientError& e) {
    std::cout << "error inf\n";
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run_bench(const std::string& config_path, const std::string& graph_path, bool seed_given, std::uint64_t seed,
              const std::string& format, bool timings, const std::string& out) {
  BenchConfig cfg;
  if (!config_path.empty()) cfg = parse_bench_config(read_file(config_path));
  if (!graph_path.empty()) cfg.graph_path = graph_path;
  if (seed_given) cfg.seed = seed;
  const auto res = run_benchmark(cfg);
  write_output(out, format_report(res, report_format_from_string(format), timings));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph signal sampling with m-DPPs"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string config, out, graph_path;

  auto* gen = app.add_subcommand("gen-graph", "Generate an SBM graph as an edge list");
  SbmConfig sbm;
  gen->add_option("--config", config, "Bench config JSON; its graph section is used");
  gen->add_option("--nodes", sbm.n_nodes, "Number of nodes");
  gen->add_option("--communities", sbm.n_communities, "Number of communities");
  gen->add_option("--epsilon-ratio", sbm.epsilon_ratio, "epsilon / epsilon_c");
  gen->add_option("--degree", sbm.average_degree, "Average degree");
  auto* gen_seed = gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out, "Output path (default stdout)");

  auto* smp = app.add_subcommand("sample", "Draw one sample set and print it as JSON");
  GraphSource src;
  std::string method = "dpp-approx";
  Index k = 10, m = 10, r = 50, n_probes = 0;
  bool exact_cutoff = false;
  smp->add_option("--graph", src.graph_path, "Edge-list file");
  smp->add_option("--config", src.config_path, "Bench config JSON describing the graph");
  smp->add_option("--method", method, "uniform-iid|diag-iid-exact|diag-iid-estimated|dpp-approx|dpp-ideal");
  smp->add_option("-k,--band", k, "Band size");
  smp->add_option("-m,--samples", m, "Number of samples (dpp-ideal always uses k)");
  smp->add_option("-r,--order", r, "Chebyshev order");
  smp->add_option("--probes", n_probes, "Random probes (0: 10 ceil(log2 N))");
  smp->add_flag("--exact-cutoff", exact_cutoff, "Use the midpoint of lambda_k and lambda_k+1");
  auto* smp_seed = smp->add_option("--seed", seed, "Random seed");
  smp->add_option("--out", out, "Output path (default stdout)");

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a signal from sampled values");
  std::string signal_path, samples_path;
  double noise = 0;
  rec->add_option("--graph", src.graph_path, "Edge-list file");
  rec->add_option("--config", src.config_path, "Bench config JSON describing the graph");
  rec->add_option("--signal", signal_path, "One value per node")->required();
  rec->add_option("--samples", samples_path, "SampleSet JSON")->required();
  rec->add_option("-k,--band", k, "Band size");
  rec->add_option("--noise", noise, "Measurement noise standard deviation");
  auto* rec_seed = rec->add_option("--seed", seed, "Random seed for the noise");
  rec->add_option("--out", out, "Write the reconstructed signal here");

  auto* bench = app.add_subcommand("bench", "Run the sampling benchmark");
  std::string format = "csv";
  bool timings = false;
  bench->add_option("--config", config, "Bench config JSON");
  bench->add_option("--graph", graph_path, "Edge-list file (overrides the config)");
  auto* bench_seed = bench->add_option("--seed", seed, "Base seed (overrides the config)");
  bench->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--timings", timings, "Include wall-time per row");
  bench->add_option("--out", out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_gen_graph(config, sbm, gen_seed->count() > 0, seed, out);
    if (*smp)
      return run_sample(src, method, k, m, r, n_probes, exact_cutoff, seed, smp_seed->count() > 0, out);
    if (*rec) return run_reconstruct(src, signal_path, samples_path, k, noise, seed, rec_seed->count() > 0, out);
    if (*bench) return run_bench(config, graph_path, bench_seed->count() > 0, seed, format, timings, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
