#include "support/corpus.hpp"

#include "gdpp/approx_sampler.hpp"
#include "gdpp/chebyshev.hpp"

#include <doctest.h>

#include <set>

using namespace gdpp;
using namespace gdpp::testing;

namespace {

double far_sup_error(const ChebyshevFilter<double>& f, double margin) {
  double worst = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double l = f.lambda_max * i / 1000.0;
    if (std::abs(l - f.cutoff) <= margin) continue;
    worst = std::max(worst, std::abs(f(l) - (l <= f.cutoff ? 1.0 : 0.0)));
  }
  return worst;
}

}  // namespace

TEST_SUITE("approx") {

TEST_CASE("low-pass fit away from the cutoff") {
  for (bool jackson : {true, false}) {
    CAPTURE(jackson);
    const auto f = fit_ideal_lowpass(5.0, 10.0, 50, jackson);
    CHECK(far_sup_error(f, 1.0) < 0.05);
  }
}

TEST_CASE("degree-1 fit is decreasing") {
  const auto f = fit_ideal_lowpass(3.0, 10.0, 1);
  CHECK(f(0.0) > f(10.0));
  CHECK(f(0.0) > f(5.0));
}

TEST_CASE("raising the degree does not worsen the far-field error") {
  double prev = 1e9;
  for (Index r : {10, 25, 50, 100}) {
    const double e = far_sup_error(fit_ideal_lowpass(5.0, 10.0, r), 1.0);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
}

TEST_CASE("filter invariants: endpoints and boundedness") {
  for (double frac : {0.15, 0.3, 0.5, 0.8}) {
    const double lmax = 7.0;
    const auto f = fit_ideal_lowpass(frac * lmax, lmax, 50);
    CHECK(f(0.0) >= 0.8);
    CHECK(f(0.0) <= 1.2);
    CHECK(f(lmax) >= -0.2);
    CHECK(f(lmax) <= 0.2);
    for (int i = 0; i <= 1000; ++i) {
      const double v = f(lmax * i / 1000.0);
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 2.0);
    }
  }
}

TEST_CASE("out-of-range cutoffs give all-pass and all-stop") {
  const auto pass = fit_ideal_lowpass(20.0, 10.0, 30);
  const auto stop = fit_ideal_lowpass(-1.0, 10.0, 30);
  for (double l : {0.0, 3.0, 10.0}) {
    CHECK(pass(l) == doctest::Approx(1.0));
    CHECK(stop(l) == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(fit_ideal_lowpass(1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(fit_ideal_lowpass(1.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("jackson coefficients start at one and decay") {
  const auto g = jackson_coefficients<double>(20);
  CHECK(g(0) == doctest::Approx(1.0));
  for (Index l = 1; l <= 20; ++l) CHECK(g(l) <= g(l - 1) + 1e-12);
  CHECK(g(20) > 0);
}

TEST_CASE("apply_filter matches the dense spectral oracle") {
  Rng rng(1);
  for (const auto& [name, g] : small_corpus()) {
    CAPTURE(name);
    const auto d = dense_spectrum(g);
    const auto lap = build_laplacian<double>(g);
    const double lmax = estimate_lambda_max(lap);
    const auto f = fit_ideal_lowpass(0.3 * lmax, lmax, 50);
    const Eigen::MatrixXd x = gaussian_matrix<double>(g.n_nodes(), 3, rng);
    const Eigen::MatrixXd oracle = spectral_function(d, [&](double l) { return f(l); }) * x;
    CHECK((apply_filter(f, lap, x) - oracle).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("constant vector is scaled by h(0)") {
  const auto lap = build_laplacian<double>(grid_graph(5, 5));
  const auto f = fit_ideal_lowpass(2.0, estimate_lambda_max(lap), 40);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(25) / 5.0;
  CHECK((apply_filter(f, lap, one) - f(0.0) * one).norm() < 1e-10);
}

TEST_CASE("apply_filter is linear") {
  Rng rng(2);
  const auto lap = build_laplacian<double>(random_geometric(40, 0.3, 3));
  const auto f = fit_ideal_lowpass(1.0, estimate_lambda_max(lap), 50);
  const Eigen::VectorXd x = gaussian_matrix<double>(40, 1, rng).col(0);
  const Eigen::VectorXd y = gaussian_matrix<double>(40, 1, rng).col(0);
  const Eigen::MatrixXd lhs = apply_filter(f, lap, (2.5 * x - 0.7 * y).eval());
  const Eigen::MatrixXd rhs = 2.5 * apply_filter(f, lap, x) - 0.7 * apply_filter(f, lap, y);
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("apply_filter performs exactly r products") {
  struct CountingOp {
    const Eigen::SparseMatrix<double>* m;
    mutable int calls = 0;
    Eigen::MatrixXd operator*(const Eigen::MatrixXd& x) const {
      ++calls;
      return *m * x;
    }
  };
  const auto lap = build_laplacian<double>(path_graph(10));
  CountingOp op{&lap.matrix};
  const auto f = fit_ideal_lowpass(1.0, 4.0, 17);
  apply_filter(f, op, Eigen::MatrixXd::Identity(10, 1));
  CHECK(op.calls == 17);
}

TEST_CASE("diagonal estimate on an empty graph averages one") {
  Rng rng(3);
  const Index n = 1024;
  const auto lap = build_laplacian<double>(Graph(n, {}));
  // lambda_max is zero here; any positive interval gives h~(0) ~ 1.
  const auto f = fit_ideal_lowpass(0.5, 1.0, 50);
  const Index probes = 3 * static_cast<Index>(std::ceil(std::log2(double(n))));
  const Eigen::VectorXd p0 = estimate_diagonal(f, lap, probes, rng);
  CHECK(std::abs(p0.sum() / n - f(0.0) * f(0.0)) < 0.15);
}

TEST_CASE("diagonal estimate is unbiased for diag(h~(L)^2)") {
  const Graph g = random_geometric(60, 0.3, 4);
  const auto lap = build_laplacian<double>(g);
  const auto d = dense_spectrum(g);
  const double lmax = estimate_lambda_max(lap);
  const auto f = fit_ideal_lowpass(d.values(5) + 0.5 * (d.values(6) - d.values(5)), lmax, 50);
  const Eigen::VectorXd target = spectral_function(d, [&](double l) { return f(l) * f(l); }).diagonal();
  Rng rng(5);
  const int reps = 200;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(60), sq = Eigen::VectorXd::Zero(60);
  for (int t = 0; t < reps; ++t) {
    const Eigen::VectorXd p = estimate_diagonal(f, lap, 10, rng);
    sum += p;
    sq += p.cwiseAbs2();
  }
  const Eigen::VectorXd mean = sum / reps;
  const Eigen::VectorXd var = (sq / reps - mean.cwiseAbs2()) * reps / (reps - 1);
  int outside = 0;
  for (Index i = 0; i < 60; ++i)
    if (std::abs(mean(i) - target(i)) > 3 * std::sqrt(var(i) / reps)) ++outside;
  // Three standard errors: expect ~0.3% of entries outside.
  CHECK(outside <= 2);
}

TEST_CASE("many probes give a close entrywise diagonal") {
  const Graph g = small_sbm(80, 4, 6);
  const auto lap = build_laplacian<double>(g);
  const auto d = dense_spectrum(g);
  const auto f = fit_ideal_lowpass(0.5 * (d.values(3) + d.values(4)), estimate_lambda_max(lap), 50);
  const Eigen::VectorXd target = spectral_function(d, [&](double l) { return f(l) * f(l); }).diagonal();
  Rng rng(7);
  const Eigen::VectorXd p = estimate_diagonal(f, lap, 2000, rng);
  for (Index i = 0; i < 80; ++i)
    if (target(i) > 0.01) CHECK(std::abs(p(i) - target(i)) < 0.1 * target(i));
}

TEST_CASE("approximate sampler on two cliques picks one node per clique") {
  const Graph g = two_cliques(6);
  const auto lap = build_laplacian<double>(g);
  const auto d = dense_spectrum(g);
  Rng rng(8);
  const auto res = sample_approx(lap, 0.5 * (d.values(1) + d.values(2)), 50, 2, 100, rng);
  REQUIRE(res.sample.size() == 2);
  CHECK((res.sample.nodes[0] < 6) != (res.sample.nodes[1] < 6));
  // Exact greedy agrees.
  const auto exact = sample_mdpp_greedy(kernel_from_basis(dense_basis(g, 2)), 2);
  CHECK((exact.nodes[0] < 6) != (exact.nodes[1] < 6));
}

TEST_CASE("m = 1 returns the argmax of the estimated diagonal") {
  const auto lap = build_laplacian<double>(random_geometric(30, 0.35, 9));
  const double lmax = estimate_lambda_max(lap);
  const auto f = fit_ideal_lowpass(0.2 * lmax, lmax, 50);
  Rng rng(10);
  const Eigen::VectorXd p0 = estimate_diagonal(f, lap, 40, rng);
  Index arg;
  p0.maxCoeff(&arg);
  CHECK(sample_approx_with(f, lap, p0, 1).sample.nodes == std::vector<Index>{arg});
}

TEST_CASE("approximate sampler returns distinct nodes, even beyond the band") {
  Rng rng(11);
  const Graph g = small_sbm(100, 4, 12);
  const auto lap = build_laplacian<double>(g);
  const auto d = dense_spectrum(g);
  for (Index m : {4, 10, 30, 100}) {
    CAPTURE(m);
    ApproxSamplerOptions opt;
    opt.record_scores = true;
    const auto res = sample_approx(lap, 0.5 * (d.values(3) + d.values(4)), 50, m, 60, rng, opt);
    CHECK(res.sample.size() == m);
    CHECK_NOTHROW(res.sample.validate(100));
    CHECK(res.score_increases == 0);
    for (Index step = 1; step <= m; ++step)
      for (Index i : std::vector<Index>(res.sample.nodes.begin(), res.sample.nodes.begin() + step))
        CHECK(res.scores(i, step) == 0.0);
  }
}

TEST_CASE("approximate selection overlaps exact greedy") {
  double overlap = 0;
  const int graphs = 20;
  for (int t = 0; t < graphs; ++t) {
    const Graph g = small_sbm(100, 5, 200 + t, 10.0);
    const auto lap = build_laplacian<double>(g);
    const auto d = dense_spectrum(g);
    const Index k = 5;
    Rng rng(derive_seed(12, t));
    const auto approx = sample_approx(lap, 0.5 * (d.values(k - 1) + d.values(k)), 50, k, 200, rng);
    const auto exact = sample_mdpp_greedy(kernel_from_basis(dense_basis(g, k)), k);
    const std::set<Index> e(exact.nodes.begin(), exact.nodes.end());
    int common = 0;
    for (Index i : approx.sample.nodes) common += e.count(i) ? 1 : 0;
    overlap += double(common) / k / graphs;
  }
  MESSAGE("mean overlap with exact greedy: " << overlap);
  CHECK(overlap >= 0.6);
}

TEST_CASE("rule (b) rarely fires on a well-separated sbm") {
  SbmConfig cfg;
  cfg.seed = 3;
  const Graph g = generate_sbm(cfg);
  const auto lap = build_laplacian<double>(g);
  const auto spec = partial_eigendecomposition(lap, 11);
  Rng rng(13);
  Index fired = 0, steps = 0;
  for (Index m : {10, 15, 20, 30, 60}) {
    const auto res = sample_approx(lap, 0.5 * (spec.values(9) + spec.values(10)), 50, m, 100, rng);
    fired += static_cast<Index>(res.renormalized_steps.size());
    steps += m;
  }
  MESSAGE("rule (b) fired in " << fired << " of " << steps << " steps");
  CHECK(double(fired) / steps < 0.05);
}

TEST_CASE("approximate sampler preconditions") {
  Rng rng(14);
  const auto lap = build_laplacian<double>(path_graph(10));
  CHECK_THROWS_AS(sample_approx(lap, 1.0, 5, 2, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_approx(lap, 1.0, 50, 0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_approx(lap, 1.0, 50, 11, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_approx(build_laplacian<double>(Graph(3, {})), 1.0, 50, 1, 10, rng), std::invalid_argument);
}

TEST_CASE("approximate sampling is deterministic given the probes") {
  const auto lap = build_laplacian<double>(small_sbm(120, 4, 15));
  Rng a(16), b(16);
  CHECK(sample_approx(lap, 1.0, 50, 8, 50, a).sample == sample_approx(lap, 1.0, 50, 8, 50, b).sample);
}

}  // TEST_SUITE
