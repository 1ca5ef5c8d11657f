#include <doctest.h>

#include <numeric>
#include <random>

#include "netsift/metrics.hpp"
#include "netsift/partition.hpp"
#include "netsift/synthetic.hpp"

using namespace netsift;

namespace {

WeightedGraph labelled(const Eigen::MatrixXd& w) {
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    labels.push_back(std::to_string(i));
  return WeightedGraph(labels, w);
}

// Two disconnected cliques of size `half`.
WeightedGraph two_cliques(int half, double weight = 1.0) {
  const int n = 2 * half;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((i < half) == (j < half)) w(i, j) = w(j, i) = weight;
  return labelled(w);
}

SpectralEstimate estimate_of(const WeightedGraph& g,
                             const Eigen::MatrixXd& expectation) {
  SpectralEstimate est;
  EigenDecomposition eig = eig_symmetric(comparison_matrix(g, expectation));
  est.data_eigenvalues = std::move(eig.values);
  est.data_eigenvectors = std::move(eig.vectors);
  return est;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("make_partition compacts labels in first-appearance order") {
  const Partition p = make_partition({5, 5, 2, 9, 2});
  CHECK(p.assignment == std::vector<int>{0, 0, 1, 2, 1});
  CHECK(p.num_groups == 3);
}

TEST_CASE("modularity") {
  const WeightedGraph g = two_cliques(4, 2.0);
  const Eigen::MatrixXd expectation = wcm_expectation(g);

  SUBCASE("one community with a weight-conserving null scores zero") {
    Partition whole;
    whole.assignment.assign(8, 0);
    whole.num_groups = 1;
    CHECK(std::fabs(modularity(g, expectation, whole)) < 1e-8);
  }
  SUBCASE("the planted split scores positive") {
    Partition planted;
    planted.assignment = {0, 0, 0, 0, 1, 1, 1, 1};
    planted.num_groups = 2;
    CHECK(modularity(g, expectation, planted) > 0.0);
    CHECK(modularity(g, expectation, planted, true) ==
          doctest::Approx(modularity(g, expectation, planted) /
                          g.weights().sum()));
  }
  SUBCASE("invariant under group relabeling") {
    Partition a, b;
    a.assignment = {0, 0, 1, 1, 2, 2, 2, 2};
    b.assignment = {2, 2, 0, 0, 1, 1, 1, 1};
    a.num_groups = b.num_groups = 3;
    CHECK(modularity(g, expectation, a) ==
          doctest::Approx(modularity(g, expectation, b)));
  }
  SUBCASE("size mismatch is an error") {
    Partition bad;
    bad.assignment = {0, 1};
    CHECK_THROWS_AS(modularity(g, expectation, bad), std::invalid_argument);
  }
}

TEST_CASE("k-means partition") {
  // Two well-separated planar clouds.
  Eigen::MatrixXd points(8, 2);
  points << 0.0, 0.1, 0.1, -0.1, -0.1, 0.0, 0.05, 0.05, 10.0, 10.1, 10.1, 9.9,
      9.9, 10.0, 10.05, 10.05;
  const WeightedGraph g = two_cliques(4);
  const Eigen::MatrixXd expectation = wcm_expectation(g);

  SUBCASE("separable clouds are recovered exactly") {
    const Partition p = kmeans_partition(points, 2, 10, expectation, g, 1);
    CHECK(p.num_groups == 2);
    for (int i = 1; i < 4; ++i) CHECK(p.assignment[i] == p.assignment[0]);
    for (int i = 5; i < 8; ++i) CHECK(p.assignment[i] == p.assignment[4]);
    CHECK(p.assignment[0] != p.assignment[4]);
  }
  SUBCASE("more restarts never lower the best Q") {
    const Partition one = kmeans_partition(points, 2, 1, expectation, g, 7);
    const Partition many = kmeans_partition(points, 2, 100, expectation, g, 7);
    CHECK(many.quality >= one.quality);
  }
  SUBCASE("bitwise reproducible for a fixed seed") {
    const Partition a = kmeans_partition(points, 2, 20, expectation, g, 99);
    const Partition b = kmeans_partition(points, 2, 20, expectation, g, 99);
    CHECK(a.assignment == b.assignment);
    CHECK(a.quality == b.quality);
  }
  SUBCASE("fewer distinct points than clusters is an error") {
    Eigen::MatrixXd collapsed = Eigen::MatrixXd::Zero(8, 2);
    CHECK_THROWS_AS(kmeans_partition(collapsed, 2, 5, expectation, g, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("consensus clustering") {
  SUBCASE("perfectly separable blocks converge immediately") {
    const WeightedGraph g = two_cliques(5);
    const Eigen::MatrixXd expectation = wcm_expectation(g);
    const Eigen::MatrixXd c = comparison_matrix(g, expectation);
    ConsensusOptions options;
    options.initial_groups = 2;
    options.seed = 1;
    ConsensusState state;
    const Partition p =
        consensus_cluster(c, expectation, g, 50, options, &state);
    CHECK(state.converged);
    CHECK(state.iterations == 1);
    CHECK(p.num_groups == 2);
    for (int i = 1; i < 5; ++i) CHECK(p.assignment[i] == p.assignment[0]);
    for (int i = 6; i < 10; ++i) CHECK(p.assignment[i] == p.assignment[5]);
  }
  SUBCASE("dense positive-weight toy recovers about five groups") {
    // Correlation-matrix-like network: five blocks, strong within, weak
    // between, every weight positive.
    const int block = 8, blocks = 5, n = block * blocks;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> jitter(-0.03, 0.03);
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double base = (i / block == j / block) ? 0.8 : 0.15;
        w(i, j) = w(j, i) = std::max(0.01, base + jitter(rng));
      }
    w.diagonal().setZero();
    const WeightedGraph g = labelled(w);
    const Eigen::MatrixXd expectation = wcm_expectation(g);
    const Eigen::MatrixXd c = comparison_matrix(g, expectation);
    ConsensusOptions options;
    options.initial_groups = 5;
    options.seed = 4;
    ConsensusState state;
    const Partition p =
        consensus_cluster(c, expectation, g, 50, options, &state);
    CHECK(p.num_groups >= 4);
    CHECK(p.num_groups <= 6);
    const std::vector<int> planted = [&] {
      std::vector<int> v(n);
      for (int i = 0; i < n; ++i) v[i] = i / block;
      return v;
    }();
    CHECK(vi_normalized(p.assignment, planted) < 0.15);
  }
  SUBCASE("consensus null values lie in (0,1) and match random co-clustering") {
    const int p_runs = 200, k = 4, l = 2;
    const double null_value = consensus_null_value(p_runs, k, l);
    CHECK(null_value > 0.0);
    CHECK(null_value < 1.0);
    // Monte-Carlo: uniformly random partitions, p per c in l..k.
    std::mt19937_64 rng(23);
    const int n = 24;
    double co_sum = 0.0;
    std::int64_t pairs = 0;
    Eigen::MatrixXd co = Eigen::MatrixXd::Zero(n, n);
    int partitions = 0;
    for (int c = l; c <= k; ++c) {
      std::uniform_int_distribution<int> group(0, c - 1);
      for (int run = 0; run < p_runs; ++run, ++partitions) {
        std::vector<int> labels(n);
        for (int i = 0; i < n; ++i) labels[i] = group(rng);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (labels[i] == labels[j]) co(i, j) += 1.0;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        co_sum += co(i, j) / partitions - null_value;
        ++pairs;
      }
    CHECK(std::fabs(co_sum / pairs) < 0.005);  // zero-mean within MC noise
  }
}

TEST_CASE("louvain") {
  SUBCASE("two disconnected triangles split in two") {
    const WeightedGraph g = two_cliques(3);
    const Partition p = louvain(g, wcm_expectation(g), 3);
    CHECK(p.num_groups == 2);
    CHECK(p.quality > 0.0);
  }
  SUBCASE("a null-consistent network still yields several groups") {
    std::mt19937_64 rng(29);
    const int n = 40;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    std::bernoulli_distribution link(0.25);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (link(rng)) w(i, j) = w(j, i) = 1.0;
    const WeightedGraph g = labelled(w);
    const Partition p = louvain(g, wcm_expectation(g), 11);
    CHECK(p.num_groups > 1);
  }
}

TEST_CASE("multi-way vector partition") {
  const WeightedGraph g = two_cliques(5, 2.0);
  const Eigen::MatrixXd expectation = wcm_expectation(g);
  const SpectralEstimate est = estimate_of(g, expectation);

  SUBCASE("k=2 separates the cliques") {
    bool converged = false;
    const Partition p = multiway_partition(est, 2, expectation, g, 5, &converged);
    CHECK(converged);
    CHECK(p.num_groups == 2);
    CHECK(p.quality > 0.0);
    for (int i = 1; i < 5; ++i) CHECK(p.assignment[i] == p.assignment[0]);
  }
  SUBCASE("deterministic for a fixed seed") {
    const Partition a = multiway_partition(est, 2, expectation, g, 5);
    const Partition b = multiway_partition(est, 2, expectation, g, 5);
    CHECK(a.assignment == b.assignment);
  }
  SUBCASE("k-1 beyond the positive eigenpairs is an error") {
    CHECK_THROWS_AS(multiway_partition(est, 9, expectation, g, 5),
                    std::invalid_argument);
  }
}

TEST_CASE("knee detection") {
  SUBCASE("two exact segments meeting at k=5") {
    // rising to k=5 then flat: slopes differ, SSE at the knee is zero
    std::vector<double> q;
    for (int k = 2; k <= 12; ++k) q.push_back(k <= 5 ? 2.0 * k : 10.0);
    CHECK(knee_index(q, 2) == 5);
  }
  SUBCASE("flat curve picks the smallest interior k") {
    std::vector<double> q(19, 3.5);
    CHECK(knee_index(q, 2) == 3);
  }
}

TEST_CASE("unsupervised multi-way clustering") {
  // Three clear blocks.
  const int block = 6, n = 18;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (i / block == j / block) w(i, j) = w(j, i) = 2.0;
  const WeightedGraph g = labelled(w);
  const Eigen::MatrixXd expectation = wcm_expectation(g);
  const SpectralEstimate est = estimate_of(g, expectation);

  // The single-run vector iteration can merge degenerate blocks, so the
  // group count is only loosely pinned; the knee partition must be modular.
  const Partition p = multiway_unsupervised(est, 10, expectation, g, 2);
  CHECK(p.num_groups >= 2);
  CHECK(p.num_groups <= 4);
  CHECK(p.quality > 0.0);

  CHECK_THROWS_AS(multiway_unsupervised(est, 2, expectation, g, 2),
                  std::invalid_argument);
}

TEST_CASE("planted partitions beat random ones on modular synthetics") {
  for (int net = 0; net < 50; ++net) {
    SyntheticSpec spec;
    spec.n = 100;
    spec.groups = 4;
    spec.p_within = 0.2;
    spec.p_between = 0.05;
    spec.lambda_s = 50.0;
    spec.seed = 1000 + net;
    const auto [g, truth] = generate_wsbm(spec);
    const Eigen::MatrixXd expectation = wcm_expectation(g);

    Partition planted;
    planted.assignment = truth.module_of;
    planted.num_groups = 4;

    std::mt19937_64 rng(net);
    std::uniform_int_distribution<int> group(0, 3);
    Partition random;
    random.assignment.resize(100);
    for (int i = 0; i < 100; ++i) random.assignment[i] = group(rng);
    random.num_groups = 4;

    CHECK(modularity(g, expectation, planted) >
          modularity(g, expectation, random));
  }
}

}  // TEST_SUITE
