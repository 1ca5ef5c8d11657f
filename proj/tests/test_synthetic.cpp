#include <doctest.h>

#include <cmath>
#include <sstream>

#include "netsift/synthetic.hpp"

using namespace netsift;

TEST_SUITE("synthetic") {

TEST_CASE("halo size arithmetic") {
  SyntheticSpec spec;
  spec.n = 400;
  spec.f_noise = 0.25;
  CHECK(spec.total_nodes() == 500);
  spec.f_noise = 0.0;
  CHECK(spec.total_nodes() == 400);
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.n = 10;
  spec.groups = 3;  // not divisible
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.groups = 2;
  spec.p_within = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("homogeneous probabilities give binomial link counts") {
  SyntheticSpec spec;
  spec.n = 80;
  spec.groups = 4;
  spec.p_within = spec.p_between = spec.p_noise = 0.1;
  spec.f_noise = 0.25;
  spec.lambda_s = 50.0;
  const int total = spec.total_nodes();  // 100
  const double pairs = total * (total - 1) / 2.0;

  double links = 0.0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    spec.seed = d;
    links += generate_wsbm(spec).first.unique_link_count();
  }
  const double expected = 0.1 * pairs;
  const double sigma = std::sqrt(pairs * 0.1 * 0.9 / draws);
  CHECK(std::fabs(links / draws - expected) < 3.0 * sigma);
}

TEST_CASE("modular and noise nodes share expected strengths") {
  // Same link probability everywhere so the two classes are exchangeable.
  SyntheticSpec spec;
  spec.n = 60;
  spec.groups = 4;
  spec.p_within = spec.p_between = spec.p_noise = 0.15;
  spec.f_noise = 0.5;
  spec.lambda_s = 80.0;

  const int draws = 100;
  double modular_sum = 0.0, noise_sum = 0.0;
  double modular_sq = 0.0, noise_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    spec.seed = 10000 + d;
    const auto [g, truth] = generate_wsbm(spec);
    const Eigen::VectorXd s = g.strengths();
    double m = 0.0, h = 0.0;
    for (int i = 0; i < 60; ++i) m += s(i);
    for (int i = 60; i < 90; ++i) h += s(i);
    m /= 60.0;
    h /= 30.0;
    modular_sum += m;
    noise_sum += h;
    modular_sq += m * m;
    noise_sq += h * h;
  }
  const double mean_m = modular_sum / draws;
  const double mean_h = noise_sum / draws;
  const double var_m = modular_sq / draws - mean_m * mean_m;
  const double var_h = noise_sq / draws - mean_h * mean_h;
  const double sigma = std::sqrt((var_m + var_h) / draws);
  CHECK(std::fabs(mean_m - mean_h) < 3.0 * sigma);
}

TEST_CASE("graphs satisfy the weighted-graph invariants and determinism") {
  SyntheticSpec spec;
  spec.n = 40;
  spec.groups = 4;
  spec.p_noise = 0.1;
  spec.f_noise = 0.25;
  spec.lambda_s = 30.0;
  spec.seed = 77;
  const auto [a, truth_a] = generate_wsbm(spec);  // constructor validates
  const auto [b, truth_b] = generate_wsbm(spec);
  CHECK(a.weights() == b.weights());
  CHECK(a.granularity() == WeightGranularity::integer);
  CHECK(truth_a.module_of == truth_b.module_of);
  CHECK(truth_a.noise_nodes.size() == 10);

  spec.seed = 78;
  const auto [c, truth_c] = generate_wsbm(spec);
  CHECK(a.weights() != c.weights());
}

TEST_CASE("single-cell sweep accounting and determinism") {
  SyntheticSpec cell;
  cell.n = 60;
  cell.groups = 4;
  cell.p_within = 0.3;
  cell.p_between = 0.05;
  cell.lambda_s = 60.0;

  SweepConfig config;
  config.null_spec.num_samples = 25;
  config.replicates = 5;
  config.kmeans_restarts = 20;
  config.seed = 9;
  config.jobs = 2;

  const auto rows = sweep_detection({cell}, config);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.p_within == 0.3);
  }

  const auto rows_again = sweep_detection({cell}, config);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].detected == rows_again[i].detected);
    CHECK(rows[i].d_pos == rows_again[i].d_pos);
    CHECK(rows[i].groups_found == rows_again[i].groups_found);
    CHECK(rows[i].vi_own_group == rows_again[i].vi_own_group);
    CHECK(rows[i].tpr == rows_again[i].tpr);
  }

  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  std::istringstream lines(csv.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 6);  // header + 5 rows
  CHECK(csv.str().rfind("p_within,p_between,p_noise,f_noise,replicate,"
                        "detected,d_pos,groups_found,vi_own_group,"
                        "vi_single_group,tpr,tnr,runtime_ms",
                        0) == 0);
}

}  // TEST_SUITE
