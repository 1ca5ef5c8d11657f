#include <doctest.h>

#include "netsift/stats.hpp"
#include "oracles.hpp"

using namespace netsift;

TEST_SUITE("stats") {

TEST_CASE("mean and sample stddev") {
  Eigen::VectorXd v(5);
  v << 1, 2, 3, 4, 5;
  CHECK(mean(v) == 3.0);
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(2.5)));
  Eigen::VectorXd one(1);
  one << 2.0;
  CHECK_THROWS_AS(sample_stddev(one), std::invalid_argument);
}

TEST_CASE("incomplete beta endpoints and symmetry") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(a,b) = 1 - I_{1-x}(b,a)
  for (double x : {0.1, 0.35, 0.6, 0.9})
    CHECK(incomplete_beta(1.7, 2.4, x) ==
          doctest::Approx(1.0 - incomplete_beta(2.4, 1.7, 1.0 - x))
              .epsilon(1e-12));
}

TEST_CASE("t CDF agrees with quadrature oracle") {
  for (double dof : {1.0, 3.0, 7.0, 30.0, 99.0}) {
    for (double t : {-4.0, -1.5, -0.3, 0.0, 0.5, 2.2, 6.0}) {
      CHECK(student_t_cdf(t, dof) ==
            doctest::Approx(oracle::simpson_t_cdf(t, dof)).epsilon(1e-9));
    }
  }
}

TEST_CASE("t quantile matches the reference table value at 99 dof") {
  // two-sided 95% interval <-> alpha = 0.975
  CHECK(student_t_quantile(0.975, 99.0) ==
        doctest::Approx(1.9842).epsilon(3e-4));
  CHECK(student_t_quantile(0.5, 42.0) == 0.0);
}

TEST_CASE("quantile inverts the CDF") {
  for (double dof : {2.0, 9.0, 50.0}) {
    for (double p : {0.01, 0.2, 0.5, 0.8, 0.975, 0.999}) {
      CHECK(student_t_cdf(student_t_quantile(p, dof), dof) ==
            doctest::Approx(p).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(student_t_quantile(0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(student_t_quantile(1.0, 5.0), std::invalid_argument);
}

}  // TEST_SUITE
