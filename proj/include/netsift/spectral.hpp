#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "netsift/graph.hpp"
#include "netsift/null_models.hpp"

namespace netsift {

/// C = W - <P>: the departure of the data from the null model's expectation.
/// Generalizes the modularity matrix. Throws on dimension mismatch.
Eigen::MatrixXd comparison_matrix(const Eigen::MatrixXd& weights,
                                  const Eigen::MatrixXd& expectation);
Eigen::MatrixXd comparison_matrix(const WeightedGraph& g,
                                  const Eigen::MatrixXd& expectation);

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns matching `values`
};

/// Dense symmetric eigendecomposition. Eigenvalues descending; each
/// eigenvector's largest-magnitude entry is made positive so repeated runs
/// return identical vectors. Input must be symmetric within 1e-10 * ||M||.
EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m);

/// Descending eigenvalues only (cheaper; used when streaming null samples).
Eigen::VectorXd eig_symmetric_values(const Eigen::MatrixXd& m);

/// Extremal eigenpairs of a large symmetric operator via Lanczos iteration
/// with full reorthogonalization. Returns `n_top` leading and `n_bottom`
/// trailing eigenpairs (concatenated, descending). Residual tolerance on
/// convergence is 1e-8 * spectral scale.
EigenDecomposition eig_symmetric_extremal(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    Eigen::Index n, int n_top, int n_bottom, std::uint64_t seed = 12345);
EigenDecomposition eig_symmetric_extremal(const Eigen::MatrixXd& m, int n_top,
                                          int n_bottom);

enum class BoundMethod { mean, ci, ttest, permutation };

struct SpectralEstimate {
  Eigen::VectorXd data_eigenvalues;   // descending
  Eigen::MatrixXd data_eigenvectors;  // columns matching data_eigenvalues
  double upper_bound = 0.0;           // <lambda*_max>
  double lower_bound = 0.0;           // <lambda*_min>
  Eigen::VectorXd sampled_maxima;     // lambda*_max(i), i = 1..N
  Eigen::VectorXd sampled_minima;
  int d_pos = 0;  // eigenvalues above the upper bound
  int d_neg = 0;  // eigenvalues below the lower bound

  /// Leading d_pos eigenvectors (the retained low-dimensional basis).
  Eigen::MatrixXd retained_vectors() const {
    return data_eigenvectors.leftCols(d_pos);
  }
};

/// Streams the ensemble's samples through C*_i = P*_i - <P>, collecting each
/// sample's extreme eigenvalues; the bounds are their means. Samples are
/// processed concurrently when jobs > 1 with a fixed-order reduction, so the
/// result is identical at any job count.
SpectralEstimate estimate_bounds(const NullEnsemble& ensemble, int jobs = 1);

/// d_pos = #{lambda_j > upper}, d_neg = #{lambda_j < lower}; ties at a bound
/// do not count as exceeding it.
std::pair<int, int> detect_dimensions(const Eigen::VectorXd& data_eigenvalues,
                                      double upper_bound, double lower_bound);

/// Full spectral pass for a data graph: eigendecomposition of C plus bounds
/// and dimension counts from the ensemble.
SpectralEstimate spectral_estimate(const WeightedGraph& g,
                                   const NullEnsemble& ensemble, int jobs = 1);

// ---- Null-hypothesis significance testing variants (upper/lower bounds by
// ---- sampling are the default; these are optional alternatives).

enum class TestMethod { confidence_interval, t_test, permutation };

struct TestEntry {
  double eigenvalue = 0.0;
  double statistic = 0.0;   // t value, or the CI limit, or the permutation d
  double p_or_limit = 0.0;  // p-value (tests) or the confidence limit (CI)
  bool exceeds = false;
};

struct TestReport {
  TestMethod method = TestMethod::confidence_interval;
  double alpha = 0.975;
  std::vector<TestEntry> per_eigenvalue;
};

/// Upper confidence limit <lambda*_max> + t_{alpha,N-1} * S / sqrt(N); each
/// data eigenvalue is compared against the limit. Requires N >= 2.
TestReport ci_test(const Eigen::VectorXd& sampled_maxima,
                   const Eigen::VectorXd& data_eigenvalues, double alpha);

/// One-sample, one-tailed t-test of lambda_j against the sampled maxima:
/// t = (<lambda*_max> - lambda_j) / (S/sqrt(N)), p from the left tail.
TestEntry t_test_eig(const Eigen::VectorXd& sampled_maxima, double eigenvalue);

/// Sign-permutation test on d = sum_i (lambda*_max(i) - lambda_j): exact
/// enumeration of all 2^N sign patterns when N <= 12, else Monte-Carlo with
/// n_permutations draws. `force_monte_carlo` bypasses the exact path (used to
/// validate the Monte-Carlo estimate against the enumeration oracle).
TestEntry permutation_test(const Eigen::VectorXd& sampled_maxima,
                           double eigenvalue, int n_permutations,
                           std::uint64_t seed = 0,
                           bool force_monte_carlo = false);

/// Dimension counts under the selected bound method. `alpha` is the CI level
/// (0.975 for a 95% one-sided limit); tests flag at significance 1 - alpha.
std::pair<int, int> detect_dimensions_with_method(
    const SpectralEstimate& estimate, BoundMethod method, double alpha,
    int n_permutations = 10000, std::uint64_t seed = 0);

}  // namespace netsift
