#include "netsift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "netsift/parallel.hpp"
#include "netsift/random.hpp"
#include "netsift/stats.hpp"

namespace netsift {

namespace {

constexpr Eigen::Index kDenseLimit = 2000;
constexpr int kExtremalBlock = 64;

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&pivot);
    if (vectors(pivot, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("eig_symmetric: matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("eig_symmetric: matrix is not symmetric");
}

}  // namespace

Eigen::MatrixXd comparison_matrix(const Eigen::MatrixXd& weights,
                                  const Eigen::MatrixXd& expectation) {
  if (weights.rows() != expectation.rows() ||
      weights.cols() != expectation.cols())
    throw std::invalid_argument("comparison_matrix: dimension mismatch");
  return weights - expectation;
}

Eigen::MatrixXd comparison_matrix(const WeightedGraph& g,
                                  const Eigen::MatrixXd& expectation) {
  return comparison_matrix(g.weights(), expectation);
}

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      (m + m.transpose()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_symmetric: solver did not converge");
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  canonicalize_signs(out.vectors);
  return out;
}

Eigen::VectorXd eig_symmetric_values(const Eigen::MatrixXd& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute((m + m.transpose()) / 2.0, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_symmetric_values: solver did not converge");
  return solver.eigenvalues().reverse();
}

EigenDecomposition eig_symmetric_extremal(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    Eigen::Index n, int n_top, int n_bottom, std::uint64_t seed) {
  const int wanted = n_top + n_bottom;
  if (wanted <= 0 || wanted > n)
    throw std::invalid_argument("eig_symmetric_extremal: bad eigenpair count");

  const Eigen::Index max_steps =
      std::min<Eigen::Index>(n, std::max<Eigen::Index>(12 * wanted + 80, 240));
  Eigen::MatrixXd basis(n, max_steps);
  Eigen::VectorXd diag(max_steps), offdiag(max_steps);

  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&](Eigen::Index cols) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    if (cols > 0)  // restart vectors must stay orthogonal to the basis
      v -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
    return (v / v.norm()).eval();
  };

  basis.col(0) = random_unit(0);
  double beta_prev = 0.0;
  Eigen::Index k = 0;
  EigenDecomposition result;

  auto try_extract = [&](Eigen::Index steps, bool force) -> bool {
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index i = 0; i < steps; ++i) {
      tri(i, i) = diag(i);
      if (i + 1 < steps) tri(i, i + 1) = tri(i + 1, i) = offdiag(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
    const Eigen::VectorXd theta = small.eigenvalues();   // ascending
    const Eigen::MatrixXd s = small.eigenvectors();
    if (steps < wanted) return false;

    std::vector<Eigen::Index> pick;
    for (int t = 0; t < n_top; ++t) pick.push_back(steps - 1 - t);
    for (int b = n_bottom - 1; b >= 0; --b) pick.push_back(b);

    const double scale = std::max(theta.cwiseAbs().maxCoeff(), 1e-300);
    const double beta_k = offdiag(steps - 1);
    if (!force) {
      for (Eigen::Index idx : pick) {
        const double residual = std::fabs(beta_k * s(steps - 1, idx));
        if (residual > 1e-8 * scale) return false;
      }
    }
    result.values.resize(wanted);
    result.vectors.resize(n, wanted);
    for (int c = 0; c < wanted; ++c) {
      result.values(c) = theta(pick[c]);
      result.vectors.col(c) = basis.leftCols(steps) * s.col(pick[c]);
      result.vectors.col(c).normalize();
    }
    canonicalize_signs(result.vectors);
    return true;
  };

  while (k < max_steps) {
    Eigen::VectorXd w = apply(basis.col(k));
    if (k > 0) w -= beta_prev * basis.col(k - 1);
    diag(k) = basis.col(k).dot(w);
    w -= diag(k) * basis.col(k);
    // Full reorthogonalization, twice, to hold orthogonality at n ~ 10^4.
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    const double beta = w.norm();
    offdiag(k) = beta;
    ++k;
    if (k >= wanted && (k % 10 == 0 || k == max_steps) &&
        try_extract(k, false))
      return result;
    if (k == max_steps) break;
    if (beta < 1e-12) {
      // Invariant subspace found; restart in its orthogonal complement.
      basis.col(k) = random_unit(k);
      beta_prev = 0.0;
    } else {
      basis.col(k) = w / beta;
      beta_prev = beta;
    }
  }
  if (k == n && try_extract(k, true)) return result;  // full Krylov space
  throw std::runtime_error("eig_symmetric_extremal: did not converge");
}

namespace {

EigenDecomposition dense_extremal(const Eigen::MatrixXd& m, int n_top,
                                  int n_bottom) {
  const Eigen::Index n = m.rows();
  EigenDecomposition full = eig_symmetric(m);
  EigenDecomposition out;
  const int wanted = std::min<int>(n_top + n_bottom, n);
  out.values.resize(wanted);
  out.vectors.resize(n, wanted);
  int c = 0;
  for (int t = 0; t < n_top && c < wanted; ++t, ++c) {
    out.values(c) = full.values(t);
    out.vectors.col(c) = full.vectors.col(t);
  }
  for (int b = n_bottom; b >= 1 && c < wanted; --b, ++c) {
    out.values(c) = full.values(n - b);
    out.vectors.col(c) = full.vectors.col(n - b);
  }
  return out;
}

}  // namespace

EigenDecomposition eig_symmetric_extremal(const Eigen::MatrixXd& m, int n_top,
                                          int n_bottom) {
  require_symmetric(m);
  const Eigen::Index n = m.rows();
  if (n <= std::max<Eigen::Index>(3 * (n_top + n_bottom), 32))
    return dense_extremal(m, n_top, n_bottom);
  try {
    return eig_symmetric_extremal(
        [&m](const Eigen::VectorXd& x) { return (m * x).eval(); }, n, n_top,
        n_bottom);
  } catch (const std::runtime_error&) {
    // Hard spectrum for the iteration budget; the dense path is exact.
    return dense_extremal(m, n_top, n_bottom);
  }
}

SpectralEstimate estimate_bounds(const NullEnsemble& ensemble, int jobs) {
  const int n_samples = ensemble.num_samples();
  const Eigen::Index n = ensemble.graph().size();
  SpectralEstimate est;
  est.sampled_maxima.resize(n_samples);
  est.sampled_minima.resize(n_samples);

  parallel_for_index(n_samples, jobs, [&](int i) {
    const Eigen::MatrixXd c_star =
        comparison_matrix(ensemble.sample(i), ensemble.expectation());
    if (n <= kDenseLimit) {
      const Eigen::VectorXd values = eig_symmetric_values(c_star);
      est.sampled_maxima(i) = values(0);
      est.sampled_minima(i) = values(n - 1);
    } else {
      const EigenDecomposition extremes = eig_symmetric_extremal(c_star, 1, 1);
      est.sampled_maxima(i) = extremes.values(0);
      est.sampled_minima(i) = extremes.values(1);
    }
  });

  est.upper_bound = est.sampled_maxima.mean();
  est.lower_bound = est.sampled_minima.mean();
  return est;
}

std::pair<int, int> detect_dimensions(const Eigen::VectorXd& data_eigenvalues,
                                      double upper_bound, double lower_bound) {
  int d_pos = 0, d_neg = 0;
  for (Eigen::Index i = 0; i < data_eigenvalues.size(); ++i) {
    if (data_eigenvalues(i) > upper_bound) ++d_pos;
    if (data_eigenvalues(i) < lower_bound) ++d_neg;
  }
  return {d_pos, d_neg};
}

SpectralEstimate spectral_estimate(const WeightedGraph& g,
                                   const NullEnsemble& ensemble, int jobs) {
  const Eigen::MatrixXd c = comparison_matrix(g, ensemble.expectation());
  SpectralEstimate est = estimate_bounds(ensemble, jobs);

  if (g.size() <= kDenseLimit) {
    EigenDecomposition eig = eig_symmetric(c);
    est.data_eigenvalues = std::move(eig.values);
    est.data_eigenvectors = std::move(eig.vectors);
  } else {
    // Iterative path: grow the extremal block until it covers d_pos + d_neg.
    int block = kExtremalBlock;
    while (true) {
      const int each = std::min<int>(block, g.size() / 2);
      EigenDecomposition eig = eig_symmetric_extremal(c, each, each);
      est.data_eigenvalues = std::move(eig.values);
      est.data_eigenvectors = std::move(eig.vectors);
      const auto [d_pos, d_neg] = detect_dimensions(
          est.data_eigenvalues, est.upper_bound, est.lower_bound);
      if ((d_pos < each && d_neg < each) || 2 * each >= g.size()) break;
      block *= 2;
    }
  }

  std::tie(est.d_pos, est.d_neg) = detect_dimensions(
      est.data_eigenvalues, est.upper_bound, est.lower_bound);
  return est;
}

TestReport ci_test(const Eigen::VectorXd& sampled_maxima,
                   const Eigen::VectorXd& data_eigenvalues, double alpha) {
  const Eigen::Index n_samples = sampled_maxima.size();
  if (n_samples < 2)
    throw std::invalid_argument("ci_test needs at least 2 samples");
  const double mu = sampled_maxima.mean();
  const double s = sample_stddev(sampled_maxima);
  const double limit =
      mu + student_t_quantile(alpha, double(n_samples - 1)) *
               s / std::sqrt(double(n_samples));

  TestReport report;
  report.method = TestMethod::confidence_interval;
  report.alpha = alpha;
  for (Eigen::Index i = 0; i < data_eigenvalues.size(); ++i) {
    const double lambda = data_eigenvalues(i);
    TestEntry entry;
    entry.eigenvalue = lambda;
    entry.statistic =
        s > 0.0 ? (lambda - mu) / (s / std::sqrt(double(n_samples))) : 0.0;
    entry.p_or_limit = limit;
    entry.exceeds = lambda > limit;
    report.per_eigenvalue.push_back(entry);
  }
  return report;
}

TestEntry t_test_eig(const Eigen::VectorXd& sampled_maxima, double eigenvalue) {
  const Eigen::Index n_samples = sampled_maxima.size();
  if (n_samples < 2)
    throw std::invalid_argument("t_test_eig needs at least 2 samples");
  const double s = sample_stddev(sampled_maxima);
  if (s == 0.0)
    throw std::invalid_argument("t_test_eig: zero sample standard deviation");
  const double t =
      (sampled_maxima.mean() - eigenvalue) / (s / std::sqrt(double(n_samples)));
  TestEntry entry;
  entry.eigenvalue = eigenvalue;
  entry.statistic = t;
  entry.p_or_limit = student_t_cdf(t, double(n_samples - 1));
  return entry;
}

TestEntry permutation_test(const Eigen::VectorXd& sampled_maxima,
                           double eigenvalue, int n_permutations,
                           std::uint64_t seed, bool force_monte_carlo) {
  const Eigen::Index n = sampled_maxima.size();
  const Eigen::VectorXd diffs = sampled_maxima.array() - eigenvalue;
  const double observed = diffs.sum();

  std::int64_t hits = 0, total = 0;
  if (n <= 12 && !force_monte_carlo) {
    const std::int64_t patterns = std::int64_t(1) << n;
    for (std::int64_t mask = 0; mask < patterns; ++mask) {
      double stat = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        stat += (mask >> i) & 1 ? -diffs(i) : diffs(i);
      if (stat <= observed) ++hits;
    }
    total = patterns;
  } else {
    auto rng = substream_engine(seed, RngStream::permutation, 0);
    std::bernoulli_distribution flip(0.5);
    for (int p = 0; p < n_permutations; ++p) {
      double stat = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        stat += flip(rng) ? -diffs(i) : diffs(i);
      if (stat <= observed) ++hits;
    }
    total = n_permutations;
  }

  TestEntry entry;
  entry.eigenvalue = eigenvalue;
  entry.statistic = observed;
  entry.p_or_limit = static_cast<double>(hits) / static_cast<double>(total);
  return entry;
}

std::pair<int, int> detect_dimensions_with_method(
    const SpectralEstimate& estimate, BoundMethod method, double alpha,
    int n_permutations, std::uint64_t seed) {
  const Eigen::VectorXd& values = estimate.data_eigenvalues;
  switch (method) {
    case BoundMethod::mean:
      return detect_dimensions(values, estimate.upper_bound,
                               estimate.lower_bound);
    case BoundMethod::ci: {
      const Eigen::Index n = estimate.sampled_maxima.size();
      const double tq = student_t_quantile(alpha, double(n - 1));
      const double upper = estimate.upper_bound +
                           tq * sample_stddev(estimate.sampled_maxima) /
                               std::sqrt(double(n));
      const double lower = estimate.lower_bound -
                           tq * sample_stddev(estimate.sampled_minima) /
                               std::sqrt(double(n));
      return detect_dimensions(values, upper, lower);
    }
    case BoundMethod::ttest: {
      const double significance = 1.0 - alpha;
      int d_pos = 0, d_neg = 0;
      for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (t_test_eig(estimate.sampled_maxima, values(i)).p_or_limit <
            significance)
          ++d_pos;
        // Mirrored one-tailed test against the sampled minima.
        if (t_test_eig(-estimate.sampled_minima, -values(i)).p_or_limit <
            significance)
          ++d_neg;
      }
      return {d_pos, d_neg};
    }
    case BoundMethod::permutation: {
      const double significance = 1.0 - alpha;
      int d_pos = 0, d_neg = 0;
      for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (permutation_test(estimate.sampled_maxima, values(i),
                             n_permutations, splitmix64(seed) + i)
                .p_or_limit < significance)
          ++d_pos;
        if (permutation_test(-estimate.sampled_minima, -values(i),
                             n_permutations, splitmix64(seed ^ 0xabcd) + i)
                .p_or_limit < significance)
          ++d_neg;
      }
      return {d_pos, d_neg};
    }
  }
  throw std::logic_error("unknown bound method");
}

}  // namespace netsift
