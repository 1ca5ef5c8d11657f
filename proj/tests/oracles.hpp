// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// det(M - lambda I) through LU factorization: a different algorithmic route
// than the QR-iteration eigensolver under test.
inline double shifted_determinant(const Eigen::MatrixXd& m, double lambda) {
  Eigen::MatrixXd shifted = m;
  shifted.diagonal().array() -= lambda;
  return shifted.fullPivLu().determinant();
}

// Eigenvalues of a small symmetric matrix by scanning the characteristic
// polynomial for sign changes over the Gershgorin interval and bisecting
// each bracket. Assumes simple eigenvalues (true for random test matrices).
inline std::vector<double> charpoly_eigenvalues(const Eigen::MatrixXd& m,
                                                int scan_points = 40000) {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) radius += std::fabs(m(i, j));
    lo = std::min(lo, m(i, i) - radius);
    hi = std::max(hi, m(i, i) + radius);
  }
  const double pad = 1e-6 * (hi - lo) + 1e-12;
  lo -= pad;
  hi += pad;

  std::vector<double> roots;
  double prev_x = lo;
  double prev_det = shifted_determinant(m, lo);
  for (int s = 1; s <= scan_points; ++s) {
    const double x = lo + (hi - lo) * s / scan_points;
    const double det = shifted_determinant(m, x);
    if ((prev_det < 0 && det > 0) || (prev_det > 0 && det < 0) || det == 0.0) {
      double a = prev_x, b = x;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (a + b);
        const double dm = shifted_determinant(m, mid);
        if ((dm < 0) == (prev_det < 0))
          a = mid;
        else
          b = mid;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_det = det;
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

// Student-t CDF by adaptive Simpson quadrature of the density; shares only
// lgamma with the library's incomplete-beta route.
inline double t_density(double x, double dof) {
  const double log_norm = std::lgamma((dof + 1.0) / 2.0) -
                          std::lgamma(dof / 2.0) -
                          0.5 * std::log(dof * M_PI);
  return std::exp(log_norm - (dof + 1.0) / 2.0 * std::log1p(x * x / dof));
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double fa, double fb,
                               double fm, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 48);
}

inline double simpson_t_cdf(double t, double dof) {
  const double body =
      integrate([dof](double x) { return t_density(x, dof); }, 0.0,
                std::fabs(t));
  return t >= 0.0 ? 0.5 + body : 0.5 - body;
}

// Exact one-tailed sign-permutation p-value by recursive enumeration.
inline void enumerate_signs(const std::vector<double>& diffs, std::size_t i,
                            double partial, double observed, long& hits,
                            long& total) {
  if (i == diffs.size()) {
    ++total;
    if (partial <= observed) ++hits;
    return;
  }
  enumerate_signs(diffs, i + 1, partial + diffs[i], observed, hits, total);
  enumerate_signs(diffs, i + 1, partial - diffs[i], observed, hits, total);
}

inline double exact_sign_permutation_p(const std::vector<double>& diffs) {
  double observed = 0.0;
  for (double d : diffs) observed += d;
  long hits = 0, total = 0;
  enumerate_signs(diffs, 0, 0.0, observed, hits, total);
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
