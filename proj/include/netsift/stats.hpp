#pragma once

#include <Eigen/Dense>

namespace netsift {

/// Sample mean and (n-1)-normalized standard deviation.
double mean(const Eigen::VectorXd& values);
double sample_stddev(const Eigen::VectorXd& values);

/// Regularized incomplete beta function I_x(a, b), continued-fraction form.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Quantile (inverse CDF) of Student's t; p in (0, 1).
double student_t_quantile(double p, double dof);

}  // namespace netsift
