#include "netsift/rejection.hpp"

#include <cmath>
#include <stdexcept>

#include "netsift/parallel.hpp"

namespace netsift {

namespace {

constexpr Eigen::Index kDenseLimit = 2000;

double column_weight(double eigenvalue, NormWeighting weighting) {
  return weighting == NormWeighting::eigenvalue
             ? eigenvalue
             : std::sqrt(std::fabs(eigenvalue));
}

// Projection columns from d eigenpairs taken off one end of the spectrum.
// For the negative side the weights use |lambda| so norms stay comparable.
Eigen::MatrixXd side_projection(const Eigen::VectorXd& values,
                                const Eigen::MatrixXd& vectors, int d,
                                bool negative_side, NormWeighting weighting) {
  const Eigen::Index n = vectors.rows();
  Eigen::MatrixXd projection(n, d);
  const Eigen::Index count = values.size();
  for (int i = 0; i < d; ++i) {
    const Eigen::Index idx = negative_side ? count - 1 - i : i;
    const double lambda =
        negative_side ? std::fabs(values(idx)) : values(idx);
    projection.col(i) = column_weight(lambda, weighting) * vectors.col(idx);
  }
  return projection;
}

}  // namespace

Eigen::MatrixXd project_nodes(const SpectralEstimate& estimate, int d,
                              NormWeighting weighting) {
  if (d < 1)
    throw std::invalid_argument(
        "project_nodes: d must be >= 1 (no structure detected)");
  if (d > estimate.d_pos)
    throw std::invalid_argument("project_nodes: d exceeds d_pos");
  return side_projection(estimate.data_eigenvalues, estimate.data_eigenvectors,
                         d, false, weighting);
}

Eigen::VectorXd node_norms(const Eigen::MatrixXd& projection) {
  return projection.rowwise().norm();
}

Eigen::VectorXd expected_norms(const NullEnsemble& ensemble, int d,
                               bool negative_side, NormWeighting weighting,
                               int jobs) {
  if (d < 1) throw std::invalid_argument("expected_norms: d must be >= 1");
  const Eigen::Index n = ensemble.graph().size();
  const int n_samples = ensemble.num_samples();

  // Per-sample slots keep the reduction order fixed under parallelism.
  Eigen::MatrixXd norms(n, n_samples);
  parallel_for_index(n_samples, jobs, [&](int i) {
    const Eigen::MatrixXd c_star =
        comparison_matrix(ensemble.sample(i), ensemble.expectation());
    EigenDecomposition eig;
    if (n <= kDenseLimit) {
      eig = eig_symmetric(c_star);
    } else {
      eig = eig_symmetric_extremal(c_star, negative_side ? 0 : d,
                                   negative_side ? d : 0);
    }
    norms.col(i) = node_norms(
        side_projection(eig.values, eig.vectors, d, negative_side, weighting));
  });

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n_samples; ++i) mean += norms.col(i);
  return mean / static_cast<double>(n_samples);
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> reject_nodes(
    const Eigen::VectorXd& data_norms, const Eigen::VectorXd& expected) {
  if (data_norms.size() != expected.size())
    throw std::invalid_argument("reject_nodes: size mismatch");
  std::vector<Eigen::Index> retained, rejected;
  for (Eigen::Index j = 0; j < data_norms.size(); ++j) {
    if (data_norms(j) > expected(j))
      retained.push_back(j);
    else
      rejected.push_back(j);
  }
  return {retained, rejected};
}

WeightedGraph signal_network(const WeightedGraph& g,
                             const std::vector<Eigen::Index>& retained) {
  if (retained.empty()) return WeightedGraph({}, Eigen::MatrixXd(0, 0));
  return strip_leaves(induced_subgraph(g, retained));
}

SignalDecomposition decompose_signal(const WeightedGraph& g,
                                     const SpectralEstimate& estimate,
                                     const NullEnsemble& ensemble,
                                     NormWeighting weighting, int jobs) {
  SignalDecomposition out;
  out.projection = project_nodes(estimate, estimate.d_pos, weighting);
  out.data_norms = node_norms(out.projection);
  out.expected_norms =
      expected_norms(ensemble, estimate.d_pos, false, weighting, jobs);
  std::tie(out.retained, out.rejected) =
      reject_nodes(out.data_norms, out.expected_norms);
  out.signal_graph = signal_network(g, out.retained);
  return out;
}

KPartiteResult kpartite_extract(const SpectralEstimate& estimate,
                                const NullEnsemble& ensemble,
                                NormWeighting weighting, int jobs) {
  if (estimate.d_neg < 1)
    throw std::invalid_argument("kpartite_extract: d_neg is zero");

  KPartiteResult out;
  out.negative_vectors =
      side_projection(estimate.data_eigenvalues, estimate.data_eigenvectors,
                      estimate.d_neg, true, weighting);
  out.data_norms = node_norms(out.negative_vectors);
  out.expected_norms =
      expected_norms(ensemble, estimate.d_neg, true, weighting, jobs);
  auto [retained, rejected] = reject_nodes(out.data_norms, out.expected_norms);
  out.retained_nodes = std::move(retained);

  if (estimate.d_neg == 1) {
    const Eigen::VectorXd most_negative =
        estimate.data_eigenvectors.col(estimate.data_eigenvectors.cols() - 1);
    out.groups.reserve(out.retained_nodes.size());
    for (Eigen::Index node : out.retained_nodes)
      out.groups.push_back(most_negative(node) < 0.0 ? 1 : 0);
  }
  return out;
}

}  // namespace netsift
