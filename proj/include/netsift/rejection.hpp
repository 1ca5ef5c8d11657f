#pragma once

#include <Eigen/Dense>

#include <vector>

#include "netsift/graph.hpp"
#include "netsift/null_models.hpp"
#include "netsift/spectral.hpp"

namespace netsift {

/// Weighting of the low-dimensional projection columns: lambda_i * u_i by
/// default, sqrt(|lambda_i|) * u_i as the alternative used by multi-way
/// vector clustering.
enum class NormWeighting { eigenvalue, sqrt_eigenvalue };

struct SignalDecomposition {
  Eigen::MatrixXd projection;      // n x d, column i = lambda_i * u_i
  Eigen::VectorXd data_norms;      // L(j)
  Eigen::VectorXd expected_norms;  // <L(j)*> over the sampled null models
  std::vector<Eigen::Index> retained;
  std::vector<Eigen::Index> rejected;
  WeightedGraph signal_graph;  // retained nodes, leaf-stripped, largest comp.
};

struct KPartiteResult {
  Eigen::MatrixXd negative_vectors;  // n x d_neg, |lambda|-weighted
  Eigen::VectorXd data_norms;
  Eigen::VectorXd expected_norms;
  std::vector<Eigen::Index> retained_nodes;
  /// Sign-split group per retained node (d_neg == 1 only): positive or zero
  /// eigenvector entries -> group 0, negative -> group 1. Empty for d_neg > 1.
  std::vector<int> groups;
};

/// Eigenvalue-weighted projection onto the leading d dimensions. Requires
/// 1 <= d <= estimate.d_pos; d = 0 means no structure was detected and the
/// caller must not project.
Eigen::MatrixXd project_nodes(const SpectralEstimate& estimate, int d,
                              NormWeighting weighting = NormWeighting::eigenvalue);

/// Per-node L2 norms: L(j) = sqrt(sum_i projection(j, i)^2).
Eigen::VectorXd node_norms(const Eigen::MatrixXd& projection);

/// <L(j)*>: each sample's comparison matrix is projected onto its own top-d
/// (or, for the negative side, most-negative-d with |lambda| weights)
/// eigenpairs, and the per-node norms are averaged over samples in index
/// order. Deterministic at any job count.
Eigen::VectorXd expected_norms(const NullEnsemble& ensemble, int d,
                               bool negative_side = false,
                               NormWeighting weighting = NormWeighting::eigenvalue,
                               int jobs = 1);

/// Strict-inequality split: node j is retained iff L(j) > <L(j)*>.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> reject_nodes(
    const Eigen::VectorXd& data_norms, const Eigen::VectorXd& expected_norms);

/// Induced subgraph on the retained nodes, leaf-stripped, largest component.
/// An empty retained set legally yields an empty graph.
WeightedGraph signal_network(const WeightedGraph& g,
                             const std::vector<Eigen::Index>& retained);

/// Full rejection pass in the estimate's d_pos-dimensional space.
SignalDecomposition decompose_signal(const WeightedGraph& g,
                                     const SpectralEstimate& estimate,
                                     const NullEnsemble& ensemble,
                                     NormWeighting weighting =
                                         NormWeighting::eigenvalue,
                                     int jobs = 1);

/// Projection + rejection on the d_neg most-negative eigenpairs; for
/// d_neg == 1 the retained nodes are split into two groups by the sign of
/// their eigenvector entry. Requires estimate.d_neg >= 1.
KPartiteResult kpartite_extract(const SpectralEstimate& estimate,
                                const NullEnsemble& ensemble,
                                NormWeighting weighting =
                                    NormWeighting::eigenvalue,
                                int jobs = 1);

}  // namespace netsift
