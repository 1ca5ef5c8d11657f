#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "netsift/graph.hpp"
#include "netsift/spectral.hpp"

namespace netsift {

struct Partition {
  std::vector<int> assignment;  // node -> group, contiguous labels 0..c-1
  int num_groups = 0;
  double quality = 0.0;  // modularity Q of this partition
};

/// Relabels raw group ids to contiguous 0..c-1 in first-appearance order.
Partition make_partition(const std::vector<int>& raw_assignment);

/// Q = Tr(S^T [W - <P>] S) over the one-hot group matrix S. `normalized`
/// divides by the total weight sum; the raw trace is the default since the
/// argmax over partitions is scale-invariant.
double modularity(const WeightedGraph& g, const Eigen::MatrixXd& expectation,
                  const Partition& part, bool normalized = false);

/// k-means on the projection rows (Euclidean distance, distance-weighted
/// seeding per restart): p restarts, returns the partition with maximal Q.
/// Ties go to the lowest restart index, so the result depends only on
/// (projection, c, p, seed). Throws when fewer than c distinct rows exist.
Partition kmeans_partition(const Eigen::MatrixXd& projection, int c, int p,
                           const Eigen::MatrixXd& expectation,
                           const WeightedGraph& g, std::uint64_t seed);

struct ConsensusState {
  Eigen::MatrixXd consensus_matrix;  // D with D_ij = n_ij / #partitions
  Eigen::MatrixXd null_matrix;       // P^con of the final round
  int k_max = 0;                     // K of the final round
  int iterations = 0;
  bool converged = false;
};

struct ConsensusOptions {
  int initial_groups = 2;  // cluster count for the p seeding partitions
  std::uint64_t seed = 0;
  int max_iterations = 50;
  double binary_tolerance = 1e-3;
  int jobs = 1;
};

/// Expected co-clustering proportion of a node pair under uniformly random
/// partitions, p per cluster count c = l..k:
/// P^con = 1/(p(k-1)) * sum_{c=l..k} p/c.
double consensus_null_value(int p, int k, int l);

/// Unsupervised consensus clustering with an explicit consensus null model.
/// Seeds with p k-means partitions of `c_source`'s eigenvector projection at
/// `initial_groups` clusters, then iterates: D from p(K-1) k-means partitions
/// for k = 2..K (K = positive eigenvalues of C_con), C_con = D - P^con with
/// P^con_ij = 1/(p(K-1)) * sum_{c=l..K} p/c (l = K on the first round, l = 2
/// afterwards), re-projecting C_con each round. Stops when D is binary within
/// tolerance; on hitting the iteration cap the best-Q partition seen is
/// returned with state->converged == false.
Partition consensus_cluster(const Eigen::MatrixXd& c_source,
                            const Eigen::MatrixXd& expectation,
                            const WeightedGraph& g, int p,
                            const ConsensusOptions& options,
                            ConsensusState* state = nullptr);

/// Greedy modularity optimization (node sweeps + aggregation) against an
/// arbitrary expectation matrix; sweep order is randomized from the seed.
Partition louvain(const WeightedGraph& g, const Eigen::MatrixXd& expectation,
                  std::uint64_t seed);

/// Multi-way vector partition into k groups on node vectors
/// [r_i]_l = sqrt(lambda_l) U_il from the top k-1 positive eigenpairs.
/// Group vectors start at randomly chosen node vectors and nodes reassign to
/// the group with maximal inner product ((R_s - r_i)^T r_i for the current
/// group) until fixed point; empty groups are dropped. `converged` (when
/// non-null) reports whether the fixed point was reached within 1000 sweeps.
Partition multiway_partition(const SpectralEstimate& estimate, int k,
                             const Eigen::MatrixXd& expectation,
                             const WeightedGraph& g, std::uint64_t seed,
                             bool* converged = nullptr);

/// Scans k = 2..k_max, computing Q at each k, and returns the partition at
/// the knee of the k-vs-Q curve: the interior k minimizing the summed SSE of
/// two linear fits, one to each side of k (ties to the lowest k).
Partition multiway_unsupervised(const SpectralEstimate& estimate, int k_max,
                                const Eigen::MatrixXd& expectation,
                                const WeightedGraph& g, std::uint64_t seed);

/// Knee of a curve y(k), k = k_min..k_min+|y|-1, by two-piece linear fit.
int knee_index(const std::vector<double>& y, int k_min);

}  // namespace netsift
