#pragma once

#include <optional>
#include <vector>

#include "netsift/partition.hpp"
#include "netsift/synthetic.hpp"

namespace netsift {

/// Normalized variation of information between two partitions of the same
/// node set: VI = H(a) + H(b) - 2 I(a,b), natural logs, divided by log(n) so
/// the result lies in [0, 1]. Throws on a node-set (size) mismatch.
double vi_normalized(const std::vector<int>& a, const std::vector<int>& b);
double vi_normalized(const Partition& a, const Partition& b);

/// Unnormalized VI (a metric on partitions).
double vi_distance(const std::vector<int>& a, const std::vector<int>& b);

struct RejectionScore {
  std::optional<double> tpr;  // fraction of modular nodes correctly retained
  std::optional<double> tnr;  // fraction of noise nodes correctly rejected
};

/// Scores a rejection against ground truth. An empty class is reported as
/// absent rather than zero. `node_ids` maps positions in the analyzed graph
/// back to ground-truth indices; `rejected` holds positions of rejected
/// nodes within `node_ids`.
RejectionScore rejection_score(const std::vector<Eigen::Index>& rejected,
                               const std::vector<Eigen::Index>& node_ids,
                               const GroundTruth& truth);

/// Ground truth as partitions over all T nodes: variant A puts each noise
/// node in its own singleton group, variant B puts all noise nodes in one
/// shared group. With no noise both equal the planted partition.
std::pair<Partition, Partition> ground_truth_variants(const GroundTruth& truth);

}  // namespace netsift
