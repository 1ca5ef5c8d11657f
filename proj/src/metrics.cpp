#include "netsift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace netsift {

namespace {

double entropy_and_mutual(const std::vector<int>& a, const std::vector<int>& b,
                          double* h_a, double* h_b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> count_a, count_b;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    count_a[a[i]] += 1.0;
    count_b[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  *h_a = 0.0;
  for (const auto& [label, c] : count_a) *h_a -= (c / n) * std::log(c / n);
  *h_b = 0.0;
  for (const auto& [label, c] : count_b) *h_b -= (c / n) * std::log(c / n);
  double mutual = 0.0;
  for (const auto& [labels, c] : joint) {
    const double p = c / n;
    const double pa = count_a[labels.first] / n;
    const double pb = count_b[labels.second] / n;
    mutual += p * std::log(p / (pa * pb));
  }
  return mutual;
}

}  // namespace

double vi_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("vi: partitions cover different node sets");
  if (a.empty()) throw std::invalid_argument("vi: empty partitions");
  double h_a = 0.0, h_b = 0.0;
  const double mutual = entropy_and_mutual(a, b, &h_a, &h_b);
  return std::max(0.0, h_a + h_b - 2.0 * mutual);
}

double vi_normalized(const std::vector<int>& a, const std::vector<int>& b) {
  const double vi = vi_distance(a, b);
  const double normalizer = std::log(static_cast<double>(a.size()));
  if (normalizer <= 0.0) return 0.0;  // single node: partitions are identical
  return vi / normalizer;
}

double vi_normalized(const Partition& a, const Partition& b) {
  return vi_normalized(a.assignment, b.assignment);
}

RejectionScore rejection_score(const std::vector<Eigen::Index>& rejected,
                               const std::vector<Eigen::Index>& node_ids,
                               const GroundTruth& truth) {
  std::unordered_set<Eigen::Index> noise(truth.noise_nodes.begin(),
                                         truth.noise_nodes.end());
  std::unordered_set<Eigen::Index> rejected_set;
  for (Eigen::Index pos : rejected) {
    if (pos < 0 || pos >= static_cast<Eigen::Index>(node_ids.size()))
      throw std::invalid_argument("rejection_score: rejected index range");
    rejected_set.insert(node_ids[pos]);
  }

  std::int64_t noise_total = 0, noise_rejected = 0;
  std::int64_t modular_total = 0, modular_retained = 0;
  for (Eigen::Index id : node_ids) {
    if (noise.count(id)) {
      ++noise_total;
      if (rejected_set.count(id)) ++noise_rejected;
    } else {
      ++modular_total;
      if (!rejected_set.count(id)) ++modular_retained;
    }
  }

  RejectionScore score;
  if (noise_total > 0)
    score.tnr = static_cast<double>(noise_rejected) / noise_total;
  if (modular_total > 0)
    score.tpr = static_cast<double>(modular_retained) / modular_total;
  return score;
}

std::pair<Partition, Partition> ground_truth_variants(
    const GroundTruth& truth) {
  const int n_modular = static_cast<int>(truth.module_of.size());
  const int total = n_modular + static_cast<int>(truth.noise_nodes.size());
  int group_count = 0;
  for (int m : truth.module_of) group_count = std::max(group_count, m + 1);

  std::vector<int> own(total), single(total);
  for (int i = 0; i < n_modular; ++i) own[i] = single[i] = truth.module_of[i];
  for (std::size_t k = 0; k < truth.noise_nodes.size(); ++k) {
    const Eigen::Index id = truth.noise_nodes[k];
    if (id < n_modular || id >= total)
      throw std::invalid_argument("ground_truth_variants: bad noise index");
    own[id] = group_count + static_cast<int>(k);
    single[id] = group_count;
  }
  return {make_partition(own), make_partition(single)};
}

}  // namespace netsift
