#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace netsift {

enum class WeightGranularity { binary, integer, real };

/// Symmetric weighted undirected graph with zero diagonal and labelled nodes.
/// Values are immutable after construction and safe to share across threads.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validates symmetry, zero diagonal, nonnegativity, and label uniqueness;
  /// throws std::invalid_argument on violation. Granularity is inferred from
  /// the entries (all in {0,1} -> binary; all integral -> integer; else real).
  WeightedGraph(std::vector<std::string> labels, Eigen::MatrixXd weights);

  Eigen::Index size() const { return weights_.rows(); }
  bool empty() const { return weights_.rows() == 0; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  WeightGranularity granularity() const { return granularity_; }

  /// Node strengths s_i = sum_j W_ij.
  Eigen::VectorXd strengths() const { return weights_.rowwise().sum(); }

  /// Binary adjacency (1 where W_ij > 0).
  Eigen::MatrixXd adjacency() const {
    return (weights_.array() > 0.0).cast<double>();
  }

  /// Node degrees k_i = number of incident links.
  Eigen::VectorXd degrees() const { return adjacency().rowwise().sum(); }

  /// m: number of unique undirected links (i < j with W_ij > 0).
  std::int64_t unique_link_count() const;

  /// Nonzero off-diagonal matrix entries (2m for a symmetric graph).
  std::int64_t nonzero_entry_count() const { return 2 * unique_link_count(); }

  /// w: total unique weight, half the strength sum.
  double total_unique_weight() const { return weights_.sum() / 2.0; }

  double density() const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd weights_;
  WeightGranularity granularity_ = WeightGranularity::binary;
};

struct WeightDistributionSummary {
  std::int64_t weight_value = 0;
  std::int64_t observed_count = 0;
  double cumulative_fraction = 0.0;
};

/// Parses `src dst weight` lines (tab- or whitespace-separated, `#` comments
/// ignored). Labels are arbitrary non-whitespace strings; internal indices are
/// assigned in first-appearance order. With `symmetrize_directed` the rows are
/// read as directed edges and W <- (W + W^T)/2; otherwise each line is an
/// undirected link, duplicates with equal weight are tolerated, and duplicates
/// with conflicting weights are an error. Self-loops and negative weights are
/// always errors, reported with the offending line number.
WeightedGraph load_edge_list(std::istream& in, bool symmetrize_directed = false);
WeightedGraph load_edge_list_file(const std::string& path,
                                  bool symmetrize_directed = false);

/// Writes one `src<TAB>dst<TAB>weight` line per unique link, ordered so that
/// reloading reproduces the node ordering: integer and binary graphs
/// round-trip bit-for-bit through load_edge_list. Isolated nodes cannot be
/// represented in an edge list and are dropped.
void save_edge_list(const WeightedGraph& g, std::ostream& out);
void save_edge_list_file(const WeightedGraph& g, const std::string& path);

/// Induced subgraph on `nodes` (kept in ascending index order, labels
/// preserved). Indices must be unique and in range.
WeightedGraph induced_subgraph(const WeightedGraph& g,
                               const std::vector<Eigen::Index>& nodes);

/// Largest connected component as an induced subgraph; ties are broken by the
/// component containing the lowest node index. Throws on an empty graph.
WeightedGraph giant_component(const WeightedGraph& g);

/// Repeatedly removes degree-1 nodes until none remain, then returns the
/// largest remaining component. May legally return an empty graph.
WeightedGraph strip_leaves(const WeightedGraph& g);

/// Counts of unique link weights with cumulative fractions, for comparing a
/// data network against sampled null models. Requires binary or integer
/// granularity (apply kappa scaling first for real-valued graphs).
std::vector<WeightDistributionSummary> weight_distribution(
    const WeightedGraph& g);

}  // namespace netsift
