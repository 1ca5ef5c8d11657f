#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>

#include "netsift/graph.hpp"

namespace netsift {

enum class NullModelKind { full_wcm, sparse_wcm };
enum class SamplerKind { poisson, stub_matching };

struct NullModelSpec {
  NullModelKind kind = NullModelKind::sparse_wcm;
  int num_samples = 100;
  double kappa = 1.0;  // weight scale for count-based samplers; 2 for
                       // half-integer weights, 100 for correlation weights
  SamplerKind sampler = SamplerKind::poisson;
  std::uint64_t seed = 0;
  // Compatibility switch: residual weight budget 1/2*sum(s) - 2m* instead of
  // the weight-conserving 1/2*sum(s) - m*.
  bool literal_residual_budget = false;

  void validate() const;
};

/// Analytic weighted configuration model expectation <P>_ij = s_i s_j / sum(s),
/// diagonal included, so that sum_ij <P>_ij == sum_ij W_ij. Throws if the
/// graph has fewer than 2 nodes or zero total weight.
Eigen::MatrixXd wcm_expectation(const WeightedGraph& g);

/// One full-WCM sample: every unordered pair receives a Poisson-distributed
/// weight with rate N_link * s_i s_j / sum_pairs(s_i s_j). Weights are placed
/// in kappa-scaled integer units and rescaled back, so results live on the
/// grid {0, 1/kappa, 2/kappa, ...}. Deterministic in (spec.seed, sample_index).
Eigen::MatrixXd sample_full_wcm(const WeightedGraph& g,
                                const NullModelSpec& spec, int sample_index);

/// One sparse-WCM sample. Phase 1 draws an adjacency A* with link probability
/// min(1, k_i k_j / 2m); phase 2 gives every A* link base weight 1 and tops up
/// with Poisson weights whose rates are restricted to A* links, spending the
/// residual budget N_link = max(0, 1/2*sum(s) - m*). The sample's support is
/// exactly A*.
Eigen::MatrixXd sample_sparse_wcm(const WeightedGraph& g,
                                  const NullModelSpec& spec, int sample_index);

/// Exact stub-matching sample: node i gets s_i stubs (kappa-scaled integers),
/// stubs are paired uniformly until exhaustion. Self-pairings are re-drawn
/// (bounded retries; throws when the budget is exhausted) and a leftover odd
/// stub is dropped. Intended for small graphs.
Eigen::MatrixXd sample_stub_matching(const WeightedGraph& g,
                                     const NullModelSpec& spec,
                                     int sample_index);

/// Dispatch on (kind, sampler). Stub matching is supported for the full WCM
/// only.
Eigen::MatrixXd sample_null(const WeightedGraph& g, const NullModelSpec& spec,
                            int sample_index);

/// Sampled ensemble handle. Samplers are pure in (graph, spec, sample_index),
/// so samples are regenerated on demand instead of being retained; downstream
/// consumers stream them through eigen-analysis to bound memory.
class NullEnsemble {
 public:
  NullEnsemble() = default;
  NullEnsemble(std::shared_ptr<const WeightedGraph> graph, NullModelSpec spec,
               Eigen::MatrixXd expectation)
      : graph_(std::move(graph)),
        spec_(spec),
        expectation_(std::move(expectation)) {}

  const NullModelSpec& spec() const { return spec_; }
  const WeightedGraph& graph() const { return *graph_; }
  const Eigen::MatrixXd& expectation() const { return expectation_; }
  int num_samples() const { return spec_.num_samples; }

  Eigen::MatrixXd sample(int index) const {
    return sample_null(*graph_, spec_, index);
  }

 private:
  std::shared_ptr<const WeightedGraph> graph_;
  NullModelSpec spec_;
  Eigen::MatrixXd expectation_;
};

/// Builds the ensemble for `g`: analytic expectation for the full WCM, the
/// element-wise sample mean (accumulated in sample order) for the sparse WCM.
NullEnsemble build_ensemble(const WeightedGraph& g, const NullModelSpec& spec);
NullEnsemble build_ensemble(std::shared_ptr<const WeightedGraph> g,
                            const NullModelSpec& spec);

}  // namespace netsift
