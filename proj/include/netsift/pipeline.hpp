#pragma once

#include <optional>
#include <string>

#include "netsift/graph.hpp"
#include "netsift/null_models.hpp"
#include "netsift/partition.hpp"
#include "netsift/rejection.hpp"
#include "netsift/spectral.hpp"

namespace netsift {

enum class ClusterMethod { kmeans, consensus, louvain, multiway };

struct RunConfig {
  std::string input_path;
  bool symmetrize_directed = false;
  NullModelSpec null_spec;  // defaults: sparse WCM, N=100, kappa=1, poisson
  BoundMethod bound = BoundMethod::mean;
  double alpha = 0.975;
  ClusterMethod cluster = ClusterMethod::consensus;
  NormWeighting weighting = NormWeighting::eigenvalue;
  int kmeans_restarts = 100;  // p
  int n_permutations = 10000;
  int jobs = 1;
  std::string out_dir = "netsift-out";

  void validate() const;
};

struct AnalysisResult {
  WeightedGraph graph;  // the analyzed giant component
  NullEnsemble ensemble;
  SpectralEstimate estimate;  // d_pos/d_neg reflect the configured bound method
  std::optional<TestReport> upper_test;  // present for non-mean bound methods
  std::string structure;  // "none", "modular", "kpartite", "modular+kpartite"
  std::optional<SignalDecomposition> signal;  // when d_pos >= 1
  std::optional<Partition> partition;         // clustering of the signal graph
  bool partition_converged = true;
  std::optional<KPartiteResult> kpartite;  // when d_neg >= 1
};

/// End-to-end pipeline on an in-memory graph: giant component -> ensemble ->
/// bounds -> dimensions -> (rejection + signal network + clustering when
/// d_pos > 0) -> (k-partite extraction when d_neg > 0).
AnalysisResult analyze_graph(const WeightedGraph& raw, const RunConfig& config);

/// The deterministic report document (identical bytes for identical config
/// and seed at any job count). Timing goes to the run log instead.
std::string report_json(const AnalysisResult& result, const RunConfig& config);

/// Writes report.json, signal.tsv, partition.tsv, eigs.csv, weightdist.csv
/// and run.log into config.out_dir (created if needed).
void write_reports(const AnalysisResult& result, const RunConfig& config,
                   std::int64_t elapsed_ms);

/// SI-style null-model weight diagnostic: the data's integer (kappa-scaled)
/// weight distribution followed by each sampled model's, with per-weight
/// count differences against the data.
void write_nulldiag_csv(const WeightedGraph& g, const NullModelSpec& spec,
                        std::ostream& out);

/// Largest per-weight count error |model - data| over all sampled models.
/// Used to compare how faithfully null models capture weight distributions.
std::int64_t nulldiag_max_error(const WeightedGraph& g,
                                const NullModelSpec& spec);

}  // namespace netsift
