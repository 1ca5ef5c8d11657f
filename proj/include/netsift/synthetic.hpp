#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netsift/graph.hpp"
#include "netsift/null_models.hpp"
#include "netsift/spectral.hpp"

namespace netsift {

/// Weighted stochastic block model with an optional noise halo. The first n
/// nodes form g equal-sized groups (links within/between groups at
/// P(within)/P(between)); floor(n * f_noise) halo nodes connect to all other
/// nodes, including each other, at P(noise). Weights are placed exactly as in
/// the sparse WCM: strengths drawn from Poisson(lambda_s), base weight 1 per
/// link plus a Poisson top-up restricted to the sampled links.
struct SyntheticSpec {
  int n = 400;
  int groups = 4;
  double p_within = 0.2;
  double p_between = 0.05;
  double p_noise = 0.0;  // 0 disables the halo
  double f_noise = 0.0;
  double lambda_s = 200.0;
  std::uint64_t seed = 0;

  int total_nodes() const {
    return n + static_cast<int>(n * f_noise);
  }
  void validate() const;
};

struct GroundTruth {
  std::vector<int> module_of;              // group of each of the first n nodes
  std::vector<Eigen::Index> noise_nodes;   // indices n..T-1
};

/// Deterministic in spec.seed. Isolated draws are retained as zero-strength
/// nodes; downstream analysis takes the giant component.
std::pair<WeightedGraph, GroundTruth> generate_wsbm(const SyntheticSpec& spec);

// ---- Detection sweep over a grid of synthetic specs ----

enum class SweepCluster { none, kmeans };

struct SweepConfig {
  NullModelSpec null_spec;  // seed field is ignored; per-replicate derived
  int replicates = 50;
  SweepCluster cluster = SweepCluster::kmeans;
  int kmeans_restarts = 100;
  bool rejection = true;  // off: record detection and d_pos only
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SweepRow {
  double p_within = 0, p_between = 0, p_noise = 0, f_noise = 0;
  int replicate = 0;
  bool detected = false;
  int d_pos = 0;
  int groups_found = 0;
  double vi_own_group = 0.0;     // 0 when not detected (scored as such)
  double vi_single_group = 0.0;
  std::optional<double> tpr;     // absent when not detected or class empty
  std::optional<double> tnr;
  std::int64_t runtime_ms = 0;
  std::string error;  // nonempty when the replicate failed; not in the CSV
};

/// Regenerates `replicates` networks per grid cell, runs the spectral
/// estimation pipeline on each (giant component, bounds, rejection,
/// clustering), and records one row per replicate. Cell errors are recorded
/// as undetected rows rather than aborting the sweep.
std::vector<SweepRow> sweep_detection(const std::vector<SyntheticSpec>& grid,
                                      const SweepConfig& config);

/// CSV with the fixed column set; absent scores are written as empty fields.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace netsift
