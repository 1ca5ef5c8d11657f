#include "netsift/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "netsift/metrics.hpp"
#include "netsift/parallel.hpp"
#include "netsift/partition.hpp"
#include "netsift/random.hpp"
#include "netsift/rejection.hpp"

namespace netsift {

void SyntheticSpec::validate() const {
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(p_within) || !probability(p_between) || !probability(p_noise))
    throw std::invalid_argument("synthetic: probabilities must be in [0,1]");
  if (n < 1 || groups < 1 || n % groups != 0)
    throw std::invalid_argument("synthetic: n must divide into equal groups");
  if (f_noise < 0.0)
    throw std::invalid_argument("synthetic: f_noise must be >= 0");
  if (lambda_s <= 0.0)
    throw std::invalid_argument("synthetic: lambda_s must be positive");
}

std::pair<WeightedGraph, GroundTruth> generate_wsbm(const SyntheticSpec& spec) {
  spec.validate();
  const int total = spec.total_nodes();
  const int group_size = spec.n / spec.groups;

  auto rng = substream_engine(spec.seed, RngStream::synthetic, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Adjacency: planted blocks among the first n nodes, halo at P(noise).
  struct Link {
    int i, j;
  };
  std::vector<Link> links;
  for (int i = 0; i < total; ++i) {
    for (int j = i + 1; j < total; ++j) {
      double p;
      if (i < spec.n && j < spec.n)
        p = (i / group_size == j / group_size) ? spec.p_within : spec.p_between;
      else
        p = spec.p_noise;
      if (p > 0.0 && unit(rng) < p) links.push_back({i, j});
    }
  }

  // Strength sequence for all nodes, noise included, so modular and noise
  // nodes share the same expected strengths.
  std::poisson_distribution<std::int64_t> strength_draw(spec.lambda_s);
  Eigen::VectorXd s(total);
  for (int i = 0; i < total; ++i)
    s(i) = static_cast<double>(strength_draw(rng));

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(total, total);
  if (!links.empty()) {
    double pair_sum = 0.0;
    for (const auto& link : links) pair_sum += s(link.i) * s(link.j);
    const double n_link =
        std::max(0.0, s.sum() / 2.0 - static_cast<double>(links.size()));
    for (const auto& link : links) {
      const double rate =
          pair_sum > 0.0 ? n_link * s(link.i) * s(link.j) / pair_sum : 0.0;
      std::int64_t weight = 1;
      if (rate > 0.0) {
        std::poisson_distribution<std::int64_t> dist(rate);
        weight += dist(rng);
      }
      w(link.i, link.j) = static_cast<double>(weight);
      w(link.j, link.i) = w(link.i, link.j);
    }
  }

  std::vector<std::string> labels(total);
  for (int i = 0; i < total; ++i) labels[i] = std::to_string(i);

  GroundTruth truth;
  truth.module_of.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) truth.module_of[i] = i / group_size;
  for (int i = spec.n; i < total; ++i) truth.noise_nodes.push_back(i);

  return {WeightedGraph(std::move(labels), std::move(w)), std::move(truth)};
}

namespace {

std::vector<Eigen::Index> original_ids(const WeightedGraph& g) {
  std::vector<Eigen::Index> ids;
  ids.reserve(g.size());
  for (const auto& label : g.labels()) ids.push_back(std::stoll(label));
  return ids;
}

SweepRow run_replicate(const SyntheticSpec& cell, const SweepConfig& config,
                       std::uint64_t cell_index, int replicate) {
  SweepRow row;
  row.p_within = cell.p_within;
  row.p_between = cell.p_between;
  row.p_noise = cell.p_noise;
  row.f_noise = cell.f_noise;
  row.replicate = replicate;

  const auto start = std::chrono::steady_clock::now();
  SyntheticSpec spec = cell;
  spec.seed = substream_seed(config.seed, RngStream::sweep,
                             cell_index * 1000003ULL +
                                 static_cast<std::uint64_t>(replicate));
  auto [network, truth] = generate_wsbm(spec);

  const WeightedGraph g = giant_component(network);
  const std::vector<Eigen::Index> ids = original_ids(g);

  NullModelSpec null_spec = config.null_spec;
  null_spec.seed = spec.seed;
  const NullEnsemble ensemble = build_ensemble(g, null_spec);
  const SpectralEstimate estimate = spectral_estimate(g, ensemble);

  row.d_pos = estimate.d_pos;
  row.detected = estimate.d_pos >= 1;
  if (row.detected && config.rejection) {
    const SignalDecomposition signal =
        decompose_signal(g, estimate, ensemble, NormWeighting::eigenvalue);
    const RejectionScore score = rejection_score(signal.rejected, ids, truth);
    row.tpr = score.tpr;
    row.tnr = score.tnr;

    if (config.cluster == SweepCluster::kmeans && !signal.signal_graph.empty()) {
      // Cluster the signal nodes on their rows of the data projection.
      std::vector<Eigen::Index> signal_pos;
      {
        std::unordered_map<std::string, Eigen::Index> pos_of;
        for (Eigen::Index i = 0; i < g.size(); ++i) pos_of[g.labels()[i]] = i;
        for (const auto& label : signal.signal_graph.labels())
          signal_pos.push_back(pos_of.at(label));
      }
      Eigen::MatrixXd projection(signal_pos.size(), signal.projection.cols());
      Eigen::MatrixXd expectation_sub(signal_pos.size(), signal_pos.size());
      for (std::size_t a = 0; a < signal_pos.size(); ++a) {
        projection.row(a) = signal.projection.row(signal_pos[a]);
        for (std::size_t b = 0; b < signal_pos.size(); ++b)
          expectation_sub(a, b) =
              ensemble.expectation()(signal_pos[a], signal_pos[b]);
      }
      const int c = estimate.d_pos + 1;
      Partition part;
      try {
        part = kmeans_partition(projection, c, config.kmeans_restarts,
                                expectation_sub, signal.signal_graph,
                                spec.seed);
      } catch (const std::invalid_argument&) {
        // Fewer distinct projections than clusters; count one group.
        part.assignment.assign(signal_pos.size(), 0);
        part.num_groups = 1;
      }
      row.groups_found = part.num_groups;

      const auto [own, single] = ground_truth_variants(truth);
      std::vector<int> truth_own, truth_single;
      for (Eigen::Index pos : signal_pos) {
        truth_own.push_back(own.assignment[ids[pos]]);
        truth_single.push_back(single.assignment[ids[pos]]);
      }
      if (!truth_own.empty()) {
        row.vi_own_group = vi_normalized(part.assignment, truth_own);
        row.vi_single_group = vi_normalized(part.assignment, truth_single);
      }
    }
  }

  row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_detection(const std::vector<SyntheticSpec>& grid,
                                      const SweepConfig& config) {
  const int cells = static_cast<int>(grid.size());
  const int total = cells * config.replicates;
  std::vector<SweepRow> rows(total);
  parallel_for_index(total, config.jobs, [&](int flat) {
    const int cell = flat / config.replicates;
    const int replicate = flat % config.replicates;
    try {
      rows[flat] = run_replicate(grid[cell], config,
                                 static_cast<std::uint64_t>(cell), replicate);
    } catch (const std::exception& e) {
      SweepRow failed;
      failed.p_within = grid[cell].p_within;
      failed.p_between = grid[cell].p_between;
      failed.p_noise = grid[cell].p_noise;
      failed.f_noise = grid[cell].f_noise;
      failed.replicate = replicate;
      failed.error = e.what();
      rows[flat] = std::move(failed);
    }
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "p_within,p_between,p_noise,f_noise,replicate,detected,d_pos,"
         "groups_found,vi_own_group,vi_single_group,tpr,tnr,runtime_ms\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << num(r.p_within) << ',' << num(r.p_between) << ',' << num(r.p_noise)
        << ',' << num(r.f_noise) << ',' << r.replicate << ','
        << (r.detected ? 1 : 0) << ',' << r.d_pos << ',' << r.groups_found
        << ',' << num(r.vi_own_group) << ',' << num(r.vi_single_group) << ',';
    if (r.tpr) out << num(*r.tpr);
    out << ',';
    if (r.tnr) out << num(*r.tnr);
    out << ',' << r.runtime_ms << '\n';
  }
}

}  // namespace netsift
