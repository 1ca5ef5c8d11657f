#include "netsift/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "netsift/metrics.hpp"

namespace netsift {

namespace {

using nlohmann::json;

double finite(double v) {
  if (!std::isfinite(v))
    throw std::runtime_error("report would contain a non-finite number");
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite(v(i)));
  return out;
}

std::string kind_name(NullModelKind kind) {
  return kind == NullModelKind::full_wcm ? "wcm" : "sparse";
}

std::string bound_name(BoundMethod b) {
  switch (b) {
    case BoundMethod::mean: return "mean";
    case BoundMethod::ci: return "ci";
    case BoundMethod::ttest: return "ttest";
    case BoundMethod::permutation: return "perm";
  }
  return "?";
}

std::string cluster_name(ClusterMethod c) {
  switch (c) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::consensus: return "consensus";
    case ClusterMethod::louvain: return "louvain";
    case ClusterMethod::multiway: return "multiway";
  }
  return "?";
}

std::string granularity_name(WeightGranularity g) {
  switch (g) {
    case WeightGranularity::binary: return "binary";
    case WeightGranularity::integer: return "integer";
    case WeightGranularity::real: return "real";
  }
  return "?";
}

// Positions (within g) of the signal graph's nodes, matched by label.
std::vector<Eigen::Index> signal_positions(const WeightedGraph& g,
                                           const WeightedGraph& signal) {
  std::unordered_map<std::string, Eigen::Index> pos_of;
  for (Eigen::Index i = 0; i < g.size(); ++i) pos_of[g.labels()[i]] = i;
  std::vector<Eigen::Index> positions;
  positions.reserve(signal.size());
  for (const auto& label : signal.labels()) positions.push_back(pos_of.at(label));
  return positions;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      out(a, b) = m(idx[a], idx[b]);
  return out;
}

Partition cluster_signal(const AnalysisResult& result, const RunConfig& config,
                         bool* converged) {
  const WeightedGraph& g_signal = result.signal->signal_graph;
  const auto positions = signal_positions(result.graph, g_signal);
  const Eigen::MatrixXd expectation_sub =
      submatrix(result.ensemble.expectation(), positions);
  const std::uint64_t seed = config.null_spec.seed;
  *converged = true;

  switch (config.cluster) {
    case ClusterMethod::kmeans: {
      Eigen::MatrixXd projection(positions.size(),
                                 result.signal->projection.cols());
      for (std::size_t a = 0; a < positions.size(); ++a)
        projection.row(a) = result.signal->projection.row(positions[a]);
      const int c = result.estimate.d_pos + 1;
      return kmeans_partition(projection, c, config.kmeans_restarts,
                              expectation_sub, g_signal, seed);
    }
    case ClusterMethod::consensus: {
      const Eigen::MatrixXd c_signal =
          comparison_matrix(g_signal, expectation_sub);
      ConsensusOptions options;
      options.initial_groups = result.estimate.d_pos + 1;
      options.seed = seed;
      options.jobs = config.jobs;
      ConsensusState state;
      Partition part = consensus_cluster(c_signal, expectation_sub, g_signal,
                                         config.kmeans_restarts, options,
                                         &state);
      *converged = state.converged;
      return part;
    }
    case ClusterMethod::louvain:
      return louvain(g_signal, expectation_sub, seed);
    case ClusterMethod::multiway: {
      const Eigen::MatrixXd c_signal =
          comparison_matrix(g_signal, expectation_sub);
      SpectralEstimate signal_estimate;
      EigenDecomposition eig = eig_symmetric(c_signal);
      signal_estimate.data_eigenvalues = std::move(eig.values);
      signal_estimate.data_eigenvectors = std::move(eig.vectors);
      return multiway_unsupervised(signal_estimate, 20, expectation_sub,
                                   g_signal, seed);
    }
  }
  throw std::logic_error("unknown cluster method");
}

}  // namespace

void RunConfig::validate() const {
  null_spec.validate();
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("alpha must be in (0,1)");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (kmeans_restarts < 1)
    throw std::invalid_argument("clustering restarts must be >= 1");
}

AnalysisResult analyze_graph(const WeightedGraph& raw,
                             const RunConfig& config) {
  config.validate();
  AnalysisResult result;
  result.graph = giant_component(raw);
  result.ensemble = build_ensemble(result.graph, config.null_spec);
  result.estimate = spectral_estimate(result.graph, result.ensemble, config.jobs);

  if (config.bound != BoundMethod::mean) {
    std::tie(result.estimate.d_pos, result.estimate.d_neg) =
        detect_dimensions_with_method(result.estimate, config.bound,
                                      config.alpha, config.n_permutations,
                                      config.null_spec.seed);
    result.upper_test = ci_test(result.estimate.sampled_maxima,
                                result.estimate.data_eigenvalues, config.alpha);
  }

  const bool modular = result.estimate.d_pos >= 1;
  const bool kpartite = result.estimate.d_neg >= 1;
  result.structure = modular && kpartite ? "modular+kpartite"
                     : modular           ? "modular"
                     : kpartite          ? "kpartite"
                                         : "none";

  if (modular) {
    result.signal = decompose_signal(result.graph, result.estimate,
                                     result.ensemble, config.weighting,
                                     config.jobs);
    if (!result.signal->signal_graph.empty() &&
        result.signal->signal_graph.size() >= 2) {
      try {
        result.partition =
            cluster_signal(result, config, &result.partition_converged);
      } catch (const std::invalid_argument&) {
        // Signal network too degenerate to cluster; leave partition empty.
      }
    }
  }
  if (kpartite)
    result.kpartite = kpartite_extract(result.estimate, result.ensemble,
                                       config.weighting, config.jobs);
  return result;
}

namespace {

std::map<std::int64_t, std::int64_t> scaled_weight_counts(
    const Eigen::MatrixXd& w, double kappa) {
  std::map<std::int64_t, std::int64_t> counts;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      const std::int64_t v = std::llround(kappa * w(i, j));
      if (v > 0) ++counts[v];
    }
  return counts;
}

}  // namespace

std::string report_json(const AnalysisResult& result, const RunConfig& config) {
  json doc;
  doc["config"] = {
      {"input", config.input_path},
      {"null", kind_name(config.null_spec.kind)},
      {"samples", config.null_spec.num_samples},
      {"kappa", config.null_spec.kappa},
      {"sampler", config.null_spec.sampler == SamplerKind::poisson
                      ? "poisson"
                      : "stub_matching"},
      {"seed", config.null_spec.seed},
      {"bound", bound_name(config.bound)},
      {"alpha", config.alpha},
      {"cluster", cluster_name(config.cluster)},
  };

  const WeightedGraph& g = result.graph;
  doc["graph"] = {
      {"nodes", g.size()},
      {"unique_links", g.unique_link_count()},
      {"nonzero_entries", g.nonzero_entry_count()},
      {"density", finite(g.density())},
      {"total_unique_weight", finite(g.total_unique_weight())},
      {"granularity", granularity_name(g.granularity())},
  };

  const SpectralEstimate& est = result.estimate;
  doc["spectral"] = {
      {"eigenvalues", vector_to_json(est.data_eigenvalues)},
      {"upper_bound", finite(est.upper_bound)},
      {"lower_bound", finite(est.lower_bound)},
      {"sampled_maxima", vector_to_json(est.sampled_maxima)},
      {"sampled_minima", vector_to_json(est.sampled_minima)},
      {"d_pos", est.d_pos},
      {"d_neg", est.d_neg},
  };
  if (result.upper_test) {
    json entries = json::array();
    for (const auto& e : result.upper_test->per_eigenvalue)
      entries.push_back({{"eigenvalue", finite(e.eigenvalue)},
                         {"statistic", finite(e.statistic)},
                         {"p_or_limit", finite(e.p_or_limit)},
                         {"exceeds", e.exceeds}});
    doc["spectral"]["upper_test"] = {
        {"alpha", config.alpha},
        {"per_eigenvalue", entries},
    };
  }

  doc["structure"] = result.structure;

  if (result.signal) {
    const SignalDecomposition& sig = *result.signal;
    json nodes = json::array();
    for (Eigen::Index j = 0; j < g.size(); ++j)
      nodes.push_back({{"label", g.labels()[j]},
                       {"norm", finite(sig.data_norms(j))},
                       {"expected_norm", finite(sig.expected_norms(j))}});
    std::vector<bool> retained_flag(g.size(), false);
    for (Eigen::Index j : sig.retained) retained_flag[j] = true;
    for (Eigen::Index j = 0; j < g.size(); ++j)
      nodes[j]["retained"] = static_cast<bool>(retained_flag[j]);
    doc["rejection"] = {
        {"nodes", nodes},
        {"retained_count", sig.retained.size()},
        {"rejected_count", sig.rejected.size()},
    };
    doc["signal"] = {
        {"nodes", sig.signal_graph.size()},
        {"unique_links", sig.signal_graph.unique_link_count()},
    };
  }

  if (result.partition) {
    const Partition& part = *result.partition;
    doc["partition"] = {
        {"method", cluster_name(config.cluster)},
        {"num_groups", part.num_groups},
        {"quality", finite(part.quality)},
        {"converged", result.partition_converged},
    };
  }

  if (result.kpartite) {
    const KPartiteResult& kp = *result.kpartite;
    json entry = {
        {"d_neg", est.d_neg},
        {"retained_count", kp.retained_nodes.size()},
    };
    if (!kp.groups.empty()) {
      json positive = json::array(), negative = json::array();
      for (std::size_t i = 0; i < kp.retained_nodes.size(); ++i) {
        const std::string& label = g.labels()[kp.retained_nodes[i]];
        (kp.groups[i] == 0 ? positive : negative).push_back(label);
      }
      entry["sign_groups"] = {{"positive", positive}, {"negative", negative}};
    }
    doc["kpartite"] = entry;
  }

  return doc.dump(2) + "\n";
}

void write_reports(const AnalysisResult& result, const RunConfig& config,
                   std::int64_t elapsed_ms) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const fs::path dir(config.out_dir);

  {
    std::ofstream out(dir / "report.json");
    out << report_json(result, config);
  }
  {
    std::ofstream out(dir / "signal.tsv");
    if (result.signal) save_edge_list(result.signal->signal_graph, out);
  }
  {
    std::ofstream out(dir / "partition.tsv");
    if (result.partition && result.signal) {
      const auto& labels = result.signal->signal_graph.labels();
      for (std::size_t i = 0; i < labels.size(); ++i)
        out << labels[i] << '\t' << result.partition->assignment[i] << '\n';
    }
  }
  {
    std::ofstream out(dir / "eigs.csv");
    out << "rank,eigenvalue,above_upper,below_lower\n";
    const auto& est = result.estimate;
    char buf[64];
    for (Eigen::Index i = 0; i < est.data_eigenvalues.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", est.data_eigenvalues(i));
      out << i << ',' << buf << ','
          << (est.data_eigenvalues(i) > est.upper_bound ? 1 : 0) << ','
          << (est.data_eigenvalues(i) < est.lower_bound ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream out(dir / "weightdist.csv");
    out << "weight,count,cumulative_fraction\n";
    const auto counts =
        scaled_weight_counts(result.graph.weights(), config.null_spec.kappa);
    std::int64_t total = 0;
    for (const auto& [w, c] : counts) total += c;
    std::int64_t running = 0;
    char buf[64];
    for (const auto& [w, c] : counts) {
      running += c;
      std::snprintf(buf, sizeof(buf), "%.10g",
                    total > 0 ? double(running) / double(total) : 0.0);
      out << w << ',' << c << ',' << buf << '\n';
    }
  }
  {
    // Wall-clock details live here so report.json stays byte-reproducible.
    std::ofstream out(dir / "run.log", std::ios::app);
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << stamp << " analyze input=" << config.input_path
        << " jobs=" << config.jobs << " elapsed_ms=" << elapsed_ms << '\n';
  }
}

void write_nulldiag_csv(const WeightedGraph& g, const NullModelSpec& spec,
                        std::ostream& out) {
  spec.validate();
  const auto data_counts = scaled_weight_counts(g.weights(), spec.kappa);

  out << "source,weight,count,cumulative_fraction,count_diff_vs_data\n";
  auto emit = [&](const std::string& source,
                  const std::map<std::int64_t, std::int64_t>& counts) {
    // Rows cover the union of the source's and the data's weight values.
    std::map<std::int64_t, std::int64_t> merged = counts;
    for (const auto& [w, c] : data_counts) merged.emplace(w, 0);
    std::int64_t total = 0;
    for (const auto& [w, c] : counts) total += c;
    std::int64_t running = 0;
    char buf[64];
    for (const auto& [w, c] : merged) {
      running += c;
      const std::int64_t data_c =
          data_counts.count(w) ? data_counts.at(w) : 0;
      std::snprintf(buf, sizeof(buf), "%.10g",
                    total > 0 ? double(running) / double(total) : 0.0);
      out << source << ',' << w << ',' << c << ',' << buf << ','
          << (c - data_c) << '\n';
    }
  };

  emit("data", data_counts);
  for (int i = 0; i < spec.num_samples; ++i) {
    const Eigen::MatrixXd sample = sample_null(g, spec, i);
    emit("sample_" + std::to_string(i),
         scaled_weight_counts(sample, spec.kappa));
  }
}

std::int64_t nulldiag_max_error(const WeightedGraph& g,
                                const NullModelSpec& spec) {
  spec.validate();
  const auto data_counts = scaled_weight_counts(g.weights(), spec.kappa);
  std::int64_t worst = 0;
  for (int i = 0; i < spec.num_samples; ++i) {
    const auto counts =
        scaled_weight_counts(sample_null(g, spec, i), spec.kappa);
    std::map<std::int64_t, std::int64_t> merged = counts;
    for (const auto& [w, c] : data_counts) merged.emplace(w, 0);
    for (const auto& [w, c] : merged) {
      const std::int64_t data_c = data_counts.count(w) ? data_counts.at(w) : 0;
      worst = std::max<std::int64_t>(worst, std::llabs(c - data_c));
    }
  }
  return worst;
}

}  // namespace netsift
