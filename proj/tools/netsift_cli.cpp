#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netsift/pipeline.hpp"
#include "netsift/synthetic.hpp"

namespace {

using namespace netsift;

struct NullFlags {
  std::string null_kind = "sparse";
  int samples = 100;
  double kappa = 1.0;
  std::uint64_t seed = 0;
  bool stub_matching = false;
  bool literal_budget = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--null", null_kind, "Null model: wcm or sparse")
        ->check(CLI::IsMember({"wcm", "sparse"}));
    cmd->add_option("--samples", samples, "Number of sampled null models N")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--kappa", kappa,
                    "Weight scale for count-based samplers (>= 1)")
        ->check(CLI::Range(1.0, 1e12));
    cmd->add_option("--seed", seed, "Run seed");
    cmd->add_flag("--stub-matching", stub_matching,
                  "Sample by exact stub matching (full WCM, small graphs)");
    cmd->add_flag("--literal-budget", literal_budget,
                  "Sparse residual weight budget 1/2*sum(s) - 2m*");
  }

  NullModelSpec to_spec() const {
    NullModelSpec spec;
    spec.kind = null_kind == "wcm" ? NullModelKind::full_wcm
                                   : NullModelKind::sparse_wcm;
    spec.num_samples = samples;
    spec.kappa = kappa;
    spec.seed = seed;
    spec.sampler =
        stub_matching ? SamplerKind::stub_matching : SamplerKind::poisson;
    spec.literal_residual_budget = literal_budget;
    return spec;
  }
};

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(std::stod(item));
  if (values.empty()) throw CLI::ValidationError("empty value list");
  return values;
}

int run_analyze(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const WeightedGraph raw =
      load_edge_list_file(config.input_path, config.symmetrize_directed);
  const AnalysisResult result = analyze_graph(raw, config);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  write_reports(result, config, elapsed);

  std::cout << "structure: " << result.structure
            << "  (d_pos=" << result.estimate.d_pos
            << ", d_neg=" << result.estimate.d_neg << ")\n";
  if (result.signal)
    std::cout << "signal network: " << result.signal->signal_graph.size()
              << " of " << result.graph.size() << " nodes ("
              << result.signal->rejected.size() << " rejected)\n";
  if (result.partition)
    std::cout << "partition: " << result.partition->num_groups
              << " groups, Q=" << result.partition->quality
              << (result.partition_converged ? "" : " (not converged)") << "\n";
  std::cout << "reports written to " << config.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "netsift: spectral detection of low-dimensional network structure "
      "against sampled null models"};
  app.require_subcommand(1);

  // ---- analyze ----
  auto* analyze = app.add_subcommand(
      "analyze", "Run the full pipeline on an edge-list network");
  RunConfig config;
  NullFlags null_flags;
  std::string bound = "mean", cluster = "consensus", norm = "lambda";
  analyze->add_option("--input", config.input_path, "Edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  null_flags.attach(analyze);
  analyze->add_option("--bound", bound, "Bound method: mean|ci|ttest|perm")
      ->check(CLI::IsMember({"mean", "ci", "ttest", "perm"}));
  analyze->add_option("--alpha", config.alpha, "Confidence level (0,1)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  analyze
      ->add_option("--cluster", cluster,
                   "Clustering: kmeans|consensus|louvain|multiway")
      ->check(CLI::IsMember({"kmeans", "consensus", "louvain", "multiway"}));
  analyze->add_option("--restarts", config.kmeans_restarts,
                      "k-means restarts p");
  analyze->add_option("--jobs", config.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--out", config.out_dir, "Output directory");
  analyze->add_flag("--symmetrize", config.symmetrize_directed,
                    "Read a directed list and use W = (W + W^T)/2");
  analyze->add_option("--norm", norm,
                      "Projection weighting: lambda|sqrt-lambda")
      ->check(CLI::IsMember({"lambda", "sqrt-lambda"}));

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "Sweep synthetic block-model networks through the pipeline");
  NullFlags synth_null;
  SyntheticSpec base;
  std::string p_within_list = "0.2", p_noise_list = "0";
  int replicates = 50;
  int synth_jobs = 1;
  std::string synth_out = "sweep.csv";
  std::string synth_cluster = "kmeans";
  synth->add_option("--n", base.n, "Nodes in planted modules");
  synth->add_option("--groups", base.groups, "Number of planted modules");
  synth->add_option("--p-within", p_within_list,
                    "P(within) values, comma-separated");
  synth->add_option("--p-between", base.p_between, "P(between)");
  synth->add_option("--p-noise", p_noise_list,
                    "P(noise) values, comma-separated");
  synth->add_option("--f-noise", base.f_noise, "Noise halo fraction");
  synth->add_option("--lambda-s", base.lambda_s,
                    "Poisson strength parameter");
  synth->add_option("--replicates", replicates, "Networks per grid point")
      ->check(CLI::PositiveNumber);
  synth_null.attach(synth);
  synth->add_option("--jobs", synth_jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  synth
      ->add_option("--cluster", synth_cluster,
                   "Clustering within the sweep: kmeans|none")
      ->check(CLI::IsMember({"kmeans", "none"}));
  synth->add_option("--out", synth_out, "Sweep CSV path");

  // ---- nulldiag ----
  auto* nulldiag = app.add_subcommand(
      "nulldiag", "Compare sampled null-model weight distributions to data");
  NullFlags diag_null;
  std::string diag_input, diag_out = "nulldiag.csv";
  bool diag_symmetrize = false;
  nulldiag->add_option("--input", diag_input, "Edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  diag_null.attach(nulldiag);
  nulldiag->add_flag("--symmetrize", diag_symmetrize,
                     "Read a directed list and use W = (W + W^T)/2");
  nulldiag->add_option("--out", diag_out, "Diagnostic CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      config.null_spec = null_flags.to_spec();
      config.bound = bound == "mean"    ? BoundMethod::mean
                     : bound == "ci"    ? BoundMethod::ci
                     : bound == "ttest" ? BoundMethod::ttest
                                        : BoundMethod::permutation;
      config.cluster = cluster == "kmeans"    ? ClusterMethod::kmeans
                       : cluster == "louvain" ? ClusterMethod::louvain
                       : cluster == "multiway"
                           ? ClusterMethod::multiway
                           : ClusterMethod::consensus;
      config.weighting = norm == "lambda" ? NormWeighting::eigenvalue
                                          : NormWeighting::sqrt_eigenvalue;
      return run_analyze(config);
    }
    if (*synth) {
      SweepConfig sweep;
      sweep.null_spec = synth_null.to_spec();
      sweep.replicates = replicates;
      sweep.seed = synth_null.seed;
      sweep.jobs = synth_jobs;
      sweep.cluster = synth_cluster == "none" ? SweepCluster::none
                                              : SweepCluster::kmeans;
      std::vector<SyntheticSpec> grid;
      for (double p_noise : parse_list(p_noise_list)) {
        for (double p_within : parse_list(p_within_list)) {
          SyntheticSpec cell = base;
          cell.p_within = p_within;
          cell.p_noise = p_noise;
          grid.push_back(cell);
        }
      }
      std::cerr << "sweeping " << grid.size() << " cells x " << replicates
                << " replicates\n";
      const auto rows = sweep_detection(grid, sweep);
      for (const auto& row : rows)
        if (!row.error.empty())
          std::cerr << "replicate " << row.replicate << " at p_within="
                    << row.p_within << " p_noise=" << row.p_noise
                    << " failed: " << row.error << "\n";
      std::ofstream out(synth_out);
      if (!out) throw std::runtime_error("cannot write " + synth_out);
      write_sweep_csv(rows, out);
      std::cout << rows.size() << " rows -> " << synth_out << "\n";
      return 0;
    }
    if (*nulldiag) {
      const WeightedGraph g =
          giant_component(load_edge_list_file(diag_input, diag_symmetrize));
      std::ofstream out(diag_out);
      if (!out) throw std::runtime_error("cannot write " + diag_out);
      write_nulldiag_csv(g, diag_null.to_spec(), out);
      std::cout << "diagnostic -> " << diag_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
