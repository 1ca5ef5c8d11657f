#include "netsift/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "netsift/parallel.hpp"
#include "netsift/random.hpp"

namespace netsift {

Partition make_partition(const std::vector<int>& raw_assignment) {
  Partition part;
  part.assignment.resize(raw_assignment.size());
  std::vector<int> relabel;
  for (std::size_t i = 0; i < raw_assignment.size(); ++i) {
    const int raw = raw_assignment[i];
    auto it = std::find(relabel.begin(), relabel.end(), raw);
    if (it == relabel.end()) {
      relabel.push_back(raw);
      it = relabel.end() - 1;
    }
    part.assignment[i] = static_cast<int>(it - relabel.begin());
  }
  part.num_groups = static_cast<int>(relabel.size());
  return part;
}

double modularity(const WeightedGraph& g, const Eigen::MatrixXd& expectation,
                  const Partition& part, bool normalized) {
  const Eigen::Index n = g.size();
  if (static_cast<Eigen::Index>(part.assignment.size()) != n)
    throw std::invalid_argument("modularity: assignment size mismatch");
  const Eigen::MatrixXd c = comparison_matrix(g, expectation);
  double q = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (part.assignment[i] == part.assignment[j]) q += c(i, j);
  if (normalized) {
    const double total = g.weights().sum();
    if (total > 0.0) q /= total;
  }
  return q;
}

namespace {

// One k-means run with distance-weighted (k-means++ style) seeding.
std::vector<int> kmeans_single(const Eigen::MatrixXd& points, int c,
                               std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::MatrixXd centers(c, d);
  centers.row(0) = points.row(pick(rng));

  Eigen::VectorXd dist2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 1; k < c; ++k) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(k) = points.row(chosen);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int k = 1; k < c; ++k) {
        const double dk = (points.row(i) - centers.row(k)).squaredNorm();
        if (dk < best_d) {
          best_d = dk;
          best = k;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      counts(labels[i]) += 1.0;
    }
    for (int k = 0; k < c; ++k) {
      if (counts(k) > 0.0) {
        centers.row(k) = sums.row(k) / counts(k);
      } else {
        // Re-seed an emptied cluster at the point farthest from its center.
        Eigen::Index farthest = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double di =
              (points.row(i) - centers.row(labels[i])).squaredNorm();
          if (di > far_d) {
            far_d = di;
            farthest = i;
          }
        }
        centers.row(k) = points.row(farthest);
      }
    }
  }
  return labels;
}

Eigen::Index count_distinct_rows(const Eigen::MatrixXd& points) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::vector<double> row(points.cols());
    for (Eigen::Index j = 0; j < points.cols(); ++j) row[j] = points(i, j);
    rows.insert(std::move(row));
  }
  return static_cast<Eigen::Index>(rows.size());
}

}  // namespace

Partition kmeans_partition(const Eigen::MatrixXd& projection, int c, int p,
                           const Eigen::MatrixXd& expectation,
                           const WeightedGraph& g, std::uint64_t seed) {
  if (c < 2) throw std::invalid_argument("kmeans_partition: c must be >= 2");
  if (p < 1) throw std::invalid_argument("kmeans_partition: p must be >= 1");
  if (count_distinct_rows(projection) < c)
    throw std::invalid_argument(
        "kmeans_partition: fewer distinct points than clusters");

  Partition best;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < p; ++restart) {
    auto rng = substream_engine(seed, RngStream::kmeans, restart);
    Partition candidate = make_partition(kmeans_single(projection, c, rng));
    candidate.quality = modularity(g, expectation, candidate);
    if (candidate.quality > best_q) {
      best_q = candidate.quality;
      best = std::move(candidate);
    }
  }
  return best;
}

namespace {

Eigen::MatrixXd eigen_projection(const Eigen::MatrixXd& sym, int dims) {
  const EigenDecomposition eig = eig_symmetric(sym);
  Eigen::MatrixXd projection(sym.rows(), dims);
  for (int i = 0; i < dims; ++i)
    projection.col(i) = eig.values(i) * eig.vectors.col(i);
  return projection;
}

int positive_eigenvalue_count(const Eigen::MatrixXd& sym) {
  const Eigen::VectorXd values = eig_symmetric_values(sym);
  const double tol = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
  int count = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > tol) ++count;
  return count;
}

Eigen::MatrixXd co_clustering(const std::vector<std::vector<int>>& partitions,
                              Eigen::Index n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (const auto& labels : partitions)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j)
        if (labels[i] == labels[j]) {
          d(i, j) += 1.0;
          d(j, i) = d(i, j);
        }
  // (i, i) accumulated once per partition, so the diagonal normalizes to 1.
  return d / static_cast<double>(partitions.size());
}

bool is_binary(const Eigen::MatrixXd& d, double tol) {
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const double v = d(i, j);
      if (v > tol && v < 1.0 - tol) return false;
    }
  return true;
}

std::vector<int> components_above(const Eigen::MatrixXd& d, double threshold) {
  const Eigen::Index n = d.rows();
  std::vector<int> comp(n, -1);
  int c = 0;
  std::vector<Eigen::Index> stack;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (comp[start] != -1) continue;
    comp[start] = c;
    stack.push_back(start);
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v)
        if (u != v && d(u, v) > threshold && comp[v] == -1) {
          comp[v] = c;
          stack.push_back(v);
        }
    }
    ++c;
  }
  return comp;
}

}  // namespace

double consensus_null_value(int p, int k, int l) {
  if (k < 2 || l > k)
    throw std::invalid_argument("consensus_null_value: need l <= k, k >= 2");
  double sum = 0.0;
  for (int c = l; c <= k; ++c) sum += static_cast<double>(p) / c;
  return sum / (static_cast<double>(p) * (k - 1));
}

Partition consensus_cluster(const Eigen::MatrixXd& c_source,
                            const Eigen::MatrixXd& expectation,
                            const WeightedGraph& g, int p,
                            const ConsensusOptions& options,
                            ConsensusState* state) {
  const Eigen::Index n = c_source.rows();
  if (p < 1) throw std::invalid_argument("consensus_cluster: p must be >= 1");
  ConsensusState local_state;
  ConsensusState& st = state ? *state : local_state;

  Partition best;
  best.assignment.assign(n, 0);
  best.num_groups = 1;
  best.quality = modularity(g, expectation, best);

  const int positive = positive_eigenvalue_count(c_source);
  if (positive < 1) {
    // No positive departure to project onto: a single group is the answer.
    st.converged = true;
    return best;
  }

  auto track_best = [&](const std::vector<int>& labels) {
    Partition candidate = make_partition(labels);
    candidate.quality = modularity(g, expectation, candidate);
    if (candidate.quality > best.quality) best = std::move(candidate);
  };

  std::uint64_t run_counter = 0;
  auto kmeans_sweep = [&](const Eigen::MatrixXd& projection, int k_lo,
                          int k_hi) {
    std::vector<std::vector<int>> partitions;
    const Eigen::Index distinct = count_distinct_rows(projection);
    for (int k = k_lo; k <= k_hi; ++k) {
      if (k > distinct || k > n) break;
      // Runs land in per-index slots and are scored in index order, so the
      // result is identical at any job count.
      std::vector<std::vector<int>> runs(p);
      const std::uint64_t base = run_counter;
      parallel_for_index(p, options.jobs, [&](int run) {
        auto rng = substream_engine(options.seed, RngStream::kmeans,
                                    base + static_cast<std::uint64_t>(run));
        runs[run] = kmeans_single(projection, k, rng);
      });
      run_counter += static_cast<std::uint64_t>(p);
      for (auto& labels : runs) {
        track_best(labels);
        partitions.push_back(std::move(labels));
      }
    }
    return partitions;
  };

  // Seeding round: p partitions at the initial group count, clustered in the
  // projection of the source comparison matrix.
  const int c0 = std::max(2, std::min<int>(options.initial_groups,
                                           static_cast<int>(n)));
  const int dims0 = std::min(c0 - 1, positive);
  auto partitions = kmeans_sweep(eigen_projection(c_source, dims0), c0, c0);
  if (partitions.empty()) {
    st.converged = true;
    return best;
  }

  int k_formula = c0;
  int l = k_formula;  // l = K on the first round, 2 afterwards
  std::vector<int> previous_grouping;
  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    st.iterations = iteration;
    Eigen::MatrixXd d = co_clustering(partitions, n);
    st.consensus_matrix = d;
    st.k_max = k_formula;

    const double null_value = k_formula >= 2
                                  ? consensus_null_value(p, k_formula, l)
                                  : 0.0;
    st.null_matrix = Eigen::MatrixXd::Constant(n, n, null_value);
    const Eigen::MatrixXd c_con = d - st.null_matrix;

    // Converged when the co-clustering is unanimous, or when the partition
    // implied by above-null co-clustering repeats across rounds (sweeps over
    // k below the true group count keep a floor of merge co-clusterings, so
    // exact unanimity is unreachable whenever more than two groups exist).
    const std::vector<int> grouping = components_above(d, null_value);
    if (is_binary(d, options.binary_tolerance) ||
        (!previous_grouping.empty() && grouping == previous_grouping)) {
      Partition final = make_partition(grouping);
      final.quality = modularity(g, expectation, final);
      st.converged = true;
      return final;
    }
    previous_grouping = grouping;

    const int k = positive_eigenvalue_count(c_con);
    if (k < 2) break;
    partitions = kmeans_sweep(eigen_projection(c_con, std::min<int>(k, n)), 2,
                              std::min<int>(k, static_cast<int>(n)));
    if (partitions.empty()) break;
    k_formula = std::min<int>(k, static_cast<int>(n));
    l = 2;
  }

  st.converged = false;
  return best;
}

Partition louvain(const WeightedGraph& g, const Eigen::MatrixXd& expectation,
                  std::uint64_t seed) {
  const Eigen::Index n = g.size();
  auto rng = substream_engine(seed, RngStream::louvain, 0);

  Eigen::MatrixXd c = comparison_matrix(g, expectation);
  std::vector<int> node_to_final(n);
  std::iota(node_to_final.begin(), node_to_final.end(), 0);

  while (true) {
    const Eigen::Index level_n = c.rows();
    std::vector<int> comm(level_n);
    std::iota(comm.begin(), comm.end(), 0);
    const double gain_floor =
        1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff() * level_n);

    std::vector<Eigen::Index> order(level_n);
    std::iota(order.begin(), order.end(), 0);
    bool any_move = false;
    bool improved = true;
    while (improved) {
      improved = false;
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index node : order) {
        // Link mass from `node` to every community, excluding itself.
        Eigen::VectorXd to_comm = Eigen::VectorXd::Zero(level_n);
        for (Eigen::Index j = 0; j < level_n; ++j)
          if (j != node) to_comm(comm[j]) += c(node, j);
        const int current = comm[node];
        int best = current;
        double best_gain = 0.0;
        // Ascending scan keeps ties on the lowest community index.
        for (Eigen::Index target = 0; target < level_n; ++target) {
          if (static_cast<int>(target) == current) continue;
          const double gain = 2.0 * (to_comm(target) - to_comm(current));
          if (gain > best_gain + gain_floor) {
            best_gain = gain;
            best = static_cast<int>(target);
          }
        }
        if (best != current && best_gain > gain_floor) {
          comm[node] = best;
          improved = true;
          any_move = true;
        }
      }
    }
    if (!any_move) break;

    // Aggregate communities into supernodes.
    const Partition level = make_partition(comm);
    Eigen::MatrixXd aggregated =
        Eigen::MatrixXd::Zero(level.num_groups, level.num_groups);
    for (Eigen::Index i = 0; i < level_n; ++i)
      for (Eigen::Index j = 0; j < level_n; ++j)
        aggregated(level.assignment[i], level.assignment[j]) += c(i, j);
    for (Eigen::Index v = 0; v < n; ++v)
      node_to_final[v] = level.assignment[node_to_final[v]];
    c = std::move(aggregated);
    if (level.num_groups == level_n) break;
  }

  Partition out = make_partition(node_to_final);
  out.quality = modularity(g, expectation, out);
  return out;
}

namespace {

Eigen::MatrixXd multiway_vectors(const SpectralEstimate& estimate, int k) {
  int positive = 0;
  const Eigen::VectorXd& values = estimate.data_eigenvalues;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > 0.0) ++positive;
  if (k - 1 > positive)
    throw std::invalid_argument(
        "multiway_partition: k-1 exceeds available positive eigenpairs");
  Eigen::MatrixXd r(estimate.data_eigenvectors.rows(), k - 1);
  for (int l = 0; l < k - 1; ++l)
    r.col(l) = std::sqrt(values(l)) * estimate.data_eigenvectors.col(l);
  return r;
}

}  // namespace

Partition multiway_partition(const SpectralEstimate& estimate, int k,
                             const Eigen::MatrixXd& expectation,
                             const WeightedGraph& g, std::uint64_t seed,
                             bool* converged) {
  if (k < 2) throw std::invalid_argument("multiway_partition: k must be >= 2");
  const Eigen::MatrixXd r = multiway_vectors(estimate, k);
  const Eigen::Index n = r.rows();
  if (k > n) throw std::invalid_argument("multiway_partition: k exceeds n");

  auto rng = substream_engine(seed, RngStream::multiway, 0);

  // Initial group vectors: k node vectors chosen at random. Re-draw while
  // any two seeds coincide as vectors (identical seeds make the synchronous
  // sweep oscillate between empty groups).
  Eigen::MatrixXd group_vectors(k, r.cols());
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Eigen::Index> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int s = 0; s < k; ++s) {
      std::uniform_int_distribution<Eigen::Index> pick(s, n - 1);
      std::swap(ids[s], ids[pick(rng)]);
    }
    for (int s = 0; s < k; ++s) group_vectors.row(s) = r.row(ids[s]);
    bool distinct = true;
    for (int a = 0; a < k && distinct; ++a)
      for (int b = a + 1; b < k && distinct; ++b)
        if (group_vectors.row(a) == group_vectors.row(b)) distinct = false;
    if (distinct) break;
  }

  std::vector<int> labels(n, -1);
  bool stable = false;
  constexpr int kMaxSweeps = 1000;
  for (int sweep = 0; sweep < kMaxSweeps && !stable; ++sweep) {
    std::vector<int> next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = labels[i] >= 0 ? labels[i] : 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < k; ++s) {
        double score = group_vectors.row(s).dot(r.row(i));
        if (s == labels[i])  // exclude the node's own contribution
          score -= r.row(i).squaredNorm();
        if (score > best_score) {
          best_score = score;
          best = s;
        } else if (score == best_score && labels[i] == s) {
          best = s;  // ties keep the current assignment
        }
      }
      next[i] = best;
    }
    stable = (next == labels);
    labels = std::move(next);
    group_vectors.setZero();
    for (Eigen::Index i = 0; i < n; ++i) group_vectors.row(labels[i]) += r.row(i);
  }
  if (converged) *converged = stable;

  Partition out = make_partition(labels);
  out.quality = modularity(g, expectation, out);
  return out;
}

int knee_index(const std::vector<double>& y, int k_min) {
  const int count = static_cast<int>(y.size());
  if (count < 2) throw std::invalid_argument("knee_index: need >= 2 points");

  auto fit_sse = [&](int lo, int hi) {  // inclusive index range into y
    const int m = hi - lo + 1;
    if (m <= 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = lo; i <= hi; ++i) {
      const double x = k_min + i;
      sx += x;
      sy += y[i];
      sxx += x * x;
      sxy += x * y[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / m;
    double sse = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double e = y[i] - (slope * (k_min + i) + intercept);
      sse += e * e;
    }
    return sse;
  };

  // Interior candidates only; the knee joins both fits.
  const int first = 1;
  const int last = std::max(1, count - 2);
  int best_k = k_min + first;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = first; i <= last; ++i) {
    const double sse = fit_sse(0, i) + fit_sse(i, count - 1);
    if (sse < best_sse - 1e-15) {
      best_sse = sse;
      best_k = k_min + i;
    }
  }
  return best_k;
}

Partition multiway_unsupervised(const SpectralEstimate& estimate, int k_max,
                                const Eigen::MatrixXd& expectation,
                                const WeightedGraph& g, std::uint64_t seed) {
  if (k_max < 3)
    throw std::invalid_argument(
        "multiway_unsupervised: k_max < 3 leaves no interior knee");
  int positive = 0;
  for (Eigen::Index i = 0; i < estimate.data_eigenvalues.size(); ++i)
    if (estimate.data_eigenvalues(i) > 0.0) ++positive;
  const int k_hi = std::min<int>(
      {k_max, positive + 1, static_cast<int>(estimate.data_eigenvectors.rows())});
  if (k_hi < 3)
    throw std::invalid_argument(
        "multiway_unsupervised: not enough positive eigenpairs to scan");

  std::vector<Partition> partitions;
  std::vector<double> q_curve;
  for (int k = 2; k <= k_hi; ++k) {
    partitions.push_back(multiway_partition(
        estimate, k, expectation, g, splitmix64(seed) + k, nullptr));
    q_curve.push_back(partitions.back().quality);
  }
  const int knee = knee_index(q_curve, 2);
  return partitions[knee - 2];
}

}  // namespace netsift
