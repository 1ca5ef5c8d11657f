#include "netsift/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace netsift {

namespace {

bool is_integral(double x) { return std::nearbyint(x) == x; }

WeightGranularity infer_granularity(const Eigen::MatrixXd& w) {
  bool binary = true;
  bool integral = true;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double v = w(i, j);
      if (v != 0.0 && v != 1.0) binary = false;
      if (!is_integral(v)) {
        integral = false;
        break;
      }
    }
    if (!integral) break;
  }
  if (binary) return WeightGranularity::binary;
  if (integral) return WeightGranularity::integer;
  return WeightGranularity::real;
}

}  // namespace

WeightedGraph::WeightedGraph(std::vector<std::string> labels,
                             Eigen::MatrixXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  const Eigen::Index n = weights_.rows();
  if (weights_.cols() != n)
    throw std::invalid_argument("weight matrix must be square");
  if (static_cast<Eigen::Index>(labels_.size()) != n)
    throw std::invalid_argument("label count must match matrix size");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0)
      throw std::invalid_argument("weight matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (weights_(i, j) != weights_(j, i))
        throw std::invalid_argument("weight matrix must be symmetric");
      if (weights_(i, j) < 0.0)
        throw std::invalid_argument("weights must be nonnegative");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second)
      throw std::invalid_argument("duplicate node label: " + l);
  }
  granularity_ = infer_granularity(weights_);
}

std::int64_t WeightedGraph::unique_link_count() const {
  std::int64_t m = 0;
  for (Eigen::Index i = 0; i < weights_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < weights_.cols(); ++j)
      if (weights_(i, j) > 0.0) ++m;
  return m;
}

double WeightedGraph::density() const {
  const Eigen::Index n = size();
  if (n < 2) return 0.0;
  return static_cast<double>(unique_link_count()) /
         (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

WeightedGraph load_edge_list(std::istream& in, bool symmetrize_directed) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, Eigen::Index> index_of;
  auto intern = [&](const std::string& label) {
    auto it = index_of.find(label);
    if (it != index_of.end()) return it->second;
    const Eigen::Index idx = static_cast<Eigen::Index>(labels.size());
    labels.push_back(label);
    index_of.emplace(label, idx);
    return idx;
  };

  struct Edge {
    Eigen::Index src, dst;
    double weight;
  };
  std::vector<Edge> edges;

  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream row(line);
    std::string src, dst, weight_str, extra;
    if (!(row >> src >> dst >> weight_str))
      throw std::runtime_error("malformed edge line " + std::to_string(line_no) +
                               ": expected `src dst weight`");
    if (row >> extra)
      throw std::runtime_error("malformed edge line " + std::to_string(line_no) +
                               ": trailing fields");
    double weight = 0.0;
    std::size_t consumed = 0;
    try {
      weight = std::stod(weight_str, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != weight_str.size() || !std::isfinite(weight))
      throw std::runtime_error("malformed edge line " + std::to_string(line_no) +
                               ": bad weight `" + weight_str + "`");
    if (weight < 0.0)
      throw std::runtime_error("negative weight on line " +
                               std::to_string(line_no));
    if (src == dst)
      throw std::runtime_error("self-loop on line " + std::to_string(line_no));
    edges.push_back({intern(src), intern(dst), weight});
  }

  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (symmetrize_directed) {
    // Directed reading: accumulate each arc once, then W <- (W + W^T)/2.
    Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(n, n);
    std::map<std::pair<Eigen::Index, Eigen::Index>, double> seen;
    for (const auto& e : edges) {
      auto key = std::make_pair(e.src, e.dst);
      auto [it, inserted] = seen.emplace(key, e.weight);
      if (!inserted && it->second != e.weight)
        throw std::runtime_error("conflicting duplicate arc " +
                                 labels[e.src] + " -> " + labels[e.dst]);
      directed(e.src, e.dst) = e.weight;
    }
    w = (directed + directed.transpose()) / 2.0;
  } else {
    std::map<std::pair<Eigen::Index, Eigen::Index>, double> seen;
    for (const auto& e : edges) {
      auto key = std::minmax(e.src, e.dst);
      auto [it, inserted] = seen.emplace(key, e.weight);
      if (!inserted && it->second != e.weight)
        throw std::runtime_error("conflicting duplicate undirected link " +
                                 labels[e.src] + " -- " + labels[e.dst]);
      w(key.first, key.second) = e.weight;
      w(key.second, key.first) = e.weight;
    }
  }
  return WeightedGraph(std::move(labels), std::move(w));
}

WeightedGraph load_edge_list_file(const std::string& path,
                                  bool symmetrize_directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in, symmetrize_directed);
}

void save_edge_list(const WeightedGraph& g, std::ostream& out) {
  const auto& w = g.weights();
  const bool integral = g.granularity() != WeightGranularity::real;
  const Eigen::Index n = g.size();
  auto emit = [&](Eigen::Index i, Eigen::Index j) {
    out << g.labels()[i] << '\t' << g.labels()[j] << '\t';
    if (integral) {
      out << static_cast<std::int64_t>(std::llround(w(i, j)));
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", w(i, j));
      out << buf;
    }
    out << '\n';
  };

  // Emit a prefix of edges whose first-appearance order reproduces the node
  // ordering on reload, so load -> save -> load is the identity. For each
  // node in turn: link it to an already-introduced neighbour, else open a
  // fresh pair with its lowest-index neighbour (isolated nodes cannot be
  // represented in an edge list and are dropped).
  std::vector<bool> introduced(n, false);
  std::set<std::pair<Eigen::Index, Eigen::Index>> emitted;
  for (Eigen::Index v = 0; v < n; ++v) {
    if (introduced[v]) continue;
    Eigen::Index partner = -1;
    for (Eigen::Index u = 0; u < n; ++u) {
      if (introduced[u] && w(u, v) > 0.0) {
        partner = u;
        break;
      }
    }
    if (partner >= 0) {
      emit(partner, v);
      emitted.insert(std::minmax(partner, v));
      introduced[v] = true;
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != v && w(v, j) > 0.0) {
          emit(v, j);
          emitted.insert(std::minmax(v, j));
          introduced[v] = introduced[j] = true;
          break;
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (w(i, j) > 0.0 && !emitted.count({i, j})) emit(i, j);
}

void save_edge_list_file(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  save_edge_list(g, out);
}

WeightedGraph induced_subgraph(const WeightedGraph& g,
                               const std::vector<Eigen::Index>& nodes) {
  std::vector<Eigen::Index> order(nodes);
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end())
    throw std::invalid_argument("induced_subgraph: duplicate node index");
  const Eigen::Index k = static_cast<Eigen::Index>(order.size());
  std::vector<std::string> labels(k);
  Eigen::MatrixXd w(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    if (order[a] < 0 || order[a] >= g.size())
      throw std::invalid_argument("induced_subgraph: index out of range");
    labels[a] = g.labels()[order[a]];
    for (Eigen::Index b = 0; b < k; ++b) w(a, b) = g.weights()(order[a], order[b]);
  }
  return WeightedGraph(std::move(labels), std::move(w));
}

namespace {

// Connected components over W > 0; returns component id per node.
std::vector<int> component_ids(const Eigen::MatrixXd& w, int* count) {
  const Eigen::Index n = w.rows();
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
      for (Eigen::Index v = 0; v < n; ++v) {
        if (w(u, v) > 0.0 && comp[v] == -1) {
          comp[v] = c;
          stack.push_back(v);
        }
      }
    }
    ++c;
  }
  *count = c;
  return comp;
}

WeightedGraph largest_component(const WeightedGraph& g) {
  int count = 0;
  const auto comp = component_ids(g.weights(), &count);
  std::vector<std::int64_t> sizes(count, 0);
  for (int c : comp) ++sizes[c];
  // Components are numbered in order of their lowest node index, so the first
  // maximal one realizes the lowest-index tie-break.
  int best = 0;
  for (int c = 1; c < count; ++c)
    if (sizes[c] > sizes[best]) best = c;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (comp[i] == best) keep.push_back(i);
  return induced_subgraph(g, keep);
}

}  // namespace

WeightedGraph giant_component(const WeightedGraph& g) {
  if (g.empty()) throw std::invalid_argument("giant_component: empty graph");
  return largest_component(g);
}

WeightedGraph strip_leaves(const WeightedGraph& g) {
  if (g.empty()) return g;
  const Eigen::MatrixXd& w = g.weights();
  std::vector<Eigen::Index> alive(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) alive[i] = i;

  bool removed = true;
  while (removed && !alive.empty()) {
    removed = false;
    std::vector<Eigen::Index> next;
    for (Eigen::Index idx : alive) {
      int degree = 0;
      for (Eigen::Index j : alive)
        if (w(idx, j) > 0.0) ++degree;
      if (degree == 1)
        removed = true;
      else
        next.push_back(idx);
    }
    if (removed) alive = std::move(next);
  }
  if (alive.empty()) return WeightedGraph({}, Eigen::MatrixXd(0, 0));
  WeightedGraph stripped = induced_subgraph(g, alive);
  return largest_component(stripped);
}

std::vector<WeightDistributionSummary> weight_distribution(
    const WeightedGraph& g) {
  if (g.granularity() == WeightGranularity::real)
    throw std::invalid_argument(
        "weight_distribution requires binary or integer weights; apply "
        "kappa scaling first");
  std::map<std::int64_t, std::int64_t> counts;
  const auto& w = g.weights();
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (Eigen::Index j = i + 1; j < g.size(); ++j)
      if (w(i, j) > 0.0) ++counts[static_cast<std::int64_t>(std::llround(w(i, j)))];

  std::vector<WeightDistributionSummary> out;
  std::int64_t total = 0;
  for (const auto& [value, count] : counts) total += count;
  std::int64_t running = 0;
  for (const auto& [value, count] : counts) {
    running += count;
    out.push_back({value, count,
                   total > 0 ? static_cast<double>(running) / total : 0.0});
  }
  return out;
}

}  // namespace netsift
