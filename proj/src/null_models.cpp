#include "netsift/null_models.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "netsift/random.hpp"

namespace netsift {

namespace {

constexpr double kScaledWeightCap = 1e15;  // llround stays exact below this

// kappa-scaled integer weight matrix: round(kappa * W).
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> scaled_weights(
    const WeightedGraph& g, double kappa) {
  const Eigen::Index n = g.size();
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> w(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scaled = kappa * g.weights()(i, j);
      if (scaled > kScaledWeightCap)
        throw std::overflow_error("kappa-scaled weight overflows integer grid");
      w(i, j) = std::llround(scaled);
    }
  }
  return w;
}

std::int64_t poisson_draw(std::mt19937_64& rng, double rate) {
  if (rate <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(rate);
  return dist(rng);
}

}  // namespace

void NullModelSpec::validate() const {
  if (num_samples < 1)
    throw std::invalid_argument("null model needs at least one sample");
  if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
  if (kind == NullModelKind::sparse_wcm && sampler == SamplerKind::stub_matching)
    throw std::invalid_argument(
        "stub matching is supported for the full WCM only");
}

Eigen::MatrixXd wcm_expectation(const WeightedGraph& g) {
  if (g.size() < 2)
    throw std::invalid_argument("wcm_expectation needs at least 2 nodes");
  const Eigen::VectorXd s = g.strengths();
  const double total = s.sum();
  if (total <= 0.0)
    throw std::invalid_argument("wcm_expectation of an all-zero graph");
  return (s * s.transpose()) / total;
}

Eigen::MatrixXd sample_full_wcm(const WeightedGraph& g,
                                const NullModelSpec& spec, int sample_index) {
  const Eigen::Index n = g.size();
  const auto w = scaled_weights(g, spec.kappa);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s(i) = static_cast<double>(w.row(i).sum());
  const double total = s.sum();

  Eigen::MatrixXd sample = Eigen::MatrixXd::Zero(n, n);
  if (total <= 0.0) return sample;

  // sum over unordered pairs of s_i s_j
  const double pair_sum = (total * total - s.squaredNorm()) / 2.0;
  if (pair_sum <= 0.0) return sample;
  const double n_link = total / 2.0;

  auto rng = substream_engine(spec.seed, RngStream::null_sample,
                              static_cast<std::uint64_t>(sample_index));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double rate = n_link * s(i) * s(j) / pair_sum;
      const std::int64_t weight = poisson_draw(rng, rate);
      if (weight > 0) {
        sample(i, j) = static_cast<double>(weight) / spec.kappa;
        sample(j, i) = sample(i, j);
      }
    }
  }
  return sample;
}

Eigen::MatrixXd sample_sparse_wcm(const WeightedGraph& g,
                                  const NullModelSpec& spec, int sample_index) {
  const Eigen::Index n = g.size();
  const auto w = scaled_weights(g, spec.kappa);
  Eigen::VectorXd s(n);
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  std::int64_t m = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = static_cast<double>(w.row(i).sum());
    for (Eigen::Index j = 0; j < n; ++j)
      if (w(i, j) > 0) degree(i) += 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (w(i, j) > 0) ++m;
  }

  Eigen::MatrixXd sample = Eigen::MatrixXd::Zero(n, n);
  if (m == 0) return sample;

  auto rng = substream_engine(spec.seed, RngStream::null_sample,
                              static_cast<std::uint64_t>(sample_index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Phase 1: adjacency at the data's expected density. Hub pairs can push
  // k_i k_j / 2m above 1, so the probability is clamped.
  struct Link {
    Eigen::Index i, j;
  };
  std::vector<Link> links;
  const double two_m = 2.0 * static_cast<double>(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double p = std::min(1.0, degree(i) * degree(j) / two_m);
      if (p > 0.0 && unit(rng) < p) links.push_back({i, j});
    }
  }
  if (links.empty()) return sample;

  // Phase 2: base weight 1 per link, then a Poisson top-up restricted to the
  // sampled links. The residual budget keeps the expected total weight equal
  // to the data's total.
  double restricted_pair_sum = 0.0;
  for (const auto& link : links) restricted_pair_sum += s(link.i) * s(link.j);
  const double m_star = static_cast<double>(links.size());
  const double base = spec.literal_residual_budget ? 2.0 * m_star : m_star;
  const double n_link = std::max(0.0, s.sum() / 2.0 - base);

  for (const auto& link : links) {
    const double rate = restricted_pair_sum > 0.0
                            ? n_link * s(link.i) * s(link.j) / restricted_pair_sum
                            : 0.0;
    const std::int64_t weight = 1 + poisson_draw(rng, rate);
    sample(link.i, link.j) = static_cast<double>(weight) / spec.kappa;
    sample(link.j, link.i) = sample(link.i, link.j);
  }
  return sample;
}

Eigen::MatrixXd sample_stub_matching(const WeightedGraph& g,
                                     const NullModelSpec& spec,
                                     int sample_index) {
  const Eigen::Index n = g.size();
  const auto w = scaled_weights(g, spec.kappa);

  std::vector<Eigen::Index> stubs;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::int64_t s_i = w.row(i).sum();
    if (s_i > (1LL << 31))
      throw std::overflow_error("stub matching: strength too large");
    for (std::int64_t k = 0; k < s_i; ++k) stubs.push_back(i);
  }

  auto rng = substream_engine(spec.seed, RngStream::null_sample,
                              static_cast<std::uint64_t>(sample_index));
  Eigen::MatrixXd sample = Eigen::MatrixXd::Zero(n, n);

  constexpr int kRetriesPerPair = 1000;
  std::size_t remaining = stubs.size();
  while (remaining >= 2) {
    std::uniform_int_distribution<std::size_t> pick_a(0, remaining - 1);
    std::swap(stubs[pick_a(rng)], stubs[remaining - 1]);
    const Eigen::Index u = stubs[remaining - 1];

    std::uniform_int_distribution<std::size_t> pick_b(0, remaining - 2);
    std::size_t b = pick_b(rng);
    int retries = 0;
    while (stubs[b] == u) {
      if (++retries > kRetriesPerPair)
        throw std::runtime_error(
            "stub matching: self-pairing retry budget exhausted");
      b = pick_b(rng);
    }
    const Eigen::Index v = stubs[b];
    std::swap(stubs[b], stubs[remaining - 2]);
    remaining -= 2;  // leftover odd stub, if any, is dropped at loop exit

    sample(u, v) += 1.0 / spec.kappa;
    sample(v, u) = sample(u, v);
  }
  return sample;
}

Eigen::MatrixXd sample_null(const WeightedGraph& g, const NullModelSpec& spec,
                            int sample_index) {
  spec.validate();
  if (spec.sampler == SamplerKind::stub_matching)
    return sample_stub_matching(g, spec, sample_index);
  return spec.kind == NullModelKind::full_wcm
             ? sample_full_wcm(g, spec, sample_index)
             : sample_sparse_wcm(g, spec, sample_index);
}

NullEnsemble build_ensemble(std::shared_ptr<const WeightedGraph> g,
                            const NullModelSpec& spec) {
  spec.validate();
  Eigen::MatrixXd expectation;
  if (spec.kind == NullModelKind::full_wcm) {
    expectation = wcm_expectation(*g);
  } else {
    // Sample mean, accumulated in index order for reproducibility.
    expectation = Eigen::MatrixXd::Zero(g->size(), g->size());
    for (int i = 0; i < spec.num_samples; ++i)
      expectation += sample_null(*g, spec, i);
    expectation /= static_cast<double>(spec.num_samples);
  }
  return NullEnsemble(std::move(g), spec, std::move(expectation));
}

NullEnsemble build_ensemble(const WeightedGraph& g, const NullModelSpec& spec) {
  return build_ensemble(std::make_shared<WeightedGraph>(g), spec);
}

}  // namespace netsift
