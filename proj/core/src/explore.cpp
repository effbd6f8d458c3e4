#include "exactbn/explore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exactbn/errors.hpp"

namespace exactbn {

double score_for_ordering(std::span<const int> ord, const BestParentStore& best) {
  return ordering_score(ord, best);
}

Ordering OrderingTransform::apply(std::span<const int> base) const {
  const int n = static_cast<int>(base.size());
  Ordering out(base.begin(), base.end());
  if (kind == Kind::kRotation) {
    for (int i = 0; i < n; ++i) {
      const int from = ((i - first) % n + n) % n;
      out[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(from)];
    }
  } else {
    if (first < 0 || second < 0 || first >= n || second >= n) throw std::invalid_argument("swap position out of range");
    std::swap(out[static_cast<std::size_t>(first)], out[static_cast<std::size_t>(second)]);
  }
  return out;
}

OrderingScan rotations(std::span<const int> ord, const BestParentStore& best, int max_shift) {
  OrderingScan scan;
  scan.base.assign(ord.begin(), ord.end());
  scan.base_score = score_for_ordering(ord, best);
  const int n = static_cast<int>(ord.size());
  const int limit = std::clamp(max_shift, 0, n / 2);
  for (int k = -limit; k <= limit; ++k) {
    OrderingTransform t{OrderingTransform::Kind::kRotation, k, 0};
    scan.entries.push_back({t, score_for_ordering(t.apply(ord), best)});
  }
  return scan;
}

OrderingScan swaps(std::span<const int> ord, const BestParentStore& best) {
  OrderingScan scan;
  scan.base.assign(ord.begin(), ord.end());
  scan.base_score = score_for_ordering(ord, best);
  const int n = static_cast<int>(ord.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      OrderingTransform t{OrderingTransform::Kind::kSwap, i, j};
      scan.entries.push_back({t, score_for_ordering(t.apply(ord), best)});
    }
  }
  return scan;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw std::invalid_argument("log grid needs 0 < lo <= hi and count > 0");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_ess_grid() { return log_grid(2e-20, 34000.0, 25); }

std::vector<SweepPoint> ess_sweep(const Dataset& data, std::span<const double> grid, const LearnOptions& options) {
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (double ess : grid) {
    if (!(ess > 0.0) || !std::isfinite(ess)) throw std::invalid_argument("ESS grid values must be positive");
    const LearnResult r = learn(data, ScoreSpec{ScoreKind::kBde, ess}, options);
    points.push_back({ess, r.network.arc_count(), r.total_score});
  }
  return points;
}

// Parameters

std::size_t ParamNetwork::config_count(int v) const {
  std::size_t q = 1;
  for (int p : network.parents(v)) q *= arities[static_cast<std::size_t>(p)];
  return q;
}

std::size_t ParamNetwork::config_index(int v, std::span<const Value> row) const {
  std::size_t j = 0;
  for (int p : network.parents(v)) j = j * arities[static_cast<std::size_t>(p)] + row[static_cast<std::size_t>(p)];
  return j;
}

ParamNetwork fit_expected(const Network& net, const Dataset& data, double ess) {
  if (!(ess > 0.0) || !std::isfinite(ess)) throw std::invalid_argument("fit_expected: ess must be positive");
  if (net.num_vars() != data.num_vars()) throw DataError("network and data have different variable counts");
  if (!net.acyclic()) throw std::invalid_argument("fit_expected: network has a cycle");

  ParamNetwork pnet{net, data.arities(), {}};
  const int n = net.num_vars();
  pnet.theta.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const std::size_t q = pnet.config_count(v);
    const std::size_t r = data.arity(v);
    std::vector<double> counts(q * r, 0.0);
    for (std::size_t row = 0; row < data.num_rows(); ++row) {
      const auto values = data.row(row);
      counts[pnet.config_index(v, values) * r + values[static_cast<std::size_t>(v)]] += 1.0;
    }
    const double cell_prior = ess / (static_cast<double>(q) * static_cast<double>(r));
    const double config_prior = ess / static_cast<double>(q);
    auto& theta = pnet.theta[static_cast<std::size_t>(v)];
    theta.resize(q * r);
    for (std::size_t j = 0; j < q; ++j) {
      double n_j = 0.0;
      for (std::size_t k = 0; k < r; ++k) n_j += counts[j * r + k];
      for (std::size_t k = 0; k < r; ++k) theta[j * r + k] = (counts[j * r + k] + cell_prior) / (n_j + config_prior);
    }
  }
  return pnet;
}

// Sampling

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

Dataset sample(const ParamNetwork& pnet, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample: count must be positive");
  const auto order = pnet.network.topological_order();
  if (!order) throw std::invalid_argument("sample: network has a cycle");
  const int n = pnet.network.num_vars();
  const CounterRng rng(seed);
  std::vector<Value> cells(count * static_cast<std::size_t>(n));
  for (std::size_t row = 0; row < count; ++row) {
    std::span<Value> values(cells.data() + row * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int v : *order) {
      const std::size_t r = pnet.arities[static_cast<std::size_t>(v)];
      const std::size_t j = pnet.config_index(v, values);
      const double u = rng.uniform(row * static_cast<std::size_t>(n) + static_cast<std::size_t>(v));
      double cumulative = 0.0;
      std::size_t k = 0;
      for (; k + 1 < r; ++k) {
        cumulative += pnet.prob(v, j, static_cast<Value>(k));
        if (u < cumulative) break;
      }
      values[static_cast<std::size_t>(v)] = static_cast<Value>(k);
    }
  }
  return Dataset(pnet.arities, std::move(cells));
}

Prediction predict_logp(const Network& net, const Dataset& train, const Dataset& test, double ess) {
  if (train.arities() != test.arities()) throw DataError("training and test data have different arities");
  const ParamNetwork pnet = fit_expected(net, train, ess);
  Prediction out;
  out.log_prob.reserve(test.num_rows());
  double sum_log = 0.0;
  double sum_prob = 0.0;
  for (std::size_t row = 0; row < test.num_rows(); ++row) {
    const auto values = test.row(row);
    double lp = 0.0;
    for (int v = 0; v < net.num_vars(); ++v) {
      lp += std::log(pnet.prob(v, pnet.config_index(v, values), values[static_cast<std::size_t>(v)]));
    }
    out.log_prob.push_back(lp);
    sum_log += lp;
    sum_prob += std::exp(lp);
  }
  out.mean_log_prob = sum_log / static_cast<double>(test.num_rows());
  out.mean_prob = sum_prob / static_cast<double>(test.num_rows());
  return out;
}

}  // namespace exactbn
