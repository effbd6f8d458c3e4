#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "exactbn/dataset.hpp"
#include "exactbn/network.hpp"
#include "exactbn/optimizer.hpp"

namespace exactbn {

/// Score of the best network consistent with `ord`.
double score_for_ordering(std::span<const int> ord, const BestParentStore& best);

/// A reordering of a base ordering: a cyclic shift (positive = right) or a
/// swap of two positions.
struct OrderingTransform {
  enum class Kind { kRotation, kSwap };
  Kind kind = Kind::kRotation;
  int first = 0;   // shift for rotations, first position for swaps
  int second = 0;  // second position for swaps

  Ordering apply(std::span<const int> base) const;
};

struct OrderingScan {
  Ordering base;
  double base_score = 0.0;
  struct Entry {
    OrderingTransform transform;
    double score;
  };
  std::vector<Entry> entries;
};

/// Cyclic shifts by k for |k| <= min(max_shift, n/2), in ascending k.
OrderingScan rotations(std::span<const int> ord, const BestParentStore& best, int max_shift);

/// Every position pair i < j, row-major: n(n-1)/2 entries.
OrderingScan swaps(std::span<const int> ord, const BestParentStore& best);

struct SweepPoint {
  double ess;
  std::size_t arcs;
  double score;
};

/// `count` values spaced evenly in log scale from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default sweep: 2e-20 to 34000.
std::vector<double> default_ess_grid();

/// Learns a BDe-optimal network for every equivalent sample size.
std::vector<SweepPoint> ess_sweep(const Dataset& data, std::span<const double> grid,
                                  const LearnOptions& options = {});

/// Network with expected conditional probabilities under a BDeu prior.
/// theta[v] is laid out as [parent configuration][child value]; parent
/// configurations are mixed-radix over the parents in ascending index order
/// with the lowest-indexed parent most significant.
struct ParamNetwork {
  Network network;
  std::vector<Arity> arities;
  std::vector<std::vector<double>> theta;

  std::size_t config_count(int v) const;
  std::size_t config_index(int v, std::span<const Value> row) const;
  double prob(int v, std::size_t config, Value value) const {
    return theta[static_cast<std::size_t>(v)][config * arities[static_cast<std::size_t>(v)] + value];
  }
};

/// theta[v][j][k] = (N_jk + ess/(q r)) / (N_j + ess/q).
ParamNetwork fit_expected(const Network& net, const Dataset& data, double ess);

/// Counter-based SplitMix64: draw i of a stream is a pure function of
/// (seed, i), so any row can be generated independently.
class CounterRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

/// Ancestral sampling: variables drawn in topological order, draw
/// row * n + v of the stream used for variable v of row `row`.
Dataset sample(const ParamNetwork& pnet, std::size_t count, std::uint64_t seed);

struct Prediction {
  std::vector<double> log_prob;  // one per test row
  double mean_log_prob = 0.0;
  double mean_prob = 0.0;
};

/// Predictive log probability of each test row with the parameters
/// integrated out under the BDeu prior, counts taken from `train`. Rows are
/// predicted independently of each other.
Prediction predict_logp(const Network& net, const Dataset& train, const Dataset& test, double ess);

}  // namespace exactbn
