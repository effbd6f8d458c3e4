#pragma once

#include <cstdint>
#include <vector>

#include "exactbn/dataset.hpp"
#include "exactbn/local_scores.hpp"
#include "exactbn/network.hpp"
#include "exactbn/score_buffer.hpp"

namespace exactbn {

/// Best parent set of one variable within every candidate set, indexed by
/// the collapsed candidate set.
struct BestParentSlice {
  ScoreBuffer scores;
  std::vector<std::uint32_t> sets;  // collapsed index of the chosen parents
};

/// Best parents for every (variable, candidate set) pair.
class BestParentStore {
 public:
  explicit BestParentStore(std::vector<BestParentSlice> slices);

  int num_vars() const { return static_cast<int>(slices_.size()); }
  Precision precision() const { return slices_.front().scores.precision(); }

  VarSet parents(int v, VarSet candidates) const {
    return expand(v, slice(v).sets[collapse(v, candidates)]);
  }
  double score(int v, VarSet candidates) const { return slice(v).scores[collapse(v, candidates)]; }

  const BestParentSlice& slice(int v) const { return slices_[static_cast<std::size_t>(v)]; }

 private:
  std::vector<BestParentSlice> slices_;
};

/// Step 2 for one variable. Candidate sets are visited in ascending order;
/// each starts with itself as the best parent set and is replaced by the
/// best of a one-smaller subset only on a strictly greater score.
/// `checks`, when given, is incremented once per (set, one-smaller subset)
/// comparison.
BestParentSlice best_parents(int v, const LocalScoreStore& store, std::uint64_t* checks = nullptr);

/// Step 2 for all variables, in parallel across variables.
BestParentStore best_parents(const LocalScoreStore& store, unsigned threads = 1);

/// Best network score for every variable subset and the sink that attains
/// it; sinks[0] is -1.
struct SinkTables {
  int num_vars = 0;
  ScoreBuffer scores;
  std::vector<std::int8_t> sinks;
};

/// Step 3. Subsets are processed in ascending mask order; among equally
/// good sinks the lowest-indexed one wins.
SinkTables best_sinks(const BestParentStore& best);

/// Step 4: the optimal ordering, peeled off from the last position.
Ordering sinks_to_ord(const SinkTables& sinks);

/// Step 5: best network consistent with `ord`; each variable takes its best
/// parents among its predecessors.
Network ord_to_net(std::span<const int> ord, const BestParentStore& best);

/// Sum of the best-parent scores along `ord`, added in ordering order.
double ordering_score(std::span<const int> ord, const BestParentStore& best);

/// Sum of local scores of a given network.
double network_score(const Network& net, const LocalScoreStore& store);

struct LearnOptions {
  TraversalOptions traversal;
};

struct LearnResult {
  Network network;
  Ordering ordering;
  double total_score = 0.0;
};

/// Steps 2-5 from an existing score store.
LearnResult learn(const LocalScoreStore& store, unsigned threads = 1);

/// The full pipeline.
LearnResult learn(const Dataset& data, const ScoreSpec& spec, const LearnOptions& options = {});

}  // namespace exactbn
