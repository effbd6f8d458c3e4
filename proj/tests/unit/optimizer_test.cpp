#include <gtest/gtest.h>

#include <cmath>

#include "exactbn/optimizer.hpp"
#include "oracle.hpp"

namespace exactbn {
namespace {

LocalScoreStore double_store(const Dataset& d, const ScoreSpec& spec) {
  TraversalOptions o;
  o.precision = Precision::kDouble;
  return compute_all(d, spec, o);
}

TEST(BestParents, MatchesBruteForceOverSubsets) {
  oracle::Rng rng(41);
  const Dataset d = oracle::random_dataset(rng, 6, 80, {2, 3});
  const LocalScoreStore store = double_store(d, {ScoreKind::kBic, 1.0});
  const BestParentStore best = best_parents(store);
  for (int v = 0; v < 6; ++v) {
    for (std::uint32_t c = 0; c < 32; ++c) {
      const VarSet cands = expand(v, c);
      double want = -INFINITY;
      for (std::uint32_t s = 0; s < 32; ++s) {
        if ((s & ~c) == 0) want = std::max(want, store.at(v, s));
      }
      EXPECT_EQ(best.score(v, cands), want);
      EXPECT_TRUE(best.parents(v, cands).subset_of(cands));
      EXPECT_EQ(store.score(v, best.parents(v, cands)), want);
    }
  }
}

TEST(BestParents, TiesKeepTheFullCandidateSet) {
  LocalScoreStore store({}, Precision::kDouble, {2, 2, 2});
  for (int v = 0; v < 3; ++v) {
    for (std::uint32_t i = 0; i < 4; ++i) store.set(v, i, -1.0);
  }
  const BestParentStore best = best_parents(store);
  EXPECT_EQ(best.parents(0, VarSet::of({1, 2})), VarSet::of({1, 2}));
  EXPECT_EQ(best.parents(0, VarSet::of({1})), VarSet::of({1}));
}

TEST(Sinks, TiesGoToTheLowestIndex) {
  const Dataset d({2, 2}, {0, 0, 1, 1, 1, 1, 0, 0, 1, 1});
  const SinkTables sinks = best_sinks(best_parents(compute_all(d, {})));
  EXPECT_EQ(sinks.sinks[3], 0);
  EXPECT_EQ(sinks_to_ord(sinks), (Ordering{1, 0}));
}

TEST(BestParents, CheckCountIsExact) {
  for (int n : {4, 8, 12}) {
    LocalScoreStore store({}, Precision::kSingle, std::vector<Arity>(static_cast<std::size_t>(n), 2));
    for (int v = 0; v < n; ++v) {
      for (std::uint32_t i = 0; i < store.sets_per_var(); ++i) store.set(v, i, -static_cast<double>(i % 7));
    }
    for (int v : {0, n - 1}) {
      std::uint64_t checks = 0;
      best_parents(v, store, &checks);
      EXPECT_EQ(checks, static_cast<std::uint64_t>(n - 1) << (n - 2));
    }
  }
}

TEST(BestParents, IncompleteStoreIsRejected) {
  const LocalScoreStore store({}, Precision::kSingle, {2, 2});
  EXPECT_THROW(best_parents(store), std::invalid_argument);
}

TEST(Sinks, TableSizeAndOrderingRecovery) {
  oracle::Rng rng(43);
  const Dataset d = oracle::random_dataset(rng, 7, 60, {2, 3});
  const BestParentStore best = best_parents(compute_all(d, {}));
  const SinkTables sinks = best_sinks(best);
  EXPECT_EQ(sinks.scores.size(), 128U);
  EXPECT_EQ(sinks.scores.bytes(), 512U);
  EXPECT_EQ(sinks.sinks[0], -1);
  const Ordering ord = sinks_to_ord(sinks);
  EXPECT_NO_THROW(check_ordering(ord, 7));
  for (VarSet::Mask w = 1; w < 128; ++w) EXPECT_TRUE(VarSet(w).contains(sinks.sinks[w]));
}

TEST(Learn, NetworkIsConsistentAndScoresAgree) {
  oracle::Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = oracle::synthetic_dataset(rng, 7, 300, {2, 3}, 2);
    const LocalScoreStore store = double_store(d, {});
    const LearnResult r = learn(store);
    EXPECT_TRUE(r.network.acyclic());
    EXPECT_TRUE(r.network.consistent_with(r.ordering));
    EXPECT_EQ(r.total_score, ordering_score(r.ordering, best_parents(store)));
    EXPECT_NEAR(network_score(r.network, store), r.total_score, 1e-9 * std::abs(r.total_score));
  }
}

TEST(Learn, SinglePrecisionStaysClose) {
  oracle::Rng rng(45);
  const Dataset d = oracle::synthetic_dataset(rng, 8, 500, {2, 3}, 2);
  const double single = learn(d, {}).total_score;
  LearnOptions o;
  o.traversal.precision = Precision::kDouble;
  const double wide = learn(d, {}, o).total_score;
  EXPECT_NEAR(single, wide, 1e-5 * std::abs(wide));
}

TEST(Learn, ThreadedLearnIsIdentical) {
  oracle::Rng rng(46);
  const Dataset d = oracle::synthetic_dataset(rng, 9, 400, {2, 3}, 3);
  LearnOptions one;
  LearnOptions many;
  many.traversal.threads = 3;
  const LearnResult a = learn(d, {}, one);
  const LearnResult b = learn(d, {}, many);
  EXPECT_EQ(a.network, b.network);
  EXPECT_EQ(a.ordering, b.ordering);
  EXPECT_EQ(a.total_score, b.total_score);
}

TEST(Learn, SingleVariable) {
  const Dataset d({3}, {0, 1, 2, 2});
  const LearnResult r = learn(d, {});
  EXPECT_EQ(r.ordering, Ordering{0});
  EXPECT_EQ(r.network.arc_count(), 0U);
}

TEST(Network, OrderingChecksAndRelabel) {
  EXPECT_THROW(check_ordering(std::vector<int>{0, 0, 1}, 3), std::invalid_argument);
  EXPECT_THROW(check_ordering(std::vector<int>{0, 1}, 3), std::invalid_argument);
  EXPECT_THROW(Network({VarSet::of({0})}), std::invalid_argument);
  Network net = Network::empty(3);
  net.set_parents(2, VarSet::of({0, 1}));
  net.set_parents(1, VarSet::of({0}));
  EXPECT_EQ(net.arc_count(), 3U);
  EXPECT_EQ(net.max_in_degree(), 2);
  EXPECT_TRUE(net.consistent_with(std::vector<int>{0, 1, 2}));
  EXPECT_FALSE(net.consistent_with(std::vector<int>{1, 0, 2}));
  net.set_parents(0, VarSet::of({2}));
  EXPECT_FALSE(net.acyclic());
}

}  // namespace
}  // namespace exactbn
