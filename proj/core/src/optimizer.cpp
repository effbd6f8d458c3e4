#include "exactbn/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace exactbn {

BestParentStore::BestParentStore(std::vector<BestParentSlice> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) throw std::invalid_argument("best parent store needs at least one variable");
}

BestParentSlice best_parents(int v, const LocalScoreStore& store, std::uint64_t* checks) {
  const std::size_t sets = store.sets_per_var();
  BestParentSlice slice{ScoreBuffer(store.precision(), sets, 0.0), std::vector<std::uint32_t>(sets)};
  std::uint64_t local_checks = 0;
  for (std::uint32_t cs = 0; cs < sets; ++cs) {
    double best = store.at(v, cs);
    if (std::isnan(best)) throw std::invalid_argument("best_parents: local score store is incomplete");
    std::uint32_t best_set = cs;
    for (std::uint32_t rest = cs; rest != 0; rest &= rest - 1) {
      const std::uint32_t smaller = cs & ~(rest & (~rest + 1));
      ++local_checks;
      const double candidate = slice.scores[smaller];
      if (candidate > best) {
        best = candidate;
        best_set = slice.sets[smaller];
      }
    }
    slice.scores.set(cs, best);
    slice.sets[cs] = best_set;
  }
  if (checks) *checks += local_checks;
  return slice;
}

BestParentStore best_parents(const LocalScoreStore& store, unsigned threads) {
  const int n = store.num_vars();
  std::vector<BestParentSlice> slices(static_cast<std::size_t>(n));
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (threads <= 1) {
    for (int v = 0; v < n; ++v) slices[static_cast<std::size_t>(v)] = best_parents(v, store);
    return BestParentStore(std::move(slices));
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic_flag failed;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int v = next++; v < n; v = next++) {
          try {
            slices[static_cast<std::size_t>(v)] = best_parents(v, store);
          } catch (...) {
            if (!failed.test_and_set()) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return BestParentStore(std::move(slices));
}

SinkTables best_sinks(const BestParentStore& best) {
  const int n = best.num_vars();
  const std::uint64_t subsets = std::uint64_t{1} << n;
  SinkTables t;
  t.num_vars = n;
  t.scores = ScoreBuffer(best.precision(), subsets, 0.0);
  t.sinks.assign(subsets, -1);
  for (std::uint64_t w = 1; w < subsets; ++w) {
    const auto mask = static_cast<VarSet::Mask>(w);
    double best_score = 0.0;
    int sink = -1;
    for (int s : VarSet(mask)) {
      const VarSet::Mask up = mask & ~(VarSet::Mask{1} << s);
      const double score = t.scores[up] + best.slice(s).scores[detail::collapse_unchecked(s, up)];
      if (sink == -1 || score > best_score) {
        best_score = score;
        sink = s;
      }
    }
    t.scores.set(w, best_score);
    t.sinks[w] = static_cast<std::int8_t>(sink);
  }
  return t;
}

Ordering sinks_to_ord(const SinkTables& sinks) {
  const int n = sinks.num_vars;
  Ordering ord(static_cast<std::size_t>(n));
  VarSet left = VarSet::full(n);
  for (int i = n - 1; i >= 0; --i) {
    const int s = sinks.sinks[left.mask()];
    ord[static_cast<std::size_t>(i)] = s;
    left = left.without(s);
  }
  return ord;
}

Network ord_to_net(std::span<const int> ord, const BestParentStore& best) {
  check_ordering(ord, best.num_vars());
  Network net = Network::empty(best.num_vars());
  VarSet predecessors;
  for (int v : ord) {
    net.set_parents(v, best.parents(v, predecessors));
    predecessors = predecessors.with(v);
  }
  return net;
}

double ordering_score(std::span<const int> ord, const BestParentStore& best) {
  check_ordering(ord, best.num_vars());
  double total = 0.0;
  VarSet predecessors;
  for (int v : ord) {
    total += best.score(v, predecessors);
    predecessors = predecessors.with(v);
  }
  return total;
}

double network_score(const Network& net, const LocalScoreStore& store) {
  if (net.num_vars() != store.num_vars()) throw std::invalid_argument("network and store sizes differ");
  double total = 0.0;
  for (int v = 0; v < net.num_vars(); ++v) total += store.score(v, net.parents(v));
  return total;
}

LearnResult learn(const LocalScoreStore& store, unsigned threads) {
  const BestParentStore best = best_parents(store, threads);
  const SinkTables sinks = best_sinks(best);
  LearnResult result;
  result.ordering = sinks_to_ord(sinks);
  result.network = ord_to_net(result.ordering, best);
  result.total_score = sinks.scores[VarSet::full(store.num_vars()).mask()];
  return result;
}

LearnResult learn(const Dataset& data, const ScoreSpec& spec, const LearnOptions& options) {
  const LocalScoreStore store = compute_all(data, spec, options.traversal);
  return learn(store, options.traversal.threads);
}

}  // namespace exactbn
