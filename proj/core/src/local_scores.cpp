#include "exactbn/local_scores.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "ct_engine.hpp"
#include "exactbn/errors.hpp"

namespace exactbn {

LocalScoreStore::LocalScoreStore(ScoreSpec spec, Precision precision, std::vector<Arity> arities)
    : spec_(spec), arities_(std::move(arities)) {
  spec_.validate();
  if (arities_.empty() || arities_.size() > static_cast<std::size_t>(kMaxVars)) {
    throw LimitError("score store needs between 1 and 32 variables");
  }
  scores_ = ScoreBuffer(precision, arities_.size() * sets_per_var(), std::numeric_limits<double>::quiet_NaN());
}

bool LocalScoreStore::complete() const {
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (std::isnan(scores_[i])) return false;
  }
  return true;
}

bool LocalScoreStore::same_header(const LocalScoreStore& other) const {
  return spec_ == other.spec_ && precision() == other.precision() && arities_ == other.arities_;
}

// Shard planning

namespace {

void plan_node(VarSet vars, VarSet eligible, int level, int depth, std::vector<ShardJob>& jobs) {
  if (level == depth) {
    jobs.push_back({vars, eligible});
    return;
  }
  jobs.push_back({vars, VarSet{}});
  if (vars.size() <= 1) return;
  for (int v : eligible) plan_node(vars.without(v), VarSet::below(v), level + 1, depth, jobs);
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace

std::uint64_t shard_job_count(int n, int depth) {
  depth = std::clamp(depth, 0, n - 1);
  std::uint64_t total = 0;
  for (int m = 0; m <= depth; ++m) total += binomial(n, m);
  return total;
}

ShardPlan plan_shards_by_depth(int n, int depth) {
  if (n < 1 || n > kMaxVars) throw std::invalid_argument("plan_shards: n out of range");
  if (depth < 0) throw std::invalid_argument("plan_shards: negative depth");
  ShardPlan plan;
  plan.num_vars = n;
  plan.depth = std::min(depth, n - 1);
  plan.jobs.reserve(shard_job_count(n, plan.depth));
  plan_node(VarSet::full(n), VarSet::full(n), 0, plan.depth, plan.jobs);
  return plan;
}

ShardPlan plan_shards(int n, std::size_t min_jobs) {
  if (min_jobs < 1) throw std::invalid_argument("plan_shards: need at least one job");
  int depth = 0;
  while (depth < n - 1 && shard_job_count(n, depth) < min_jobs) ++depth;
  return plan_shards_by_depth(n, depth);
}

// Traversal drivers

TraversalStats run_job(const Dataset& data, const ScoreSpec& spec, const ShardJob& job, const FamilySink& sink,
                       const TraversalOptions& options) {
  detail::TableTraversal traversal(data, spec, options);
  traversal.run(job, sink);
  return traversal.stats();
}

namespace {

void accumulate(TraversalStats& into, const TraversalStats& s) {
  into.tables_built += s.tables_built;
  into.dense_tables += s.dense_tables;
  into.families_scored += s.families_scored;
  into.peak_live_tables = std::max(into.peak_live_tables, s.peak_live_tables);
}

}  // namespace

LocalScoreStore compute_all(const Dataset& data, const ScoreSpec& spec, const TraversalOptions& options,
                            TraversalStats* stats) {
  LocalScoreStore store(spec, options.precision, data.arities());
  const int n = data.num_vars();
  unsigned threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;

  FamilySink sink = [&store](int v, std::uint32_t index, double score) { store.set(v, index, score); };

  if (threads <= 1 || n < 3) {
    detail::TableTraversal traversal(data, spec, options);
    traversal.run({VarSet::full(n), VarSet::full(n)}, sink);
    if (stats) *stats = traversal.stats();
    return store;
  }

  const ShardPlan plan = plan_shards(n, std::size_t{16} * threads);
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, plan.jobs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  TraversalStats total;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      detail::TableTraversal traversal(data, spec, options);
      for (std::size_t j = next++; j < plan.jobs.size(); j = next++) traversal.run(plan.jobs[j], sink);
      std::lock_guard lock(mutex);
      accumulate(total, traversal.stats());
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
      next = plan.jobs.size();
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  if (stats) *stats = total;
  return store;
}

// Shards

ShardResult compute_shard(const Dataset& data, const ScoreSpec& spec, std::uint32_t index, std::uint32_t count,
                          const TraversalOptions& options) {
  if (count == 0 || index >= count) throw std::invalid_argument("shard index must be below shard count");
  const ShardPlan plan = plan_shards(data.num_vars(), std::size_t{4} * count);

  ShardResult result;
  result.spec = spec;
  result.precision = options.precision;
  result.arities = data.arities();
  result.index = index;
  result.count = count;
  result.depth = static_cast<std::uint32_t>(plan.depth);

  const bool single = options.precision == Precision::kSingle;
  FamilySink sink = [&](int v, std::uint32_t set, double score) {
    if (single) score = static_cast<double>(static_cast<float>(score));
    result.records.push_back({static_cast<std::uint32_t>(v), set, score});
  };
  detail::TableTraversal traversal(data, spec, options);
  for (std::size_t j = index; j < plan.jobs.size(); j += count) traversal.run(plan.jobs[j], sink);
  return result;
}

LocalScoreStore merge_shards(const std::vector<ShardResult>& shards) {
  if (shards.empty()) throw CacheError("no shard files to merge");
  const ShardResult& first = shards.front();
  std::vector<bool> seen(first.count, false);
  for (const ShardResult& s : shards) {
    if (!(s.spec == first.spec) || s.precision != first.precision || s.arities != first.arities ||
        s.count != first.count || s.depth != first.depth) {
      throw CacheError("shard headers disagree (score spec, precision, arities or shard layout)");
    }
    if (s.index >= s.count) throw CacheError("shard index out of range");
    if (seen[s.index]) throw CacheError("shard " + std::to_string(s.index) + " given twice");
    seen[s.index] = true;
  }
  for (std::uint32_t i = 0; i < first.count; ++i) {
    if (!seen[i]) {
      throw CacheError("incomplete shard set: shard " + std::to_string(i) + " of " + std::to_string(first.count) +
                       " is missing");
    }
  }

  LocalScoreStore store(first.spec, first.precision, first.arities);
  const auto n = static_cast<std::uint32_t>(store.num_vars());
  const std::size_t per_var = store.sets_per_var();
  std::vector<bool> written(store.entry_count(), false);
  for (const ShardResult& s : shards) {
    for (const auto& rec : s.records) {
      if (rec.var >= n || rec.set >= per_var) throw CacheError("shard record out of range");
      const std::size_t slot = rec.var * per_var + rec.set;
      if (written[slot]) throw CacheError("shard records overlap");
      written[slot] = true;
      store.set(static_cast<int>(rec.var), rec.set, rec.score);
    }
  }
  if (std::find(written.begin(), written.end(), false) != written.end()) {
    throw CacheError("merged shards do not cover every (variable, parent set) pair");
  }
  return store;
}

}  // namespace exactbn
