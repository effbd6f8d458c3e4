#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "exactbn/dataset.hpp"
#include "exactbn/score_buffer.hpp"
#include "exactbn/scoring.hpp"
#include "exactbn/varset.hpp"

namespace exactbn {

/// Local scores for every (variable, parent set) pair. Scores of variable v
/// occupy 2^(n-1) slots addressed by collapse(v, parents).
class LocalScoreStore {
 public:
  LocalScoreStore(ScoreSpec spec, Precision precision, std::vector<Arity> arities);

  int num_vars() const { return static_cast<int>(arities_.size()); }
  const ScoreSpec& spec() const { return spec_; }
  Precision precision() const { return scores_.precision(); }
  const std::vector<Arity>& arities() const { return arities_; }

  std::size_t sets_per_var() const { return std::size_t{1} << (arities_.size() - 1); }
  std::size_t entry_count() const { return scores_.size(); }

  double at(int v, std::uint32_t index) const { return scores_[offset(v) + index]; }
  double score(int v, VarSet parents) const { return at(v, collapse(v, parents)); }
  void set(int v, std::uint32_t index, double value) { scores_.set(offset(v) + index, value); }

  /// True once every slot has been written (unwritten slots hold NaN).
  bool complete() const;

  const ScoreBuffer& buffer() const { return scores_; }
  ScoreBuffer& buffer() { return scores_; }

  /// Same header fields (spec, precision, arities).
  bool same_header(const LocalScoreStore& other) const;
  bool operator==(const LocalScoreStore& other) const { return same_header(other) && scores_ == other.scores_; }

 private:
  std::size_t offset(int v) const { return static_cast<std::size_t>(v) * sets_per_var(); }

  ScoreSpec spec_;
  std::vector<Arity> arities_;
  ScoreBuffer scores_;
};

/// One independent piece of the contingency-table traversal: the data is
/// projected onto `root`, and the traversal below it may only marginalize
/// variables in `eligible`.
struct ShardJob {
  VarSet root;
  VarSet eligible;
  bool operator==(const ShardJob&) const = default;
};

struct ShardPlan {
  int num_vars = 0;
  int depth = 0;
  std::vector<ShardJob> jobs;
};

/// Cuts the traversal tree at `depth`: tables shallower than the cut become
/// single-table jobs, tables at the cut become subtree jobs. Every
/// (variable, parent set) pair is produced by exactly one job.
ShardPlan plan_shards_by_depth(int n, int depth);

/// Shallowest cut that yields at least `min_jobs` jobs (or the deepest cut).
ShardPlan plan_shards(int n, std::size_t min_jobs);

/// Number of jobs a cut at `depth` produces, without materializing them.
std::uint64_t shard_job_count(int n, int depth);

struct TraversalOptions {
  Precision precision = Precision::kSingle;
  /// Worker threads for compute_all; 0 means hardware concurrency.
  unsigned threads = 1;
  /// Tables whose full value space has at most this many cells are counted
  /// densely; 0 picks max(4096, 2N).
  std::uint64_t dense_cell_limit = 0;
};

struct TraversalStats {
  std::uint64_t tables_built = 0;
  std::uint64_t dense_tables = 0;
  std::uint64_t families_scored = 0;
  /// Largest number of contingency tables alive at once in one job.
  std::uint64_t peak_live_tables = 0;
};

/// Receives (variable, collapsed parent index, score) for each family.
using FamilySink = std::function<void(int v, std::uint32_t index, double score)>;

/// Runs one job of the traversal, reporting every family it scores.
TraversalStats run_job(const Dataset& data, const ScoreSpec& spec, const ShardJob& job, const FamilySink& sink,
                       const TraversalOptions& options = {});

/// Step 1: all n 2^(n-1) local scores.
LocalScoreStore compute_all(const Dataset& data, const ScoreSpec& spec, const TraversalOptions& options = {},
                            TraversalStats* stats = nullptr);

/// Scores produced by shard `index` of `count`.
struct ShardResult {
  ScoreSpec spec;
  Precision precision = Precision::kSingle;
  std::vector<Arity> arities;
  std::uint32_t index = 0;
  std::uint32_t count = 1;
  std::uint32_t depth = 0;
  struct Record {
    std::uint32_t var;
    std::uint32_t set;
    double score;  // already rounded to `precision`
  };
  std::vector<Record> records;
};

/// Jobs of plan_shards(n, 4 * count) are dealt round-robin to shards.
ShardResult compute_shard(const Dataset& data, const ScoreSpec& spec, std::uint32_t index, std::uint32_t count,
                          const TraversalOptions& options = {});

/// Combines one result per shard index into a full store. Throws CacheError
/// on differing headers, a missing or repeated shard, or uncovered slots.
LocalScoreStore merge_shards(const std::vector<ShardResult>& shards);

// Binary cache files (little-endian). Full stores use magic "BNLS"; shard
// outputs use "BNLP" with (var u32, set u32, score) records.
void save_store(const std::filesystem::path& path, const LocalScoreStore& store);
LocalScoreStore load_store(const std::filesystem::path& path);
void save_shard(const std::filesystem::path& path, const ShardResult& shard);
ShardResult load_shard(const std::filesystem::path& path);

}  // namespace exactbn
