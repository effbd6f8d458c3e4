#pragma once

#include <memory>

#include "exactbn/dataset.hpp"
#include "exactbn/local_scores.hpp"
#include "exactbn/scoring.hpp"

namespace exactbn::detail {

/// Depth-first traversal of ever smaller contingency tables. Each table is
/// scored for all of its members, then every eligible variable is
/// marginalized out in turn and the traversal recurses with only the
/// variables below it eligible. This builds each variable subset's table
/// exactly once.
///
/// Small value spaces are counted in dense arrays, larger ones as sorted
/// packed keys. Both representations enumerate parent configurations in
/// lexicographic order, the same order to_cft() produces.
class TableTraversal {
 public:
  TableTraversal(const Dataset& data, const ScoreSpec& spec, const TraversalOptions& options);
  ~TableTraversal();

  TableTraversal(const TableTraversal&) = delete;
  TableTraversal& operator=(const TableTraversal&) = delete;

  void run(const ShardJob& job, const FamilySink& sink);
  const TraversalStats& stats() const;

  /// Total packed key width in bits for the dataset's variables.
  static unsigned key_bits(const Dataset& data);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace exactbn::detail
