#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "exactbn/varset.hpp"

namespace exactbn {

/// A permutation of {0..n-1}.
using Ordering = std::vector<int>;

/// Throws std::invalid_argument unless `ord` is a permutation of {0..n-1}.
void check_ordering(std::span<const int> ord, int n);

/// Structure of a Bayesian network as one parent set per variable.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<VarSet> parents);

  /// Network on n variables with no arcs.
  static Network empty(int n) { return Network(std::vector<VarSet>(static_cast<std::size_t>(n))); }

  int num_vars() const { return static_cast<int>(parents_.size()); }
  VarSet parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
  void set_parents(int v, VarSet parents);
  const std::vector<VarSet>& all_parents() const { return parents_; }

  std::size_t arc_count() const;
  int max_in_degree() const;

  /// Children listed after all of their parents, or nullopt on a cycle.
  std::optional<Ordering> topological_order() const;
  bool acyclic() const { return topological_order().has_value(); }

  /// Every variable's parents precede it in `ord`.
  bool consistent_with(std::span<const int> ord) const;

  /// Same structure with variable i renamed to perm[i].
  Network relabel(std::span<const int> perm) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<VarSet> parents_;
};

}  // namespace exactbn
