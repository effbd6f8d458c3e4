#include "exactbn/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactbn {

void check_ordering(std::span<const int> ord, int n) {
  if (static_cast<int>(ord.size()) != n) throw std::invalid_argument("ordering has the wrong length");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : ord) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("ordering is not a permutation");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Network::Network(std::vector<VarSet> parents) : parents_(std::move(parents)) {
  const int n = num_vars();
  if (n > kMaxVars) throw std::invalid_argument("network has more than 32 variables");
  for (int v = 0; v < n; ++v) set_parents(v, parents_[static_cast<std::size_t>(v)]);
}

void Network::set_parents(int v, VarSet parents) {
  if (parents.contains(v)) throw std::invalid_argument("a variable cannot be its own parent");
  if (!parents.subset_of(VarSet::full(num_vars()))) throw std::invalid_argument("parent index out of range");
  parents_.at(static_cast<std::size_t>(v)) = parents;
}

std::size_t Network::arc_count() const {
  std::size_t arcs = 0;
  for (VarSet p : parents_) arcs += static_cast<std::size_t>(p.size());
  return arcs;
}

int Network::max_in_degree() const {
  int d = 0;
  for (VarSet p : parents_) d = std::max(d, p.size());
  return d;
}

std::optional<Ordering> Network::topological_order() const {
  const int n = num_vars();
  Ordering order;
  order.reserve(parents_.size());
  VarSet placed;
  while (static_cast<int>(order.size()) < n) {
    bool progress = false;
    for (int v = 0; v < n; ++v) {
      if (!placed.contains(v) && parents(v).subset_of(placed)) {
        order.push_back(v);
        placed = placed.with(v);
        progress = true;
      }
    }
    if (!progress) return std::nullopt;
  }
  return order;
}

bool Network::consistent_with(std::span<const int> ord) const {
  check_ordering(ord, num_vars());
  VarSet before;
  for (int v : ord) {
    if (!parents(v).subset_of(before)) return false;
    before = before.with(v);
  }
  return true;
}

Network Network::relabel(std::span<const int> perm) const {
  check_ordering(perm, num_vars());
  std::vector<VarSet> out(parents_.size());
  for (int v = 0; v < num_vars(); ++v) {
    VarSet mapped;
    for (int p : parents(v)) mapped = mapped.with(perm[static_cast<std::size_t>(p)]);
    out[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = mapped;
  }
  return Network(std::move(out));
}

}  // namespace exactbn
