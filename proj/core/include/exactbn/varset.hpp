#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace exactbn {

inline constexpr int kMaxVars = 32;

/// A subset of {0..n-1} encoded as a bitmask. Integer order on the mask is
/// the lexicographic subset order used by the dynamic programs: every subset
/// compares below each of its supersets.
class VarSet {
 public:
  using Mask = std::uint32_t;

  constexpr VarSet() = default;
  constexpr explicit VarSet(Mask mask) : mask_(mask) {}

  static constexpr VarSet full(int n) {
    return VarSet(n >= 32 ? ~Mask{0} : ((Mask{1} << n) - 1));
  }
  static constexpr VarSet single(int v) { return VarSet(Mask{1} << v); }
  static VarSet of(std::initializer_list<int> vars) {
    VarSet s;
    for (int v : vars) s = s.with(v);
    return s;
  }

  constexpr Mask mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(int v) const { return (mask_ >> v) & 1U; }
  constexpr VarSet with(int v) const { return VarSet(mask_ | (Mask{1} << v)); }
  constexpr VarSet without(int v) const { return VarSet(mask_ & ~(Mask{1} << v)); }
  constexpr bool subset_of(VarSet other) const { return (mask_ & ~other.mask_) == 0; }

  /// Variables with index strictly below v.
  static constexpr VarSet below(int v) { return VarSet((Mask{1} << v) - 1); }

  constexpr VarSet operator|(VarSet o) const { return VarSet(mask_ | o.mask_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(mask_ & o.mask_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(mask_ & ~o.mask_); }

  constexpr bool operator==(const VarSet&) const = default;
  constexpr auto operator<=>(const VarSet&) const = default;

  /// Iterates member indices in ascending order.
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = int;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = int;

    constexpr iterator() = default;
    constexpr explicit iterator(Mask rest) : rest_(rest) {}
    constexpr int operator*() const { return std::countr_zero(rest_); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    Mask rest_ = 0;
  };

  constexpr iterator begin() const { return iterator(mask_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<int> members() const { return {begin(), end()}; }

 private:
  Mask mask_ = 0;
};

/// Index of S among the subsets of V \ {v}: v's bit position is deleted and
/// the higher bits move down by one.
inline std::uint32_t collapse(int v, VarSet s) {
  if (s.contains(v)) throw std::invalid_argument("collapse: variable is a member of the set");
  const VarSet::Mask low = VarSet::below(v).mask();
  return (s.mask() & low) | ((s.mask() >> 1) & ~low);
}

/// Inverse of collapse().
inline VarSet expand(int v, std::uint32_t index) {
  const VarSet::Mask low = VarSet::below(v).mask();
  return VarSet((index & low) | ((index & ~low) << 1));
}

namespace detail {
// collapse() without the membership check, for inner loops.
inline std::uint32_t collapse_unchecked(int v, VarSet::Mask s) {
  const VarSet::Mask low = (VarSet::Mask{1} << v) - 1;
  return (s & low) | ((s >> 1) & ~low);
}
}  // namespace detail

}  // namespace exactbn
