#include "ct_engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "exactbn/errors.hpp"

namespace exactbn::detail {

namespace {

__extension__ typedef unsigned __int128 uint128;

unsigned field_width(Arity arity) { return static_cast<unsigned>(std::bit_width(arity - 1)); }

/// Members of a variable set with their arities and packing metadata.
struct Layout {
  int size = 0;
  std::array<int, kMaxVars> var{};
  std::array<Arity, kMaxVars> arity{};
  std::array<std::uint64_t, kMaxVars> stride{};  // dense mixed radix, last member fastest
  std::array<unsigned, kMaxVars> offset{};       // packed key bit offset, last member lowest
  std::array<unsigned, kMaxVars> width{};
  std::uint64_t cells = 1;  // saturates at `cap` + 1
};

Layout make_layout(VarSet vars, const std::vector<Arity>& arities, std::uint64_t cap) {
  Layout l;
  for (int v : vars) {
    l.var[static_cast<std::size_t>(l.size)] = v;
    l.arity[static_cast<std::size_t>(l.size)] = arities[static_cast<std::size_t>(v)];
    ++l.size;
  }
  std::uint64_t stride = 1;
  unsigned offset = 0;
  bool saturated = false;
  for (int i = l.size - 1; i >= 0; --i) {
    const auto u = static_cast<std::size_t>(i);
    l.stride[u] = saturated ? 0 : stride;
    l.offset[u] = offset;
    l.width[u] = field_width(l.arity[u]);
    offset += l.width[u];
    if (!saturated) {
      if (stride > (cap + 1) / l.arity[u]) {
        saturated = true;
      } else {
        stride *= l.arity[u];
      }
    }
  }
  l.cells = saturated ? cap + 1 : stride;
  return l;
}

class EngineBase {
 public:
  virtual ~EngineBase() = default;
  virtual void run(const ShardJob& job, const FamilySink& sink) = 0;
  TraversalStats stats;
};

template <class Key>
class Engine final : public EngineBase {
  static constexpr unsigned kKeyBits = sizeof(Key) * 8;

  struct Table {
    VarSet vars;
    Layout layout;
    bool dense = false;
    std::vector<Count> cells;
    std::vector<Key> keys;
    std::vector<Count> counts;
  };

 public:
  Engine(const Dataset& data, const ScoreSpec& spec, std::uint64_t dense_limit)
      : data_(data), scorer_(spec, data.num_rows(), /*cache=*/true), dense_limit_(dense_limit) {}

  void run(const ShardJob& job, const FamilySink& sink) override {
    sink_ = &sink;
    live_ = 1;
    stats.peak_live_tables = std::max<std::uint64_t>(stats.peak_live_tables, 1);
    Table root = project(job.root);
    visit(root, job.eligible);
    sink_ = nullptr;
  }

 private:
  static Key shr(Key k, unsigned s) { return s >= kKeyBits ? Key{0} : k >> s; }
  static Key low_mask(unsigned bits) { return bits == 0 ? Key{0} : (bits >= kKeyBits ? ~Key{0} : (Key{1} << bits) - 1); }

  Layout layout_for(VarSet vars) const { return make_layout(vars, data_.arities(), dense_limit_); }

  Table project(VarSet vars) {
    Table t;
    t.vars = vars;
    t.layout = layout_for(vars);
    const Layout& l = t.layout;
    const std::size_t rows = data_.num_rows();
    ++stats.tables_built;
    if (l.cells <= dense_limit_) {
      t.dense = true;
      ++stats.dense_tables;
      t.cells.assign(l.cells, 0);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto row = data_.row(r);
        std::uint64_t idx = 0;
        for (int i = 0; i < l.size; ++i) {
          idx += l.stride[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(l.var[static_cast<std::size_t>(i)])];
        }
        ++t.cells[idx];
      }
      return t;
    }
    std::vector<Key> keys(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = data_.row(r);
      Key key = 0;
      for (int i = 0; i < l.size; ++i) {
        const auto u = static_cast<std::size_t>(i);
        key |= Key{row[static_cast<std::size_t>(l.var[u])]} << l.offset[u];
      }
      keys[r] = key;
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t r = 0; r < rows;) {
      std::size_t e = r + 1;
      while (e < rows && keys[e] == keys[r]) ++e;
      t.keys.push_back(keys[r]);
      t.counts.push_back(static_cast<Count>(e - r));
      r = e;
    }
    return t;
  }

  void visit(const Table& t, VarSet eligible) {
    if (t.vars.size() <= 1) {
      score_members(t, VarSet());
      return;
    }
    // Sparse tables score their eligible members while marginalizing them.
    const VarSet fused = t.dense ? VarSet() : eligible;
    score_members(t, fused);
    for (int v : eligible) {
      Table child = marginalize(t, v, fused.contains(v));
      ++live_;
      stats.peak_live_tables = std::max(stats.peak_live_tables, live_);
      visit(child, VarSet::below(v));
      --live_;
    }
  }

  std::vector<Arity> parent_arities(const Layout& l, int pos) const {
    std::vector<Arity> out;
    for (int i = 0; i < l.size; ++i) {
      if (i != pos) out.push_back(l.arity[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  FamilyScorer::Family family_at(const Layout& l, int p) {
    return scorer_.family(arity_product(parent_arities(l, p)), l.arity[static_cast<std::size_t>(p)]);
  }

  void emit(const Table& t, int v, const FamilyScorer::Family& family, double acc) {
    (*sink_)(v, collapse_unchecked(v, t.vars.without(v).mask()), scorer_.finish(family, acc));
    ++stats.families_scored;
  }

  // Scores every member of t except those in `skip`.
  void score_members(const Table& t, VarSet skip) {
    const Layout& l = t.layout;
    for (int p = 0; p < l.size; ++p) {
      const auto u = static_cast<std::size_t>(p);
      if (skip.contains(l.var[u])) continue;
      const auto family = family_at(l, p);
      counts_.assign(l.arity[u], 0);
      emit(t, l.var[u], family, t.dense ? dense_family(t, p, family) : sparse_family(t, p, family));
    }
  }

  double dense_family(const Table& t, int p, const FamilyScorer::Family& family) {
    const Layout& l = t.layout;
    const auto u = static_cast<std::size_t>(p);
    const std::uint64_t stride = l.stride[u];
    const Arity r = l.arity[u];
    const std::uint64_t block = stride * r;
    const std::uint64_t blocks = t.cells.size() / block;
    const Count* cells = t.cells.data();
    double acc = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const Count* base = cells + b * block;
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        std::uint64_t total = 0;
        for (Arity k = 0; k < r; ++k) {
          const Count c = base[k * stride + lo];
          counts_[k] = c;
          total += c;
        }
        if (total != 0) acc += scorer_.row_term(family, counts_, total);
      }
    }
    return acc;
  }

  struct Run {
    std::size_t pos;
    std::size_t end;
    Arity value;
  };

  // Splits [begin, end) of a sorted key range sharing one high part into
  // runs of equal child value; each run is sorted by its low part.
  void find_runs(const std::vector<Key>& keys, std::size_t begin, std::size_t end, unsigned offset, Key field_mask) {
    runs_.clear();
    std::size_t s = begin;
    while (s < end) {
      const Key value = shr(keys[s], offset) & field_mask;
      std::size_t e = s + 1;
      while (e < end && (shr(keys[e], offset) & field_mask) == value) ++e;
      runs_.push_back({s, e, static_cast<Arity>(value)});
      s = e;
    }
  }

  // Calls fn(low, total) for each distinct low part of the current runs in
  // ascending order, with that part's per-value counts left in counts_.
  template <class Fn>
  void merge_runs(const std::vector<Key>& keys, const std::vector<Count>& counts, Key lo_mask, Fn&& fn) {
    while (true) {
      bool any = false;
      Key best = 0;
      for (const Run& run : runs_) {
        if (run.pos == run.end) continue;
        const Key lo = keys[run.pos] & lo_mask;
        if (!any || lo < best) {
          best = lo;
          any = true;
        }
      }
      if (!any) return;
      std::fill(counts_.begin(), counts_.end(), 0);
      std::uint64_t total = 0;
      for (Run& run : runs_) {
        if (run.pos == run.end || (keys[run.pos] & lo_mask) != best) continue;
        counts_[run.value] = counts[run.pos];
        total += counts[run.pos];
        ++run.pos;
      }
      fn(best, total);
    }
  }

  double sparse_family(const Table& t, int p, const FamilyScorer::Family& family) {
    const Layout& l = t.layout;
    const auto u = static_cast<std::size_t>(p);
    const unsigned offset = l.offset[u];
    const unsigned hi_shift = offset + l.width[u];
    const Key field_mask = low_mask(l.width[u]);
    const Key lo_mask = low_mask(offset);
    const auto& keys = t.keys;
    double acc = 0.0;
    for (std::size_t i = 0; i < keys.size();) {
      const Key hi = shr(keys[i], hi_shift);
      std::size_t j = i + 1;
      while (j < keys.size() && shr(keys[j], hi_shift) == hi) ++j;
      find_runs(keys, i, j, offset, field_mask);
      merge_runs(keys, t.counts, lo_mask,
                 [&](Key, std::uint64_t total) { acc += scorer_.row_term(family, counts_, total); });
      i = j;
    }
    return acc;
  }

  // With `score` set (sparse tables only), also scores v's family in t.
  Table marginalize(const Table& t, int v, bool score) {
    const Layout& l = t.layout;
    int p = 0;
    while (l.var[static_cast<std::size_t>(p)] != v) ++p;
    const auto u = static_cast<std::size_t>(p);

    Table c;
    c.vars = t.vars.without(v);
    c.layout = layout_for(c.vars);
    ++stats.tables_built;
    counts_.assign(l.arity[u], 0);

    if (t.dense) {
      c.dense = true;
      ++stats.dense_tables;
      const std::uint64_t stride = l.stride[u];
      const Arity r = l.arity[u];
      const std::uint64_t block = stride * r;
      const std::uint64_t blocks = t.cells.size() / block;
      c.cells.assign(blocks * stride, 0);
      for (std::uint64_t b = 0; b < blocks; ++b) {
        const Count* src = t.cells.data() + b * block;
        Count* dst = c.cells.data() + b * stride;
        for (Arity k = 0; k < r; ++k) {
          const Count* row = src + k * stride;
          for (std::uint64_t lo = 0; lo < stride; ++lo) dst[lo] += row[lo];
        }
      }
      return c;
    }

    const unsigned offset = l.offset[u];
    const unsigned hi_shift = offset + l.width[u];
    const Key field_mask = low_mask(l.width[u]);
    const Key lo_mask = low_mask(offset);
    const auto& keys = t.keys;
    FamilyScorer::Family family;
    if (score) family = family_at(l, p);
    double acc = 0.0;
    std::vector<Key> out_keys;
    std::vector<Count> out_counts;
    out_keys.reserve(keys.size());
    out_counts.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size();) {
      const Key hi = shr(keys[i], hi_shift);
      std::size_t j = i + 1;
      while (j < keys.size() && shr(keys[j], hi_shift) == hi) ++j;
      find_runs(keys, i, j, offset, field_mask);
      const Key high_part = offset >= kKeyBits ? Key{0} : hi << offset;
      merge_runs(keys, t.counts, lo_mask, [&](Key lo, std::uint64_t total) {
        out_keys.push_back(high_part | lo);
        out_counts.push_back(static_cast<Count>(total));
        if (score) acc += scorer_.row_term(family, counts_, total);
      });
      i = j;
    }
    if (score) emit(t, v, family, acc);

    if (c.layout.cells <= dense_limit_) {
      c.dense = true;
      ++stats.dense_tables;
      const Layout& cl = c.layout;
      c.cells.assign(cl.cells, 0);
      for (std::size_t i = 0; i < out_keys.size(); ++i) {
        Key key = out_keys[i];
        std::uint64_t idx = 0;
        for (int m = cl.size - 1; m >= 0; --m) {
          const auto mu = static_cast<std::size_t>(m);
          idx += cl.stride[mu] * static_cast<std::uint64_t>(key & low_mask(cl.width[mu]));
          key = shr(key, cl.width[mu]);
        }
        c.cells[idx] = out_counts[i];
      }
    } else {
      c.keys = std::move(out_keys);
      c.counts = std::move(out_counts);
    }
    return c;
  }

  const Dataset& data_;
  FamilyScorer scorer_;
  std::uint64_t dense_limit_;
  const FamilySink* sink_ = nullptr;
  std::uint64_t live_ = 0;
  std::vector<Count> counts_;
  std::vector<Run> runs_;
};

}  // namespace

struct TableTraversal::Impl {
  std::unique_ptr<EngineBase> engine;
};

unsigned TableTraversal::key_bits(const Dataset& data) {
  unsigned bits = 0;
  for (Arity a : data.arities()) bits += field_width(a);
  return bits;
}

TableTraversal::TableTraversal(const Dataset& data, const ScoreSpec& spec, const TraversalOptions& options)
    : impl_(std::make_unique<Impl>()) {
  spec.validate();
  std::uint64_t limit = std::min<std::uint64_t>(options.dense_cell_limit, std::uint64_t{1} << 40);
  if (limit == 0) limit = std::max<std::uint64_t>(4096, 2 * static_cast<std::uint64_t>(data.num_rows()));
  const unsigned bits = key_bits(data);
  if (bits <= 64) {
    impl_->engine = std::make_unique<Engine<std::uint64_t>>(data, spec, limit);
  } else if (bits <= 128) {
    impl_->engine = std::make_unique<Engine<uint128>>(data, spec, limit);
  } else {
    throw LimitError("packed value vectors need " + std::to_string(bits) +
                     " bits; at most 128 are supported (reduce variable arities)");
  }
}

TableTraversal::~TableTraversal() = default;

void TableTraversal::run(const ShardJob& job, const FamilySink& sink) {
  try {
    impl_->engine->run(job, sink);
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory while building contingency tables");
  }
}

const TraversalStats& TableTraversal::stats() const { return impl_->engine->stats; }

}  // namespace exactbn::detail
