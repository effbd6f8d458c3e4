#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "exactbn/varset.hpp"

namespace exactbn {

using Value = std::uint16_t;
using Arity = std::uint32_t;
using Count = std::uint32_t;

inline constexpr Arity kMaxArity = 65536;

/// Complete discrete data: N rows over n categorical variables, stored
/// row-major. Every cell is below the arity of its column.
class Dataset {
 public:
  Dataset(std::vector<Arity> arities, std::vector<Value> cells);

  int num_vars() const { return static_cast<int>(arities_.size()); }
  std::size_t num_rows() const { return cells_.size() / arities_.size(); }
  Arity arity(int v) const { return arities_[static_cast<std::size_t>(v)]; }
  const std::vector<Arity>& arities() const { return arities_; }

  std::span<const Value> row(std::size_t r) const {
    return {cells_.data() + r * arities_.size(), arities_.size()};
  }
  Value at(std::size_t r, int v) const { return cells_[r * arities_.size() + static_cast<std::size_t>(v)]; }
  const std::vector<Value>& cells() const { return cells_; }

  /// Same cells with columns reordered: column i of the result is column
  /// order[i] of this dataset.
  Dataset permute_columns(std::span<const int> order) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Arity> arities_;
  std::vector<Value> cells_;
};

struct LoadOptions {
  /// Explicit per-column arities; observed values must still fit.
  std::optional<std::vector<Arity>> arities;
};

/// Reads whitespace- or comma-separated non-negative integers, one data
/// vector per line. Blank lines and lines starting with '#' are skipped.
/// Arities default to max value + 1 per column.
Dataset parse_dataset(std::istream& in, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes rows in the format accepted by parse_dataset(). Each line of
/// `comment` is emitted first, prefixed with "# ".
void write_dataset(std::ostream& out, const Dataset& data, std::string_view comment = {});

/// Frequencies of the distinct projections of the data onto `vars`.
/// Rows are kept sorted by value vector (lexicographic, lowest variable
/// index first), which makes tables directly comparable.
class ContingencyTable {
 public:
  struct Row {
    std::vector<Value> values;  // one per member of vars(), ascending index
    Count count = 0;
    bool operator==(const Row&) const = default;
  };

  /// Rows may be given in any order but must be distinct with positive
  /// counts and values within the member arities.
  ContingencyTable(VarSet vars, std::vector<Arity> member_arities, std::vector<Row> rows);

  VarSet vars() const { return vars_; }
  const std::vector<int>& members() const { return members_; }
  const std::vector<Arity>& member_arities() const { return arities_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::uint64_t total() const;

  /// Position of variable v among members(); throws if absent.
  std::size_t position(int v) const;

  bool operator==(const ContingencyTable& other) const {
    return vars_ == other.vars_ && arities_ == other.arities_ && rows_ == other.rows_;
  }

 private:
  VarSet vars_;
  std::vector<int> members_;
  std::vector<Arity> arities_;
  std::vector<Row> rows_;
};

/// Counts of the child's values for every observed configuration of the
/// parents. Rows are sorted by parent configuration.
struct CondFreqTable {
  struct Row {
    std::vector<Value> config;  // one per parent, ascending index
    std::vector<Count> counts;  // length child_arity
    bool operator==(const Row&) const = default;
  };

  int child = 0;
  Arity child_arity = 1;
  VarSet parents;
  std::vector<Arity> parent_arities;
  std::vector<Row> rows;

  std::uint64_t total() const;
  bool operator==(const CondFreqTable&) const = default;
};

ContingencyTable build_ct(const Dataset& data, VarSet vars);
ContingencyTable marginalize(const ContingencyTable& ct, int v);
CondFreqTable to_cft(const ContingencyTable& ct, int v);

}  // namespace exactbn
