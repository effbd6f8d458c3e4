#include "exactbn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "exactbn/errors.hpp"

namespace exactbn {

Dataset::Dataset(std::vector<Arity> arities, std::vector<Value> cells)
    : arities_(std::move(arities)), cells_(std::move(cells)) {
  const std::size_t n = arities_.size();
  if (n == 0) throw DataError("dataset has no variables");
  if (n > static_cast<std::size_t>(kMaxVars)) {
    throw LimitError("dataset has " + std::to_string(n) + " variables; at most 32 are supported");
  }
  if (cells_.empty()) throw DataError("dataset has no rows");
  if (cells_.size() % n != 0) throw DataError("cell count is not a multiple of the variable count");
  if (cells_.size() / n > std::numeric_limits<Count>::max()) throw LimitError("too many rows");
  for (std::size_t v = 0; v < n; ++v) {
    if (arities_[v] < 1 || arities_[v] > kMaxArity) {
      throw DataError("arity of column " + std::to_string(v) + " out of range");
    }
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] >= arities_[i % n]) {
      throw DataError("value " + std::to_string(cells_[i]) + " in row " + std::to_string(i / n) +
                      ", column " + std::to_string(i % n) + " exceeds the column arity");
    }
  }
}

Dataset Dataset::permute_columns(std::span<const int> order) const {
  const std::size_t n = arities_.size();
  if (order.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<Arity> arities(n);
  std::vector<Value> cells(cells_.size());
  for (std::size_t i = 0; i < n; ++i) arities[i] = arities_.at(static_cast<std::size_t>(order[i]));
  for (std::size_t r = 0; r < num_rows(); ++r) {
    for (std::size_t i = 0; i < n; ++i) cells[r * n + i] = cells_[r * n + static_cast<std::size_t>(order[i])];
  }
  return Dataset(std::move(arities), std::move(cells));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace

Dataset parse_dataset(std::istream& in, const LoadOptions& options) {
  std::vector<Value> cells;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (width == 0) {
      width = fields.size();
      if (width > static_cast<std::size_t>(kMaxVars)) {
        throw LimitError("line " + std::to_string(line_no) + ": " + std::to_string(width) +
                         " columns; at most 32 variables are supported");
      }
    } else if (fields.size() != width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " values, found " + std::to_string(fields.size()));
    }
    for (std::string_view f : fields) {
      unsigned long value = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError("line " + std::to_string(line_no) + ": '" + std::string(f) +
                        "' is not a non-negative integer");
      }
      if (value >= kMaxArity) {
        throw DataError("line " + std::to_string(line_no) + ": value " + std::string(f) + " too large");
      }
      cells.push_back(static_cast<Value>(value));
    }
  }
  if (width == 0) throw DataError("no data rows");

  std::vector<Arity> arities(width, 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    arities[i % width] = std::max<Arity>(arities[i % width], Arity{cells[i]} + 1);
  }
  if (options.arities) {
    if (options.arities->size() != width) {
      throw DataError("explicit arities list has " + std::to_string(options.arities->size()) +
                      " entries for " + std::to_string(width) + " columns");
    }
    for (std::size_t v = 0; v < width; ++v) {
      if ((*options.arities)[v] < arities[v]) {
        throw DataError("column " + std::to_string(v) + " has values beyond the given arity " +
                        std::to_string((*options.arities)[v]));
      }
    }
    arities = *options.arities;
  }
  return Dataset(std::move(arities), std::move(cells));
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_dataset(in, options);
}

void write_dataset(std::ostream& out, const Dataset& data, std::string_view comment) {
  std::istringstream lines{std::string(comment)};
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  const int n = data.num_vars();
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    const auto row = data.row(r);
    for (int v = 0; v < n; ++v) {
      if (v) out << ' ';
      out << row[static_cast<std::size_t>(v)];
    }
    out << '\n';
  }
}

// ContingencyTable

ContingencyTable::ContingencyTable(VarSet vars, std::vector<Arity> member_arities, std::vector<Row> rows)
    : vars_(vars), members_(vars.members()), arities_(std::move(member_arities)), rows_(std::move(rows)) {
  if (vars_.empty()) throw std::invalid_argument("contingency table over an empty variable set");
  if (arities_.size() != members_.size()) throw std::invalid_argument("member arity count mismatch");
  for (const Row& row : rows_) {
    if (row.values.size() != members_.size()) throw std::invalid_argument("row width mismatch");
    if (row.count == 0) throw std::invalid_argument("contingency table rows need positive counts");
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      if (row.values[i] >= arities_[i]) throw std::invalid_argument("row value exceeds arity");
    }
  }
  std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) { return a.values < b.values; });
  auto dup = std::adjacent_find(rows_.begin(), rows_.end(),
                                [](const Row& a, const Row& b) { return a.values == b.values; });
  if (dup != rows_.end()) throw std::invalid_argument("duplicate value vector in contingency table");
}

std::uint64_t ContingencyTable::total() const {
  std::uint64_t sum = 0;
  for (const Row& r : rows_) sum += r.count;
  return sum;
}

std::size_t ContingencyTable::position(int v) const {
  auto it = std::find(members_.begin(), members_.end(), v);
  if (it == members_.end()) throw std::invalid_argument("variable not in contingency table");
  return static_cast<std::size_t>(it - members_.begin());
}

std::uint64_t CondFreqTable::total() const {
  std::uint64_t sum = 0;
  for (const Row& r : rows) {
    for (Count c : r.counts) sum += c;
  }
  return sum;
}

ContingencyTable build_ct(const Dataset& data, VarSet vars) {
  if (vars.empty()) throw std::invalid_argument("build_ct: empty variable set");
  if (!vars.subset_of(VarSet::full(data.num_vars()))) {
    throw std::invalid_argument("build_ct: variable out of range");
  }
  const auto members = vars.members();
  std::map<std::vector<Value>, Count> freq;
  std::vector<Value> key(members.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < members.size(); ++i) key[i] = data.at(r, members[i]);
    ++freq[key];
  }
  std::vector<Arity> arities;
  for (int v : members) arities.push_back(data.arity(v));
  std::vector<ContingencyTable::Row> rows;
  rows.reserve(freq.size());
  for (auto& [values, count] : freq) rows.push_back({values, count});
  return ContingencyTable(vars, std::move(arities), std::move(rows));
}

ContingencyTable marginalize(const ContingencyTable& ct, int v) {
  const std::size_t pos = ct.position(v);
  if (ct.members().size() == 1) throw std::invalid_argument("marginalize: result would be empty");
  std::map<std::vector<Value>, Count> freq;
  for (const auto& row : ct.rows()) {
    std::vector<Value> key = row.values;
    key.erase(key.begin() + static_cast<std::ptrdiff_t>(pos));
    freq[key] += row.count;
  }
  std::vector<Arity> arities = ct.member_arities();
  arities.erase(arities.begin() + static_cast<std::ptrdiff_t>(pos));
  std::vector<ContingencyTable::Row> rows;
  rows.reserve(freq.size());
  for (auto& [values, count] : freq) rows.push_back({values, count});
  return ContingencyTable(ct.vars().without(v), std::move(arities), std::move(rows));
}

CondFreqTable to_cft(const ContingencyTable& ct, int v) {
  const std::size_t pos = ct.position(v);
  CondFreqTable cft;
  cft.child = v;
  cft.child_arity = ct.member_arities()[pos];
  cft.parents = ct.vars().without(v);
  cft.parent_arities = ct.member_arities();
  cft.parent_arities.erase(cft.parent_arities.begin() + static_cast<std::ptrdiff_t>(pos));

  std::map<std::vector<Value>, std::vector<Count>> groups;
  for (const auto& row : ct.rows()) {
    std::vector<Value> config = row.values;
    config.erase(config.begin() + static_cast<std::ptrdiff_t>(pos));
    auto& counts = groups[config];
    if (counts.empty()) counts.assign(cft.child_arity, 0);
    counts[row.values[pos]] += row.count;
  }
  cft.rows.reserve(groups.size());
  for (auto& [config, counts] : groups) cft.rows.push_back({config, std::move(counts)});
  return cft;
}

}  // namespace exactbn
