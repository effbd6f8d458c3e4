#include "exactbn/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace exactbn {

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kBde: return "bde";
    case ScoreKind::kBic: return "bic";
    case ScoreKind::kAic: return "aic";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bde" || lower == "bdeu") return ScoreKind::kBde;
  if (lower == "bic") return ScoreKind::kBic;
  if (lower == "aic") return ScoreKind::kAic;
  throw std::invalid_argument("unknown score '" + std::string(name) + "'");
}

void ScoreSpec::validate() const {
  if (kind == ScoreKind::kBde && !(ess > 0.0 && std::isfinite(ess))) {
    throw std::invalid_argument("BDe equivalent sample size must be positive and finite");
  }
}

namespace detail {

namespace {
// Upper bound on lazily filled lookup entries per scorer (64 MiB of doubles).
constexpr std::size_t kMaxCachedValues = std::size_t{1} << 23;
const double kUnset = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double arity_product(std::span<const Arity> arities) {
  double q = 1.0;
  for (Arity a : arities) q *= static_cast<double>(a);
  return q;
}

FamilyScorer::FamilyScorer(const ScoreSpec& spec, std::uint64_t total, bool cache)
    : spec_(spec), total_(total), log_total_(std::log(static_cast<double>(total))), cache_(cache) {
  spec_.validate();
  if (spec_.kind != ScoreKind::kBde && cache_) {
    xlogx_.resize(total_ + 1);
    for (std::uint64_t c = 0; c <= total_; ++c) {
      xlogx_[c] = c == 0 ? 0.0 : static_cast<double>(c) * std::log(static_cast<double>(c));
    }
  }
}

double* FamilyScorer::table_for(double alpha) {
  if (!cache_) return nullptr;
  if (auto it = lgamma_tables_.find(alpha); it != lgamma_tables_.end()) return it->second.get();
  if (cached_values_ + total_ + 1 > kMaxCachedValues) return nullptr;
  auto table = std::make_unique<double[]>(total_ + 1);
  std::fill_n(table.get(), total_ + 1, kUnset);
  table[0] = 0.0;
  cached_values_ += total_ + 1;
  return lgamma_tables_.emplace(alpha, std::move(table)).first->second.get();
}

FamilyScorer::Family FamilyScorer::family(double parent_configs, Arity child_arity) {
  Family f;
  f.child_arity = child_arity;
  f.parent_configs = parent_configs;
  if (spec_.kind == ScoreKind::kBde) {
    f.config_alpha = spec_.ess / parent_configs;
    f.cell_alpha = spec_.ess / (parent_configs * static_cast<double>(child_arity));
    f.config_table = table_for(f.config_alpha);
    f.cell_table = table_for(f.cell_alpha);
  }
  return f;
}

double FamilyScorer::lgamma_diff(double* table, double alpha, std::uint64_t count) const {
  if (table) {
    double& slot = table[count];
    if (std::isnan(slot)) slot = std::lgamma(alpha + static_cast<double>(count)) - std::lgamma(alpha);
    return slot;
  }
  if (count == 0) return 0.0;
  return std::lgamma(alpha + static_cast<double>(count)) - std::lgamma(alpha);
}

double FamilyScorer::xlogx(std::uint64_t count) const {
  if (!xlogx_.empty()) return xlogx_[count];
  return count == 0 ? 0.0 : static_cast<double>(count) * std::log(static_cast<double>(count));
}

double FamilyScorer::row_term(const Family& f, std::span<const Count> counts, std::uint64_t row_total) const {
  double term = 0.0;
  if (spec_.kind == ScoreKind::kBde) {
    for (Count c : counts) {
      if (c != 0) term += lgamma_diff(f.cell_table, f.cell_alpha, c);
    }
    term -= lgamma_diff(f.config_table, f.config_alpha, row_total);
  } else {
    for (Count c : counts) {
      if (c != 0) term += xlogx(c);
    }
    term -= xlogx(row_total);
  }
  return term;
}

double FamilyScorer::finish(const Family& f, double accumulated) const {
  const double free_params = f.parent_configs * static_cast<double>(f.child_arity - 1);
  switch (spec_.kind) {
    case ScoreKind::kBde: return accumulated;
    case ScoreKind::kBic: return accumulated - 0.5 * log_total_ * free_params;
    case ScoreKind::kAic: return accumulated - free_params;
  }
  return accumulated;
}

}  // namespace detail

double local_score(const CondFreqTable& cft, const ScoreSpec& spec) {
  const std::uint64_t total = cft.total();
  if (total == 0) return 0.0;
  detail::FamilyScorer scorer(spec, total, /*cache=*/false);
  const auto family = scorer.family(detail::arity_product(cft.parent_arities), cft.child_arity);
  double acc = 0.0;
  for (const auto& row : cft.rows) {
    std::uint64_t row_total = 0;
    for (Count c : row.counts) row_total += c;
    if (row_total == 0) continue;
    acc += scorer.row_term(family, row.counts, row_total);
  }
  return scorer.finish(family, acc);
}

}  // namespace exactbn
