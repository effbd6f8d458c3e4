#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exactbn/dataset.hpp"

namespace exactbn {

enum class ScoreKind : std::uint8_t { kBde = 0, kBic = 1, kAic = 2 };

std::string_view to_string(ScoreKind kind);
/// Accepts "bde", "bic", "aic" (case-insensitive).
ScoreKind parse_score_kind(std::string_view name);

/// Which decomposable score to use. `ess` is the equivalent sample size of
/// the BDeu prior and is ignored by BIC and AIC.
struct ScoreSpec {
  ScoreKind kind = ScoreKind::kBde;
  double ess = 1.0;

  /// Throws std::invalid_argument unless ess is positive and finite for BDe.
  void validate() const;
  bool operator==(const ScoreSpec&) const = default;
};

/// Local log-score of a child given its parents, computed from the
/// conditional frequency table. Natural logarithms throughout.
///
///  BDe (BDeu):  sum_j [ lnG(a/q) - lnG(a/q + N_j) + sum_k (lnG(a/(qr) + N_jk) - lnG(a/(qr))) ]
///  BIC:         sum_jk N_jk ln(N_jk / N_j) - (ln N / 2) q (r - 1)
///  AIC:         sum_jk N_jk ln(N_jk / N_j) - q (r - 1)
///
/// where q is the product of the parent arities, r the child arity and N
/// the table total. Unobserved parent configurations contribute nothing.
double local_score(const CondFreqTable& cft, const ScoreSpec& spec);

namespace detail {

/// Evaluates one family (child, parent set) row by row. Both local_score()
/// and the contingency-table traversal go through this class, in the same
/// row order, so they agree to the last bit.
///
/// Not thread-safe: lookup tables for lnG differences and n ln n are filled
/// lazily and owned by the instance.
class FamilyScorer {
 public:
  struct Family {
    Arity child_arity = 1;
    double parent_configs = 1.0;  // q
    double* cell_table = nullptr;
    double* config_table = nullptr;
    double cell_alpha = 0.0;
    double config_alpha = 0.0;
  };

  /// `total` is the number of data rows; counts never exceed it.
  /// `cache` enables the lookup tables (bounded memory).
  FamilyScorer(const ScoreSpec& spec, std::uint64_t total, bool cache);

  /// q is passed as the product of parent arities, multiplied in ascending
  /// parent order.
  Family family(double parent_configs, Arity child_arity);

  /// Contribution of one observed parent configuration. `counts` has one
  /// entry per child value; `row_total` is their sum and must be positive.
  double row_term(const Family& f, std::span<const Count> counts, std::uint64_t row_total) const;

  /// Turns the accumulated row terms into the local score.
  double finish(const Family& f, double accumulated) const;

 private:
  double lgamma_diff(double* table, double alpha, std::uint64_t count) const;
  double xlogx(std::uint64_t count) const;
  double* table_for(double alpha);

  ScoreSpec spec_;
  std::uint64_t total_;
  double log_total_;
  bool cache_;
  std::vector<double> xlogx_;
  std::unordered_map<double, std::unique_ptr<double[]>> lgamma_tables_;
  std::size_t cached_values_ = 0;
};

/// Product of arities as a double, multiplied in the given order.
double arity_product(std::span<const Arity> arities);

}  // namespace detail
}  // namespace exactbn
