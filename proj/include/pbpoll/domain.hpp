#pragma once

// Budget-simplex value types. Every amount is an exact rational number of
// percent points, so the sum-to-100 invariant is checked with equality.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace pbpoll {

inline constexpr std::size_t kIssues = 3;
inline constexpr std::int64_t kTotalBudget = 100;
inline constexpr std::int64_t kGrid = 5;

using Amount = boost::rational<std::int64_t>;
using Vec = std::array<Amount, kIssues>;

/// Nearest integer, ties to even.
std::int64_t round_half_even(const Amount& x);

/// Nearest multiple of `grid`, ties to the even multiple.
Amount round_to_multiple(const Amount& x, std::int64_t grid);

/// Exact decimal rendering ("40", "38.5", "-0.25"). Falls back to "n/d" for
/// values without a terminating decimal expansion.
std::string format_amount(const Amount& x);

/// Parses "40", "-3", "38.5" or "1/3" exactly. Throws Error(ParseError).
Amount parse_amount(std::string_view text);

/// Comma separated list of amounts, e.g. "30,20,50".
std::vector<Amount> parse_amount_list(std::string_view text);

double to_double(const Amount& x);

class DeviationVector {
 public:
  DeviationVector() = default;
  /// Throws Error(NotZeroSum) unless the deltas sum to zero.
  explicit DeviationVector(const Vec& deltas);

  const Vec& deltas() const { return deltas_; }
  const Amount& operator[](std::size_t i) const { return deltas_[i]; }
  bool is_zero() const;

  DeviationVector operator-() const;
  DeviationVector operator+(const DeviationVector& other) const;
  DeviationVector scaled(const Amount& factor) const;

  friend bool operator==(const DeviationVector&, const DeviationVector&) = default;

 private:
  Vec deltas_{};
};

class BudgetAllocation {
 public:
  /// The uniform allocation is not meaningful; default-constructs the first
  /// vertex so the type stays regular.
  BudgetAllocation();

  /// Validating factory, see validate_allocation().
  static BudgetAllocation from(std::span<const Amount> raw, bool grid5 = false);
  static BudgetAllocation from_ints(std::array<std::int64_t, kIssues> raw, bool grid5 = false);

  const Vec& entries() const { return entries_; }
  const Amount& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }

  bool on_grid(std::int64_t grid) const;
  int positive_count() const;
  bool all_positive() const { return positive_count() == static_cast<int>(kIssues); }
  Amount min_entry() const;

  /// p + d when every entry stays inside [0, 100].
  std::optional<BudgetAllocation> shifted(const DeviationVector& d) const;

  std::string to_string() const;

  friend bool operator==(const BudgetAllocation&, const BudgetAllocation&) = default;
  friend bool operator<(const BudgetAllocation& a, const BudgetAllocation& b) {
    return a.entries_ < b.entries_;
  }

 private:
  friend BudgetAllocation validate_allocation(std::span<const Amount> raw, bool grid5);
  explicit BudgetAllocation(const Vec& entries) : entries_(entries) {}
  Vec entries_;
};

/// Checks length, range, sum and (optionally) the multiples-of-5 grid.
BudgetAllocation validate_allocation(std::span<const Amount> raw, bool grid5);

/// Normalizes a raw non-negative vector onto the 5-point grid of the simplex.
/// Entries are scaled to sum 100 and rounded to the nearest multiple of 5
/// (ties to even); a positive entry never rounds below 5, and the residual is
/// absorbed by the largest entry (lowest index among maxima).
BudgetAllocation rescale(std::span<const Amount> raw);

DeviationVector deviation(const BudgetAllocation& p, const BudgetAllocation& q);

/// Moves every delta j positions to the right, wrapping around.
DeviationVector rotate(const DeviationVector& d, std::size_t j);

struct IdealBudget {
  BudgetAllocation allocation;
  std::string participant_id;
};

/// Applies the eligibility filters: at least two positive entries, and every
/// entry positive when `require_all_positive`.
IdealBudget make_ideal(const BudgetAllocation& allocation, std::string participant_id,
                       bool require_all_positive = false);

enum class IssueScope { National, Municipal };

class IssueSet {
 public:
  IssueSet(std::array<std::string, kIssues> names, IssueScope scope);

  static IssueSet national();
  static IssueSet municipal();
  static IssueSet parse(std::string_view scope);

  const std::array<std::string, kIssues>& names() const { return names_; }
  IssueScope scope() const { return scope_; }
  std::string_view scope_name() const;

 private:
  std::array<std::string, kIssues> names_;
  IssueScope scope_;
};

}  // namespace pbpoll
