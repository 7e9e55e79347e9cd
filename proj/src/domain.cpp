#include "pbpoll/domain.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "pbpoll/error.hpp"

namespace pbpoll {

namespace {

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw Error(Errc::ParseError, "not a number: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::int64_t round_half_even(const Amount& x) {
  const std::int64_t fl = floor_div(x.numerator(), x.denominator());
  const Amount frac = x - fl;
  const Amount half(1, 2);
  if (frac < half) return fl;
  if (frac > half) return fl + 1;
  return (fl % 2 == 0) ? fl : fl + 1;
}

Amount round_to_multiple(const Amount& x, std::int64_t grid) {
  return Amount(round_half_even(x / grid) * grid);
}

std::string format_amount(const Amount& x) {
  std::int64_t num = x.numerator();
  std::int64_t den = x.denominator();
  if (den == 1) return std::to_string(num);

  std::int64_t rest = den;
  int twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return std::to_string(num) + "/" + std::to_string(den);

  const int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = num < 0;
  const std::int64_t scaled = (negative ? -num : num) * (scale / den);
  std::string frac = std::to_string(scaled % scale);
  frac.insert(frac.begin(), static_cast<std::size_t>(digits) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return (negative ? "-" : "") + std::to_string(scaled / scale) + "." + frac;
}

Amount parse_amount(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw Error(Errc::ParseError, "empty number");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const std::int64_t n = parse_int(s.substr(0, slash), s);
    const std::int64_t d = parse_int(s.substr(slash + 1), s);
    if (d == 0) throw Error(Errc::ParseError, "zero denominator: '" + std::string(s) + "'");
    return Amount(n, d);
  }

  std::string_view body = s;
  bool negative = false;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty() || body.front() == '+' || body.front() == '-') {
    throw Error(Errc::ParseError, "not a number: '" + std::string(s) + "'");
  }
  const auto dot = body.find('.');
  const std::string_view whole = body.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw Error(Errc::ParseError, "not a number: '" + std::string(s) + "'");
  if (frac.size() > 12) throw Error(Errc::ParseError, "too many decimals: '" + std::string(s) + "'");

  Amount value(whole.empty() ? 0 : parse_int(whole, s));
  if (!frac.empty()) {
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value += Amount(parse_int(frac, s), scale);
  }
  return negative ? -value : value;
}

std::vector<Amount> parse_amount_list(std::string_view text) {
  std::vector<Amount> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_amount(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const Amount& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

// ---------------------------------------------------------------------------

DeviationVector::DeviationVector(const Vec& deltas) : deltas_(deltas) {
  const Amount sum = std::accumulate(deltas.begin(), deltas.end(), Amount(0));
  if (sum != Amount(0)) throw Error(Errc::NotZeroSum, "deviation does not sum to zero");
}

bool DeviationVector::is_zero() const {
  return std::all_of(deltas_.begin(), deltas_.end(), [](const Amount& a) { return a == Amount(0); });
}

DeviationVector DeviationVector::operator-() const {
  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) out[i] = -deltas_[i];
  return DeviationVector(out);
}

DeviationVector DeviationVector::operator+(const DeviationVector& other) const {
  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) out[i] = deltas_[i] + other.deltas_[i];
  return DeviationVector(out);
}

DeviationVector DeviationVector::scaled(const Amount& factor) const {
  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) out[i] = deltas_[i] * factor;
  return DeviationVector(out);
}

// ---------------------------------------------------------------------------

BudgetAllocation::BudgetAllocation() : entries_{Amount(kTotalBudget), Amount(0), Amount(0)} {}

BudgetAllocation BudgetAllocation::from(std::span<const Amount> raw, bool grid5) {
  return validate_allocation(raw, grid5);
}

BudgetAllocation BudgetAllocation::from_ints(std::array<std::int64_t, kIssues> raw, bool grid5) {
  Vec v;
  for (std::size_t i = 0; i < kIssues; ++i) v[i] = Amount(raw[i]);
  return validate_allocation(v, grid5);
}

bool BudgetAllocation::on_grid(std::int64_t grid) const {
  return std::all_of(entries_.begin(), entries_.end(), [grid](const Amount& a) {
    return a.denominator() == 1 && a.numerator() % grid == 0;
  });
}

int BudgetAllocation::positive_count() const {
  return static_cast<int>(
      std::count_if(entries_.begin(), entries_.end(), [](const Amount& a) { return a > 0; }));
}

Amount BudgetAllocation::min_entry() const {
  return *std::min_element(entries_.begin(), entries_.end());
}

std::optional<BudgetAllocation> BudgetAllocation::shifted(const DeviationVector& d) const {
  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) {
    out[i] = entries_[i] + d[i];
    if (out[i] < 0 || out[i] > kTotalBudget) return std::nullopt;
  }
  return BudgetAllocation(out);
}

std::string BudgetAllocation::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < kIssues; ++i) {
    if (i) out += ",";
    out += format_amount(entries_[i]);
  }
  return out + "]";
}

BudgetAllocation validate_allocation(std::span<const Amount> raw, bool grid5) {
  if (raw.size() != kIssues) {
    throw Error(Errc::BadLength, "expected " + std::to_string(kIssues) + " entries, got " +
                                     std::to_string(raw.size()));
  }
  Vec v;
  Amount sum(0);
  for (std::size_t i = 0; i < kIssues; ++i) {
    if (raw[i] < 0 || raw[i] > kTotalBudget) {
      throw Error(Errc::OutOfRange, "entry " + format_amount(raw[i]) + " outside [0, 100]");
    }
    v[i] = raw[i];
    sum += raw[i];
  }
  if (sum != Amount(kTotalBudget)) {
    throw Error(Errc::SumMismatch, "entries sum to " + format_amount(sum) + ", not 100");
  }
  if (grid5) {
    for (const auto& a : v) {
      if (a.denominator() != 1 || a.numerator() % kGrid != 0) {
        throw Error(Errc::OffGrid, "entry " + format_amount(a) + " is not a multiple of 5");
      }
    }
  }
  return BudgetAllocation(v);
}

BudgetAllocation rescale(std::span<const Amount> raw) {
  if (raw.size() != kIssues) {
    throw Error(Errc::BadLength, "expected " + std::to_string(kIssues) + " entries, got " +
                                     std::to_string(raw.size()));
  }
  Amount sum(0);
  for (const auto& a : raw) {
    if (a < 0) throw Error(Errc::OutOfRange, "negative entry " + format_amount(a));
    sum += a;
  }
  if (sum == Amount(0)) throw Error(Errc::AllZero, "nothing to rescale: every entry is zero");

  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) {
    out[i] = round_to_multiple(raw[i] * kTotalBudget / sum, kGrid);
    if (raw[i] > 0 && out[i] == Amount(0)) out[i] = kGrid;
  }
  const Amount residual = Amount(kTotalBudget) - (out[0] + out[1] + out[2]);
  if (residual != Amount(0)) {
    const auto largest = std::max_element(out.begin(), out.end());  // first maximum
    *largest += residual;
  }
  return validate_allocation(out, true);
}

DeviationVector deviation(const BudgetAllocation& p, const BudgetAllocation& q) {
  Vec d;
  for (std::size_t i = 0; i < kIssues; ++i) d[i] = q[i] - p[i];
  return DeviationVector(d);
}

DeviationVector rotate(const DeviationVector& d, std::size_t j) {
  Vec out;
  for (std::size_t i = 0; i < kIssues; ++i) out[(i + j) % kIssues] = d[i];
  return DeviationVector(out);
}

IdealBudget make_ideal(const BudgetAllocation& allocation, std::string participant_id,
                       bool require_all_positive) {
  if (allocation.positive_count() < 2) {
    throw Error(Errc::TooFewPositive, "the budget must be allocated to at least two issues");
  }
  if (require_all_positive && !allocation.all_positive()) {
    throw Error(Errc::ZeroEntry, "this poll requires a positive amount for every issue");
  }
  return IdealBudget{allocation, std::move(participant_id)};
}

IssueSet::IssueSet(std::array<std::string, kIssues> names, IssueScope scope)
    : names_(std::move(names)), scope_(scope) {
  for (std::size_t i = 0; i < kIssues; ++i) {
    if (names_[i].empty()) throw Error(Errc::InvalidConfig, "issue labels must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw Error(Errc::InvalidConfig, "issue labels must be distinct");
    }
  }
}

IssueSet IssueSet::national() {
  return IssueSet({"Health", "Education", "Defense"}, IssueScope::National);
}

IssueSet IssueSet::municipal() {
  return IssueSet({"Schools", "Help for the needy", "Cultural events"}, IssueScope::Municipal);
}

IssueSet IssueSet::parse(std::string_view scope) {
  if (scope == "national") return national();
  if (scope == "municipal") return municipal();
  throw Error(Errc::InvalidConfig, "unknown issue set '" + std::string(scope) + "'");
}

std::string_view IssueSet::scope_name() const {
  return scope_ == IssueScope::National ? "national" : "municipal";
}

}  // namespace pbpoll
