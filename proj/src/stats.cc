#include "fairceptron/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairceptron/errors.h"

namespace fairceptron::stats {
namespace {

void RequireNonEmpty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("Mann-Whitney U needs two non-empty samples");
  }
}

std::vector<double> Pooled(std::span<const double> a,
                           std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  return pooled;
}

double UFromRankSum(double rank_sum, double n_a) {
  return rank_sum - n_a * (n_a + 1) / 2;
}

}  // namespace

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
    i = j;
  }
  return ranks;
}

double MannWhitneyExactP(std::span<const double> a, std::span<const double> b) {
  RequireNonEmpty(a, b);
  const auto ranks = MidRanks(Pooled(a, b));
  const std::size_t n = ranks.size();
  const std::size_t n_a = a.size();
  const double mean = static_cast<double>(n_a) * b.size() / 2.0;
  const double observed = std::abs(
      UFromRankSum(std::accumulate(ranks.begin(), ranks.begin() + n_a, 0.0),
                   static_cast<double>(n_a)) -
      mean);

  // Walk all n_a-subsets of positions via a selection mask.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + n_a, true);
  double extreme = 0, total = 0;
  constexpr double kSlack = 1e-9;
  do {
    double rank_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) rank_sum += ranks[i];
    }
    const double u = UFromRankSum(rank_sum, static_cast<double>(n_a));
    if (std::abs(u - mean) >= observed - kSlack) extreme += 1;
    total += 1;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return extreme / total;
}

double MannWhitneyNormalP(std::span<const double> a,
                          std::span<const double> b) {
  RequireNonEmpty(a, b);
  const auto pooled = Pooled(a, b);
  const auto ranks = MidRanks(pooled);
  const double n_a = static_cast<double>(a.size());
  const double n_b = static_cast<double>(b.size());
  const double n = n_a + n_b;
  const double u = UFromRankSum(
      std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0), n_a);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance =
      n_a * n_b / 12.0 * ((n + 1) - (n > 1 ? tie_term / (n * (n - 1)) : 0));
  if (variance <= 0) return 1.0;
  const double z =
      std::max(0.0, std::abs(u - n_a * n_b / 2) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitneyResult MannWhitneyU(std::span<const double> a,
                               std::span<const double> b) {
  RequireNonEmpty(a, b);
  const auto ranks = MidRanks(Pooled(a, b));
  MannWhitneyResult result;
  result.u = UFromRankSum(
      std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0),
      static_cast<double>(a.size()));
  result.exact = a.size() + b.size() <= kExactLimit;
  result.p = result.exact ? MannWhitneyExactP(a, b) : MannWhitneyNormalP(a, b);
  return result;
}

double Median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

}  // namespace fairceptron::stats
