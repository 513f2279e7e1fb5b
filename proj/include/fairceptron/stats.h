#ifndef FAIRCEPTRON_STATS_H_
#define FAIRCEPTRON_STATS_H_

#include <span>
#include <vector>

namespace fairceptron::stats {

struct MannWhitneyResult {
  double u = 0;  // U statistic of the first sample
  double p = 1;  // two-sided
  bool exact = false;
};

// Largest pooled sample size for which the p-value is enumerated exactly.
inline constexpr std::size_t kExactLimit = 12;

// Midranks (1-based) of `values`; ties share the average rank.
std::vector<double> MidRanks(std::span<const double> values);

// U for sample `a` with midrank ties; p exact when |a|+|b| <= kExactLimit,
// else normal approximation. Throws DomainError on an empty sample.
MannWhitneyResult MannWhitneyU(std::span<const double> a,
                               std::span<const double> b);

// Two-sided p from enumerating every split of the pooled midranks into
// groups of |a| and |b|. Cost is C(|a|+|b|, |a|).
double MannWhitneyExactP(std::span<const double> a, std::span<const double> b);

// Two-sided p from the normal approximation with tie-corrected variance and
// a 0.5 continuity correction.
double MannWhitneyNormalP(std::span<const double> a, std::span<const double> b);

double Median(std::vector<double> values);

}  // namespace fairceptron::stats

#endif  // FAIRCEPTRON_STATS_H_
