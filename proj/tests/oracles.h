// Independent reference implementations used only by tests. Each one takes
// a deliberately different route from the library code it checks.

#ifndef FAIRCEPTRON_TESTS_ORACLES_H_
#define FAIRCEPTRON_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace fairceptron::oracle {

// O(n^2) pair scan for ordering utility.
inline double OrderingUtilityByPairs(const std::vector<double>& q) {
  long inversions = 0, comparable = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      if (q[i] == q[j]) continue;
      ++comparable;
      if (q[i] < q[j]) ++inversions;
    }
  }
  return comparable == 0 ? 1.0
                         : 1.0 - static_cast<double>(inversions) / comparable;
}

// Signed representation straight from the prefix-sum definition, recomputing
// every prefix count from scratch.
inline double RawRepresentationDirect(const std::string& pattern, char prot) {
  const double n = static_cast<double>(pattern.size());
  const double total = static_cast<double>(std::count(pattern.begin(), pattern.end(), prot));
  double raw = 0;
  for (std::size_t k = 1; k < pattern.size(); ++k) {
    const double in_top =
        static_cast<double>(std::count(pattern.begin(), pattern.begin() + k, prot));
    raw += (in_top / k - total / n) / std::log2(k + 1.0);
  }
  return raw;
}

inline double SignedRepresentationDirect(const std::string& pattern, char prot) {
  const std::size_t s = std::count(pattern.begin(), pattern.end(), prot);
  const std::string first = std::string(s, prot) + std::string(pattern.size() - s, '#');
  const std::string last = std::string(pattern.size() - s, '#') + std::string(s, prot);
  const double z = std::max(std::abs(RawRepresentationDirect(first, prot)),
                            std::abs(RawRepresentationDirect(last, prot)));
  return z == 0 ? 0 : RawRepresentationDirect(pattern, prot) / z;
}

// Best size-k qualification sum by enumerating every subset.
inline double BestSubsetSum(const std::vector<double>& q, std::size_t k) {
  double best = 0;
  const std::size_t n = q.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += q[i];
    }
    best = std::max(best, sum);
  }
  return best;
}

// Every sequence over the alphabet with the given multiplicities, built by
// recursive placement (not next_permutation).
inline void MultisetSequences(std::map<std::string, int>& remaining,
                              std::vector<std::string>& prefix,
                              std::set<std::vector<std::string>>& out) {
  bool any = false;
  for (auto& [label, count] : remaining) {
    if (count == 0) continue;
    any = true;
    --count;
    prefix.push_back(label);
    MultisetSequences(remaining, prefix, out);
    prefix.pop_back();
    ++count;
  }
  if (!any) out.insert(prefix);
}

// Uncertainty as a left fold over consecutive pairs.
inline double UncertaintyFold(const std::vector<double>& values) {
  double total = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    total = total + std::fabs(values[i + 1] - values[i]);
  }
  return total;
}

// Mann-Whitney U by pairwise comparison, ties counted as one half.
inline double UByPairs(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (const double x : a) {
    for (const double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

// Exact two-sided p by relabelling the pooled sample in every possible way.
inline double ExactPByLabelings(const std::vector<double>& a,
                                const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double mean = na * b.size() / 2.0;
  const double observed = std::abs(UByPairs(a, b) - mean);
  double hits = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
      ((mask & (1u << i)) ? x : y).push_back(pooled[i]);
    }
    total += 1;
    if (std::abs(UByPairs(x, y) - mean) >= observed - 1e-9) hits += 1;
  }
  return hits / total;
}

}  // namespace fairceptron::oracle

#endif  // FAIRCEPTRON_TESTS_ORACLES_H_
