#include "fairceptron/measures.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "fairceptron/errors.h"

namespace fairceptron {

std::vector<std::string> Roster::Groups() const {
  std::set<std::string> groups;
  for (const auto& p : personas) groups.insert(p.group);
  return {groups.begin(), groups.end()};
}

void Roster::Validate() const {
  if (personas.size() < 2) {
    throw ValidationError("roster needs at least 2 personas");
  }
  std::set<std::string> ids;
  for (const auto& p : personas) {
    if (!ids.insert(p.id).second) {
      throw ValidationError("duplicate persona id '" + p.id + "'");
    }
    if (!std::isfinite(p.qualification) || p.qualification < 0) {
      throw ValidationError("persona '" + p.id +
                            "' has a negative or non-finite qualification");
    }
  }
  const auto groups = Groups();
  if (groups.size() < 2) {
    throw ValidationError("roster needs at least 2 distinct groups");
  }
  if (std::find(groups.begin(), groups.end(), protected_group) ==
      groups.end()) {
    throw ValidationError("protected group '" + protected_group +
                          "' does not occur in the roster");
  }
}

namespace measures {
namespace {

// Counts pairs i < j with values[i] < values[j] by merge sort into
// descending order.
std::int64_t CountAscendingPairs(std::vector<double>& values,
                                 std::vector<double>& scratch,
                                 std::size_t begin, std::size_t end) {
  if (end - begin < 2) return 0;
  const std::size_t mid = begin + (end - begin) / 2;
  std::int64_t count = CountAscendingPairs(values, scratch, begin, mid) +
                       CountAscendingPairs(values, scratch, mid, end);
  std::size_t left = begin, right = mid, out = begin;
  while (left < mid && right < end) {
    // Take from the left on ties so equal values are never counted.
    if (values[left] >= values[right]) {
      scratch[out++] = values[left++];
    } else {
      count += static_cast<std::int64_t>(mid - left);
      scratch[out++] = values[right++];
    }
  }
  while (left < mid) scratch[out++] = values[left++];
  while (right < end) scratch[out++] = values[right++];
  std::copy(scratch.begin() + begin, scratch.begin() + end,
            values.begin() + begin);
  return count;
}

std::int64_t Choose2(std::int64_t n) { return n * (n - 1) / 2; }

void RequireTwoGroups(std::span<const Persona> personas,
                      const std::string& protected_group) {
  std::set<std::string> groups;
  bool has_protected = false;
  for (const auto& p : personas) {
    groups.insert(p.group);
    has_protected |= p.group == protected_group;
  }
  if (groups.size() > 2) {
    throw DomainError("measure is defined for exactly 2 groups, found " +
                      std::to_string(groups.size()));
  }
  if (!has_protected) {
    throw DomainError("protected group '" + protected_group +
                      "' not present");
  }
}

}  // namespace

double OrderingUtility(std::span<const double> ranked_qualifications) {
  const auto n = static_cast<std::int64_t>(ranked_qualifications.size());
  if (n < 2) {
    throw DomainError("ordering utility needs at least 2 ranked personas");
  }
  std::vector<double> values(ranked_qualifications.begin(),
                             ranked_qualifications.end());
  std::vector<double> scratch(values.size());
  const std::int64_t inversions =
      CountAscendingPairs(values, scratch, 0, values.size());

  // values is now sorted descending; subtract tied pairs from all pairs.
  std::int64_t comparable = Choose2(n);
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    comparable -= Choose2(static_cast<std::int64_t>(j - i));
    i = j;
  }
  if (comparable == 0) return 1.0;
  return 1.0 - static_cast<double>(inversions) /
                   static_cast<double>(comparable);
}

double OrderingUtility(const RankingOutcome& outcome) {
  std::vector<double> q;
  q.reserve(outcome.ranked.size());
  for (const auto& p : outcome.ranked) q.push_back(p.qualification);
  return OrderingUtility(q);
}

double RawRepresentation(const std::vector<bool>& is_protected_by_rank) {
  const std::size_t n = is_protected_by_rank.size();
  if (n == 0) return 0.0;
  const double total = static_cast<double>(
      std::count(is_protected_by_rank.begin(), is_protected_by_rank.end(),
                 true));
  const double overall_share = total / static_cast<double>(n);
  double raw = 0.0;
  double in_prefix = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    in_prefix += is_protected_by_rank[k - 1] ? 1.0 : 0.0;
    const double share = in_prefix / static_cast<double>(k);
    raw += (share - overall_share) / std::log2(static_cast<double>(k + 1));
  }
  return raw;
}

double SignedRepresentation(const RankingOutcome& outcome,
                            const std::string& protected_group) {
  const std::size_t n = outcome.ranked.size();
  if (n < 2) {
    throw DomainError("signed representation needs at least 2 personas");
  }
  RequireTwoGroups(outcome.ranked, protected_group);

  std::vector<bool> flags(n);
  std::size_t protected_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    flags[i] = outcome.ranked[i].group == protected_group;
    protected_count += flags[i];
  }
  std::vector<bool> first(n, false), last(n, false);
  std::fill(first.begin(), first.begin() + protected_count, true);
  std::fill(last.end() - protected_count, last.end(), true);
  const double normalizer =
      std::max(std::abs(RawRepresentation(first)), std::abs(RawRepresentation(last)));
  if (normalizer == 0.0) return 0.0;
  return std::clamp(RawRepresentation(flags) / normalizer, -1.0, 1.0);
}

double SelectionUtility(const SelectionOutcome& outcome) {
  const std::size_t k = outcome.selected.size();
  if (k == 0) return 1.0;
  std::vector<double> all;
  all.reserve(k + outcome.rejected.size());
  double selected_sum = 0.0;
  for (const auto& p : outcome.selected) {
    all.push_back(p.qualification);
    selected_sum += p.qualification;
  }
  for (const auto& p : outcome.rejected) all.push_back(p.qualification);
  std::partial_sort(all.begin(), all.begin() + k, all.end(),
                    std::greater<>());
  const double best = std::accumulate(all.begin(), all.begin() + k, 0.0);
  if (best == 0.0) return 1.0;
  return std::clamp(selected_sum / best, 0.0, 1.0);
}

double ParityDifference(const SelectionOutcome& outcome,
                        const std::string& protected_group) {
  std::vector<Persona> everyone = outcome.selected;
  everyone.insert(everyone.end(), outcome.rejected.begin(),
                  outcome.rejected.end());
  RequireTwoGroups(everyone, protected_group);

  double selected_protected = 0, total_protected = 0;
  double selected_other = 0, total_other = 0;
  for (const auto& p : outcome.selected) {
    (p.group == protected_group ? selected_protected : selected_other) += 1;
  }
  for (const auto& p : everyone) {
    (p.group == protected_group ? total_protected : total_other) += 1;
  }
  if (total_protected == 0 || total_other == 0) {
    throw DomainError("parity difference needs both groups non-empty");
  }
  return selected_protected / total_protected - selected_other / total_other;
}

MeasureVector ComputeMeasureVector(const Outcome& outcome,
                                   const std::string& protected_group) {
  MeasureVector m;
  if (const auto* ranking = std::get_if<RankingOutcome>(&outcome)) {
    m.ordering_utility = OrderingUtility(*ranking);
    m.signed_representation = SignedRepresentation(*ranking, protected_group);
  } else {
    const auto& selection = std::get<SelectionOutcome>(outcome);
    m.selection_utility = SelectionUtility(selection);
    m.parity_difference = ParityDifference(selection, protected_group);
  }
  return m;
}

}  // namespace measures
}  // namespace fairceptron
