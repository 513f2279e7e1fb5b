#ifndef FAIRCEPTRON_MEASURES_H_
#define FAIRCEPTRON_MEASURES_H_

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fairceptron {

struct Persona {
  std::string id;
  std::string group;
  double qualification = 0.0;

  bool operator==(const Persona&) const = default;
};

// A fixed set of personas with one group designated as protected. The
// protected group is the reference for the signed measures: positive values
// mean the protected group is favoured.
struct Roster {
  std::vector<Persona> personas;
  std::string protected_group;

  std::size_t size() const { return personas.size(); }

  // Distinct group labels in lexicographic order.
  std::vector<std::string> Groups() const;

  // Throws ValidationError if ids repeat, a qualification is negative or not
  // finite, fewer than two personas or groups exist, or the protected group
  // does not occur.
  void Validate() const;

  bool operator==(const Roster&) const = default;
};

struct RankingOutcome {
  std::vector<Persona> ranked;  // rank 1 first
};

struct SelectionOutcome {
  std::vector<Persona> selected;
  std::vector<Persona> rejected;

  std::size_t k() const { return selected.size(); }
};

// Only the two fields belonging to the scenario type are populated.
struct MeasureVector {
  std::optional<double> ordering_utility;       // rankings, [0, 1]
  std::optional<double> signed_representation;  // rankings, [-1, 1]
  std::optional<double> selection_utility;      // selections, [0, 1]
  std::optional<double> parity_difference;      // selections, [-1, 1]

  bool operator==(const MeasureVector&) const = default;
};

namespace measures {

// 1 - inversions / comparable pairs, where an inversion is a persona ranked
// above a strictly better qualified one and pairs with equal qualification
// are not comparable. 1.0 when nothing is comparable.
double OrderingUtility(const RankingOutcome& outcome);

// Same quantity from a bare score sequence in rank order.
double OrderingUtility(std::span<const double> ranked_qualifications);

// Discounted prefix over/under-representation of `protected_group`,
// normalized by the larger magnitude of the two extremal interleavings
// (protected block first, protected block last). Defined for two groups.
double SignedRepresentation(const RankingOutcome& outcome,
                            const std::string& protected_group);

// Unnormalized discounted prefix sum; exposed for tests and diagnostics.
double RawRepresentation(const std::vector<bool>& is_protected_by_rank);

// Qualification sum of the selected set relative to the best size-k set.
double SelectionUtility(const SelectionOutcome& outcome);

// Protected selection rate minus the other group's selection rate.
double ParityDifference(const SelectionOutcome& outcome,
                        const std::string& protected_group);

using Outcome = std::variant<RankingOutcome, SelectionOutcome>;

MeasureVector ComputeMeasureVector(const Outcome& outcome,
                                   const std::string& protected_group);

}  // namespace measures
}  // namespace fairceptron

#endif  // FAIRCEPTRON_MEASURES_H_
