#ifndef FAIRCEPTRON_SCENARIO_H_
#define FAIRCEPTRON_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairceptron/measures.h"

namespace fairceptron {

enum class ScenarioType { kRanking, kClassification };

inline constexpr ScenarioType kScenarioTypes[] = {ScenarioType::kRanking,
                                                  ScenarioType::kClassification};

const char* ScenarioTypeName(ScenarioType type);
// Throws ValidationError for anything but "ranking" / "classification".
ScenarioType ParseScenarioType(const std::string& name);

struct GroupSelection {
  std::string group;
  int selected = 0;
  int rejected = 0;

  bool operator==(const GroupSelection&) const = default;
};

// One hypothetical decision outcome. For rankings `ranking_pattern` holds the
// group label at each rank and `qualifications` the score at each rank. For
// classifications `selection_pattern` holds per-group counts (groups sorted)
// and `qualifications` lists the selected personas then the rejected ones,
// each block in pattern group order, best first within a group.
struct Scenario {
  std::string id;
  ScenarioType type = ScenarioType::kRanking;
  std::vector<std::string> ranking_pattern;
  std::vector<GroupSelection> selection_pattern;
  std::vector<double> qualifications;
  MeasureVector measures;
  int cluster = -1;

  int SelectionSize() const;

  bool operator==(const Scenario&) const = default;
};

// Stable id derived from type, pattern and qualifications.
std::string ScenarioId(const Scenario& scenario);

// Personas of `roster` in group-internal merit order: best first, roster
// order on ties.
std::map<std::string, std::vector<Persona>> PersonasByGroup(
    const Roster& roster);

// Rebuilds the concrete outcome a scenario describes over `roster`.
measures::Outcome ScenarioOutcome(const Scenario& scenario,
                                  const Roster& roster);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_SCENARIO_H_
