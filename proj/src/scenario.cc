#include "fairceptron/scenario.h"

#include <algorithm>

#include "fairceptron/errors.h"
#include "fairceptron/util.h"

namespace fairceptron {

const char* ScenarioTypeName(ScenarioType type) {
  return type == ScenarioType::kRanking ? "ranking" : "classification";
}

ScenarioType ParseScenarioType(const std::string& name) {
  if (name == "ranking") return ScenarioType::kRanking;
  if (name == "classification") return ScenarioType::kClassification;
  throw ValidationError("unknown scenario type '" + name + "'");
}

int Scenario::SelectionSize() const {
  int k = 0;
  for (const auto& g : selection_pattern) k += g.selected;
  return k;
}

std::string ScenarioId(const Scenario& scenario) {
  std::string canonical = ScenarioTypeName(scenario.type);
  canonical += '|';
  if (scenario.type == ScenarioType::kRanking) {
    for (const auto& g : scenario.ranking_pattern) canonical += g + ',';
  } else {
    for (const auto& g : scenario.selection_pattern) {
      canonical += g.group + ':' + std::to_string(g.selected) + '/' +
                   std::to_string(g.rejected) + ',';
    }
  }
  canonical += '|';
  for (const double q : scenario.qualifications) {
    canonical += FormatDouble(q) + ',';
  }
  const char prefix = scenario.type == ScenarioType::kRanking ? 'r' : 'c';
  return std::string(1, prefix) + Fnv1aHex(canonical);
}

std::map<std::string, std::vector<Persona>> PersonasByGroup(
    const Roster& roster) {
  std::map<std::string, std::vector<Persona>> by_group;
  for (const auto& p : roster.personas) by_group[p.group].push_back(p);
  for (auto& [group, members] : by_group) {
    std::stable_sort(members.begin(), members.end(),
                     [](const Persona& a, const Persona& b) {
                       return a.qualification > b.qualification;
                     });
  }
  return by_group;
}

measures::Outcome ScenarioOutcome(const Scenario& scenario,
                                  const Roster& roster) {
  auto by_group = PersonasByGroup(roster);
  if (scenario.type == ScenarioType::kRanking) {
    if (scenario.ranking_pattern.size() != roster.size()) {
      throw ValidationError("ranking pattern length " +
                            std::to_string(scenario.ranking_pattern.size()) +
                            " does not match roster size " +
                            std::to_string(roster.size()));
    }
    std::map<std::string, std::size_t> next;
    RankingOutcome outcome;
    for (const auto& group : scenario.ranking_pattern) {
      auto it = by_group.find(group);
      if (it == by_group.end() || next[group] >= it->second.size()) {
        throw ValidationError("ranking pattern over-uses group '" + group +
                              "'");
      }
      outcome.ranked.push_back(it->second[next[group]++]);
    }
    return outcome;
  }

  SelectionOutcome outcome;
  std::size_t covered = 0;
  for (const auto& g : scenario.selection_pattern) {
    auto it = by_group.find(g.group);
    if (it == by_group.end() || g.selected < 0 || g.rejected < 0 ||
        static_cast<std::size_t>(g.selected + g.rejected) !=
            it->second.size()) {
      throw ValidationError("selection counts for group '" + g.group +
                            "' do not match the roster");
    }
    const auto& members = it->second;
    outcome.selected.insert(outcome.selected.end(), members.begin(),
                            members.begin() + g.selected);
    outcome.rejected.insert(outcome.rejected.end(),
                            members.begin() + g.selected, members.end());
    covered += members.size();
  }
  if (covered != roster.size()) {
    throw ValidationError("selection pattern does not cover every group");
  }
  return outcome;
}

}  // namespace fairceptron
