#ifndef FAIRCEPTRON_GENERATOR_H_
#define FAIRCEPTRON_GENERATOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairceptron/measures.h"
#include "fairceptron/scenario.h"

namespace fairceptron {

struct GenerationConfig {
  Roster roster;
  bool rankings = true;
  bool classifications = true;
  // Selection sizes enumerated for classification scenarios.
  std::vector<int> selection_sizes;
  int cluster_count = 10;
  std::uint64_t cluster_seed = 42;
  std::uint64_t enumeration_cap = 1'000'000;

  std::vector<ScenarioType> EnabledTypes() const;
  void Validate() const;

  bool operator==(const GenerationConfig&) const = default;
};

// Ten applicants, five per group, all scores distinct and interleaved.
GenerationConfig DemoGenerationConfig();

struct ScenarioPool {
  inline static const std::string kFormatVersion = "1";

  GenerationConfig config;
  std::vector<Scenario> scenarios;
  // Per type: cluster index -> member scenario ids in pool order.
  std::map<ScenarioType, std::vector<std::vector<std::string>>> clusters;
  std::string version = kFormatVersion;

  const Scenario* Find(const std::string& id) const;
  std::size_t CountOf(ScenarioType type) const;

  bool operator==(const ScenarioPool&) const = default;
};

namespace generator {

// One scenario per distinct group interleaving, lexicographic by pattern.
// Throws DomainError when the multinomial count exceeds the cap.
std::vector<Scenario> EnumerateRankings(const GenerationConfig& config);

// One scenario per feasible per-group count vector for each selection size,
// ordered by size then lexicographically by count vector.
std::vector<Scenario> EnumerateSelections(const GenerationConfig& config);

// Fills `measures` (and `id`) for every scenario. Idempotent.
void AttachMeasures(std::vector<Scenario>& scenarios, const Roster& roster);

struct KMeansResult {
  std::vector<int> assignment;
  Eigen::MatrixX2d centroids;
  int iterations = 0;
};

// Seeded k-means++ / Lloyd on the rows of `points`, which the caller has
// already standardized. Every cluster ends up non-empty.
KMeansResult KMeans(const Eigen::MatrixX2d& points, int cluster_count,
                    std::uint64_t seed, int max_iterations = 100);

// Column-wise z-scores; constant columns become zero.
Eigen::MatrixX2d Standardize(const Eigen::MatrixX2d& points);

// Clusters every enabled type separately on its two measures.
ScenarioPool ClusterPool(std::vector<Scenario> scenarios,
                         const GenerationConfig& config);

// Enumerate, measure and cluster in one go.
ScenarioPool Generate(const GenerationConfig& config);

}  // namespace generator
}  // namespace fairceptron

#endif  // FAIRCEPTRON_GENERATOR_H_
