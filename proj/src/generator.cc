#include "fairceptron/generator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fairceptron/errors.h"
#include "fairceptron/rng.h"

namespace fairceptron {

std::vector<ScenarioType> GenerationConfig::EnabledTypes() const {
  std::vector<ScenarioType> types;
  if (rankings) types.push_back(ScenarioType::kRanking);
  if (classifications) types.push_back(ScenarioType::kClassification);
  return types;
}

void GenerationConfig::Validate() const {
  roster.Validate();
  if (!rankings && !classifications) {
    throw ValidationError("no scenario type enabled");
  }
  if (classifications) {
    if (selection_sizes.empty()) {
      throw ValidationError("classification enabled without a selection size");
    }
    std::set<int> seen;
    for (const int k : selection_sizes) {
      if (k < 0 || static_cast<std::size_t>(k) > roster.size()) {
        throw DomainError("selection size " + std::to_string(k) +
                          " outside [0, " + std::to_string(roster.size()) +
                          "]");
      }
      if (!seen.insert(k).second) {
        throw ValidationError("selection size " + std::to_string(k) +
                              " listed twice");
      }
    }
  }
  if (cluster_count < 1) throw ValidationError("cluster_count must be >= 1");
}

GenerationConfig DemoGenerationConfig() {
  GenerationConfig config;
  const double female[] = {10, 8, 6, 4, 2};
  const double male[] = {9, 7, 5, 3, 1};
  for (int i = 0; i < 5; ++i) {
    config.roster.personas.push_back(
        {"F" + std::to_string(i + 1), "F", female[i]});
  }
  for (int i = 0; i < 5; ++i) {
    config.roster.personas.push_back(
        {"M" + std::to_string(i + 1), "M", male[i]});
  }
  config.roster.protected_group = "F";
  config.selection_sizes = {3, 4, 5, 6, 7};
  return config;
}

const Scenario* ScenarioPool::Find(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::size_t ScenarioPool::CountOf(ScenarioType type) const {
  return std::count_if(scenarios.begin(), scenarios.end(),
                       [type](const Scenario& s) { return s.type == type; });
}

namespace generator {
namespace {

// n! / prod(n_g!) in floating point, enough to compare against the cap.
double MultinomialCount(const std::map<std::string, std::vector<Persona>>& g) {
  double log_count = 0;
  std::size_t n = 0;
  for (const auto& [group, members] : g) {
    n += members.size();
    log_count -= std::lgamma(static_cast<double>(members.size()) + 1);
  }
  log_count += std::lgamma(static_cast<double>(n) + 1);
  return std::round(std::exp(log_count));
}

void FillQualifications(Scenario& s, const Roster& roster) {
  const auto outcome = ScenarioOutcome(s, roster);
  s.qualifications.clear();
  if (const auto* r = std::get_if<RankingOutcome>(&outcome)) {
    for (const auto& p : r->ranked) s.qualifications.push_back(p.qualification);
  } else {
    const auto& sel = std::get<SelectionOutcome>(outcome);
    for (const auto& p : sel.selected) {
      s.qualifications.push_back(p.qualification);
    }
    for (const auto& p : sel.rejected) {
      s.qualifications.push_back(p.qualification);
    }
  }
  s.id = ScenarioId(s);
}

double SquaredDistance(const Eigen::MatrixX2d& points, Eigen::Index row,
                       const Eigen::MatrixX2d& centroids, Eigen::Index c) {
  return (points.row(row) - centroids.row(c)).squaredNorm();
}

std::vector<int> NearestCentroid(const Eigen::MatrixX2d& points,
                                 const Eigen::MatrixX2d& centroids) {
  std::vector<int> assignment(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = SquaredDistance(points, i, centroids, c);
      if (d < best_distance) {
        best_distance = d;
        best = static_cast<int>(c);
      }
    }
    assignment[i] = best;
  }
  return assignment;
}

// Moves the point farthest from its centroid in the largest cluster into
// each empty cluster, which then sits on that point.
void RepairEmptyClusters(const Eigen::MatrixX2d& points,
                         Eigen::MatrixX2d& centroids,
                         std::vector<int>& assignment) {
  const int k = static_cast<int>(centroids.rows());
  while (true) {
    std::vector<int> sizes(k, 0);
    for (const int a : assignment) ++sizes[a];
    const auto empty = std::find(sizes.begin(), sizes.end(), 0);
    if (empty == sizes.end()) return;
    const int target = static_cast<int>(empty - sizes.begin());
    const int largest = static_cast<int>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    Eigen::Index farthest = -1;
    double farthest_distance = -1;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (assignment[i] != largest) continue;
      const double d = SquaredDistance(points, i, centroids, largest);
      if (d > farthest_distance) {
        farthest_distance = d;
        farthest = i;
      }
    }
    assignment[farthest] = target;
    centroids.row(target) = points.row(farthest);
  }
}

Eigen::MatrixX2d InitialCentroids(const Eigen::MatrixX2d& points, int k,
                                  Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixX2d centroids(k, 2);
  std::vector<bool> chosen(n, false);
  Eigen::Index first = static_cast<Eigen::Index>(rng.UniformIndex(n));
  centroids.row(0) = points.row(first);
  chosen[first] = true;

  Eigen::VectorXd nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    nearest[i] = SquaredDistance(points, i, centroids, 0);
  }
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = -1;
    if (total > 0) {
      const double target = rng.Uniform01() * total;
      double cumulative = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (nearest[i] <= 0) continue;
        cumulative += nearest[i];
        pick = i;
        if (cumulative > target) break;
      }
    } else {
      // Every point coincides with a centroid: pick any unused point.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[rng.UniformIndex(unused.size())];
    }
    chosen[pick] = true;
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(points, i, centroids, c));
    }
  }
  return centroids;
}

Eigen::MatrixX2d ClusterMeans(const Eigen::MatrixX2d& points,
                              const std::vector<int>& assignment,
                              const Eigen::MatrixX2d& previous) {
  Eigen::MatrixX2d sums = Eigen::MatrixX2d::Zero(previous.rows(), 2);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(previous.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(assignment[i]) += points.row(i);
    counts[assignment[i]] += 1;
  }
  Eigen::MatrixX2d means = previous;
  for (Eigen::Index c = 0; c < previous.rows(); ++c) {
    if (counts[c] > 0) means.row(c) = sums.row(c) / counts[c];
  }
  return means;
}

}  // namespace

std::vector<Scenario> EnumerateRankings(const GenerationConfig& config) {
  const Roster& roster = config.roster;
  roster.Validate();
  const auto by_group = PersonasByGroup(roster);
  const double count = MultinomialCount(by_group);
  if (count > static_cast<double>(config.enumeration_cap)) {
    throw DomainError("ranking space of " + std::to_string(count) +
                      " patterns exceeds the enumeration cap of " +
                      std::to_string(config.enumeration_cap));
  }

  std::vector<std::string> pattern;
  for (const auto& [group, members] : by_group) {
    pattern.insert(pattern.end(), members.size(), group);
  }
  // by_group iterates in sorted order, so `pattern` starts lexicographically
  // smallest and next_permutation walks distinct multiset permutations.
  std::vector<Scenario> scenarios;
  scenarios.reserve(static_cast<std::size_t>(count));
  do {
    Scenario s;
    s.type = ScenarioType::kRanking;
    s.ranking_pattern = pattern;
    FillQualifications(s, roster);
    scenarios.push_back(std::move(s));
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  return scenarios;
}

std::vector<Scenario> EnumerateSelections(const GenerationConfig& config) {
  const Roster& roster = config.roster;
  roster.Validate();
  const auto by_group = PersonasByGroup(roster);
  std::vector<std::string> groups;
  std::vector<int> caps;
  for (const auto& [group, members] : by_group) {
    groups.push_back(group);
    caps.push_back(static_cast<int>(members.size()));
  }

  std::vector<int> sizes = config.selection_sizes;
  std::sort(sizes.begin(), sizes.end());
  std::vector<Scenario> scenarios;
  for (const int k : sizes) {
    if (k < 0 || static_cast<std::size_t>(k) > roster.size()) {
      throw DomainError("selection size " + std::to_string(k) +
                        " is infeasible for a roster of " +
                        std::to_string(roster.size()));
    }
    // Odometer over count vectors in lexicographic order; the last group
    // takes whatever remains.
    std::vector<int> counts(groups.size(), 0);
    while (true) {
      const int head = std::accumulate(counts.begin(), counts.end() - 1, 0);
      const int rest = k - head;
      if (rest >= 0 && rest <= caps.back()) {
        counts.back() = rest;
        Scenario s;
        s.type = ScenarioType::kClassification;
        for (std::size_t g = 0; g < groups.size(); ++g) {
          s.selection_pattern.push_back(
              {groups[g], counts[g], caps[g] - counts[g]});
        }
        FillQualifications(s, roster);
        scenarios.push_back(std::move(s));
        if (scenarios.size() > config.enumeration_cap) {
          throw DomainError("selection space exceeds the enumeration cap of " +
                            std::to_string(config.enumeration_cap));
        }
      }
      counts.back() = 0;
      std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(groups.size()) - 2;
      while (pos >= 0 && counts[pos] == caps[pos]) counts[pos--] = 0;
      if (pos < 0) break;
      ++counts[pos];
    }
  }
  return scenarios;
}

void AttachMeasures(std::vector<Scenario>& scenarios, const Roster& roster) {
  for (auto& s : scenarios) {
    s.measures = measures::ComputeMeasureVector(ScenarioOutcome(s, roster),
                                                roster.protected_group);
    s.id = ScenarioId(s);
  }
}

Eigen::MatrixX2d Standardize(const Eigen::MatrixX2d& points) {
  Eigen::MatrixX2d z = points;
  if (points.rows() == 0) return z;
  for (Eigen::Index c = 0; c < 2; ++c) {
    const double mean = points.col(c).mean();
    const double variance =
        (points.col(c).array() - mean).square().sum() / points.rows();
    const double sd = std::sqrt(variance);
    if (sd > 0) {
      z.col(c) = (points.col(c).array() - mean) / sd;
    } else {
      z.col(c).setZero();
    }
  }
  return z;
}

KMeansResult KMeans(const Eigen::MatrixX2d& points, int cluster_count,
                    std::uint64_t seed, int max_iterations) {
  if (cluster_count < 1 || cluster_count > points.rows()) {
    throw DomainError("cluster_count " + std::to_string(cluster_count) +
                      " outside [1, " + std::to_string(points.rows()) + "]");
  }
  Rng rng(seed);
  KMeansResult result;
  result.centroids = InitialCentroids(points, cluster_count, rng);

  std::vector<int> previous;
  for (int it = 0; it < max_iterations; ++it) {
    result.iterations = it + 1;
    auto assignment = NearestCentroid(points, result.centroids);
    RepairEmptyClusters(points, result.centroids, assignment);
    result.centroids = ClusterMeans(points, assignment, result.centroids);
    if (assignment == previous) break;
    previous = std::move(assignment);
  }
  result.assignment = NearestCentroid(points, result.centroids);
  RepairEmptyClusters(points, result.centroids, result.assignment);
  return result;
}

ScenarioPool ClusterPool(std::vector<Scenario> scenarios,
                         const GenerationConfig& config) {
  ScenarioPool pool;
  pool.config = config;
  for (const ScenarioType type : config.EnabledTypes()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      if (scenarios[i].type == type) members.push_back(i);
    }
    if (static_cast<std::size_t>(config.cluster_count) > members.size()) {
      throw DomainError("cluster_count " +
                        std::to_string(config.cluster_count) + " exceeds the " +
                        std::to_string(members.size()) + " " +
                        ScenarioTypeName(type) + " scenarios");
    }
    Eigen::MatrixX2d points(members.size(), 2);
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& m = scenarios[members[r]].measures;
      if (type == ScenarioType::kRanking) {
        points(r, 0) = m.ordering_utility.value();
        points(r, 1) = m.signed_representation.value();
      } else {
        points(r, 0) = m.selection_utility.value();
        points(r, 1) = m.parity_difference.value();
      }
    }
    const auto result = KMeans(Standardize(points), config.cluster_count,
                               config.cluster_seed);
    auto& clusters = pool.clusters[type];
    clusters.assign(config.cluster_count, {});
    for (std::size_t r = 0; r < members.size(); ++r) {
      auto& s = scenarios[members[r]];
      s.cluster = result.assignment[r];
      clusters[s.cluster].push_back(s.id);
    }
  }
  pool.scenarios = std::move(scenarios);
  return pool;
}

ScenarioPool Generate(const GenerationConfig& config) {
  config.Validate();
  std::vector<Scenario> scenarios;
  if (config.rankings) scenarios = EnumerateRankings(config);
  if (config.classifications) {
    auto selections = EnumerateSelections(config);
    scenarios.insert(scenarios.end(),
                     std::make_move_iterator(selections.begin()),
                     std::make_move_iterator(selections.end()));
  }
  AttachMeasures(scenarios, config.roster);
  return ClusterPool(std::move(scenarios), config);
}

}  // namespace generator
}  // namespace fairceptron
