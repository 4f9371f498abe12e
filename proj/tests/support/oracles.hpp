#pragma once

// Independent reference implementations used only by the tests. None of
// them share code with the library beyond the domain move generator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "heurlab/domain.hpp"

namespace heurlab::testing {

/// Shortest move count from `from` to any goal state, by breadth-first
/// search. nullopt when unreachable or when more than `cap` states are seen.
inline std::optional<int> bfs_distance(const PuzzleInstance& inst, const State& from,
                                       std::size_t cap = 1'000'000) {
  if (is_goal(from, inst)) return 0;
  std::unordered_set<std::string> seen{state_key(from)};
  std::deque<std::pair<State, int>> queue{{from, 0}};
  std::vector<Successor> next;
  while (!queue.empty()) {
    auto [s, d] = std::move(queue.front());
    queue.pop_front();
    successors(s, inst, next);
    for (auto& c : next) {
      if (!seen.insert(state_key(c.state)).second) continue;
      if (is_goal(c.state, inst)) return d + 1;
      if (seen.size() > cap) return std::nullopt;
      queue.emplace_back(std::move(c.state), d + 1);
    }
  }
  return std::nullopt;
}

inline std::optional<int> bfs_distance(const PuzzleInstance& inst, std::size_t cap = 1'000'000) {
  return bfs_distance(inst, inst.start, cap);
}

/// Number of states reachable from the start, capped.
inline std::size_t reachable_states(const PuzzleInstance& inst, std::size_t cap) {
  std::unordered_set<std::string> seen{state_key(inst.start)};
  std::deque<State> queue{inst.start};
  std::vector<Successor> next;
  while (!queue.empty() && seen.size() <= cap) {
    State s = std::move(queue.front());
    queue.pop_front();
    successors(s, inst, next);
    for (auto& c : next) {
      if (seen.insert(state_key(c.state)).second) queue.push_back(std::move(c.state));
    }
  }
  return seen.size();
}

/// Maze cell distances to the goal by a plain grid BFS that ignores the
/// library entirely.
inline std::vector<int> grid_bfs_from(const PuzzleInstance& maze, CellIndex source) {
  std::vector<int> dist(static_cast<std::size_t>(maze.cell_count()), -1);
  std::deque<CellIndex> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  const int dr[] = {-1, 1, 0, 0};
  const int dc[] = {0, 0, -1, 1};
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    const Cell at = maze.cell(c);
    for (int k = 0; k < 4; ++k) {
      const Cell n{at.row + dr[k], at.col + dc[k]};
      if (!maze.in_bounds(n)) continue;
      const CellIndex ni = maze.index(n);
      if (maze.is_wall(ni) || dist[static_cast<std::size_t>(ni)] >= 0) continue;
      dist[static_cast<std::size_t>(ni)] = dist[static_cast<std::size_t>(c)] + 1;
      queue.push_back(ni);
    }
  }
  return dist;
}

/// Minimum assignment cost over all n! permutations.
inline double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
  std::vector<std::size_t> perm(cost.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < perm.size(); ++r) total += cost[r][perm[r]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// 3x3 sliding-tile positions reachable from the canonical goal.
inline std::unordered_set<std::string> stp3_reachable_from_goal() {
  const PuzzleInstance goal = make_stp_instance(3, stp_goal_tiles(3));
  std::unordered_set<std::string> seen{state_key(goal.start)};
  std::deque<State> queue{goal.start};
  std::vector<Successor> next;
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    successors(s, goal, next);
    for (auto& c : next) {
      if (seen.insert(state_key(c.state)).second) queue.push_back(std::move(c.state));
    }
  }
  return seen;
}

/// Mean target of the k nearest rows (Euclidean, ties by row order), all
/// rows scanned. Rows and query are already standardized.
inline double brute_force_knn(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets,
                              const std::vector<double>& query, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) s += (rows[i][j] - query[j]) * (rows[i][j] - query[j]);
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) sum += targets[d[i].second];
  return sum / static_cast<double>(kk);
}

/// Total-variation distance between two distributions of equal support.
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace heurlab::testing
