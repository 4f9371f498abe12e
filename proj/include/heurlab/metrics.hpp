#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heurlab/domain.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

/// Quick-heuristic solve of one instance: S*, |pi*| and WT*.
struct ReferenceSolution {
  std::string instance_id;
  bool solved = false;
  std::int64_t s_star = 0;
  int plan_len_star = 0;
  double wall_time_star = 0.0;
};

/// What the metrics need from one evaluated search.
struct InstanceOutcome {
  std::string instance_id;
  bool solved = false;
  std::int64_t closed_length = 0;
  int path_length = 0;
  double wall_time = 0.0;
};

[[nodiscard]] InstanceOutcome outcome_of(const PuzzleInstance& instance, const SearchResult& result);

struct InstanceMetrics {
  std::string instance_id;
  bool solved = false;
  bool optimal = false;
  std::int64_t closed_length = 0;
  std::int64_t s_star = 0;
  int path_length = 0;
  int plan_len_star = 0;
  double wall_time = 0.0;
  double wall_time_star = 0.0;
  double ilr = 0.0;       ///< S* / S~ (solved rows)
  double swc_term = 0.0;  ///< |pi*| / |pi~|, 0 when unsolved
  double itr = 0.0;       ///< WT* / WT~ (solved rows)
  std::string error;      ///< nonempty rows are excluded from every aggregate
};

/// Means are NaN when their instance set is empty.
struct MetricsReport {
  double ilr_on_solved = 0.0;
  double ilr_on_optimal = 0.0;
  double swc = 0.0;
  double optimal_pct = 0.0;
  double itr_on_solved = 0.0;
  double itr_on_optimal = 0.0;
  int n_solved = 0;
  int n_optimal = 0;
  int n_total = 0;
  int n_errors = 0;
  std::vector<InstanceMetrics> rows;
};

/// Solves each instance with the quick heuristic. Instances not solved
/// within `limits` come back with solved = false.
[[nodiscard]] std::vector<ReferenceSolution> compute_references(std::span<const PuzzleInstance> instances,
                                                                const SearchLimits& limits = {}, int jobs = 0);

/// ILR-on-solved averages S*/S~ over solved instances, ILR-on-optimal over
/// those with |pi~| = |pi*|. SWC averages |pi*|/|pi~| over all instances with
/// unsolved ones contributing 0. ITR mirrors ILR with wall times.
/// Outcomes without a solved reference become error rows.
[[nodiscard]] MetricsReport compute_metrics(std::span<const InstanceOutcome> outcomes,
                                            std::span<const ReferenceSolution> references);

}  // namespace heurlab
