#include "heurlab/metrics.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// monotonic clocks can report 0 for sub-resolution solves
constexpr double kMinWallTime = 1e-9;

double ratio(double reference, double measured) {
  if (measured == 0.0) return reference == 0.0 ? 1.0 : reference / kMinWallTime;
  return reference / measured;
}

}  // namespace

InstanceOutcome outcome_of(const PuzzleInstance& instance, const SearchResult& result) {
  return {instance.id, result.solved(), result.closed_length, result.path_length, result.wall_time};
}

std::vector<ReferenceSolution> compute_references(std::span<const PuzzleInstance> instances,
                                                  const SearchLimits& limits, int jobs) {
  std::vector<ReferenceSolution> refs(instances.size());
  const QuickHeuristic quick;
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    const auto r = astar(instances[i], quick, limits);
    refs[i] = {instances[i].id, r.solved(), r.closed_length, r.path_length, r.wall_time};
  });
  return refs;
}

MetricsReport compute_metrics(std::span<const InstanceOutcome> outcomes,
                              std::span<const ReferenceSolution> references) {
  std::unordered_map<std::string, const ReferenceSolution*> by_id;
  for (const auto& r : references) by_id.emplace(r.instance_id, &r);

  MetricsReport report;
  double ilr_solved = 0, ilr_optimal = 0, swc = 0, itr_solved = 0, itr_optimal = 0;
  for (const auto& o : outcomes) {
    InstanceMetrics row;
    row.instance_id = o.instance_id;
    row.solved = o.solved;
    row.closed_length = o.closed_length;
    row.path_length = o.path_length;
    row.wall_time = std::max(o.wall_time, 0.0);
    const auto it = by_id.find(o.instance_id);
    if (it == by_id.end()) {
      row.error = "missing reference";
    } else if (!it->second->solved) {
      row.error = "reference unsolved";
    }
    if (!row.error.empty()) {
      ++report.n_errors;
      report.rows.push_back(std::move(row));
      continue;
    }
    const ReferenceSolution& ref = *it->second;
    row.s_star = ref.s_star;
    row.plan_len_star = ref.plan_len_star;
    row.wall_time_star = ref.wall_time_star;
    ++report.n_total;
    if (o.solved) {
      row.optimal = o.path_length == ref.plan_len_star;
      row.ilr = o.closed_length == 0 ? (ref.s_star == 0 ? 1.0 : static_cast<double>(ref.s_star))
                                     : static_cast<double>(ref.s_star) / static_cast<double>(o.closed_length);
      row.swc_term = o.path_length == 0 ? 1.0 : static_cast<double>(ref.plan_len_star) / o.path_length;
      row.itr = ratio(ref.wall_time_star, row.wall_time);
      ++report.n_solved;
      ilr_solved += row.ilr;
      itr_solved += row.itr;
      swc += row.swc_term;
      if (row.optimal) {
        ++report.n_optimal;
        ilr_optimal += row.ilr;
        itr_optimal += row.itr;
      }
    }
    report.rows.push_back(std::move(row));
  }
  auto mean = [](double sum, int n) { return n > 0 ? sum / n : kNaN; };
  report.ilr_on_solved = mean(ilr_solved, report.n_solved);
  report.itr_on_solved = mean(itr_solved, report.n_solved);
  report.ilr_on_optimal = mean(ilr_optimal, report.n_optimal);
  report.itr_on_optimal = mean(itr_optimal, report.n_optimal);
  report.swc = mean(swc, report.n_total);
  report.optimal_pct = report.n_total > 0 ? 100.0 * report.n_optimal / report.n_total : kNaN;
  return report;
}

}  // namespace heurlab
