#include "heurlab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "heurlab/ascii.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Per-instance sampling shares this shape: one derived seed per instance id,
// results concatenated in pool order.
template <typename PerGroup>
std::vector<std::size_t> per_instance(std::span<const TrainingExample> pool, std::uint64_t seed, int jobs,
                                      PerGroup&& body) {
  const auto groups = group_by_instance(pool);
  std::vector<std::vector<std::size_t>> chosen(groups.size());
  parallel_for(groups.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, pool[groups[i].front()].instance_id));
    chosen[i] = body(groups[i], rng);
  });
  std::vector<std::size_t> out;
  for (auto& c : chosen) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> uniform_subset(std::span<const std::size_t> items, std::size_t m, Rng& rng) {
  std::vector<std::size_t> out;
  std::sample(items.begin(), items.end(), std::back_inserter(out), m, rng);
  return out;
}

std::vector<std::size_t> planner_aware_in_group(std::span<const TrainingExample> pool,
                                                std::span<const std::size_t> group, std::size_t m, double tau,
                                                UtilityVariant variant, Rng& rng) {
  std::vector<double> logits;
  logits.reserve(group.size());
  for (std::size_t idx : group) logits.push_back(utility(pool[idx].g, pool[idx].plan_len, variant) / tau);
  const auto probs = softmax(logits);
  std::vector<std::size_t> out;
  for (std::size_t pos : weighted_draw_without_replacement(probs, m, rng)) out.push_back(group[pos]);
  return out;
}

std::vector<std::size_t> trim_to_budget(std::vector<std::size_t> indices, std::size_t budget, std::uint64_t seed) {
  if (indices.size() <= budget) return indices;
  Rng rng(derive_seed(seed, "trim"));
  std::vector<std::size_t> out;
  std::sample(indices.begin(), indices.end(), std::back_inserter(out), budget, rng);
  return out;
}

std::vector<std::vector<double>> standardized_features(std::span<const TrainingExample> pool) {
  const std::size_t dims = pool.empty() ? 0 : pool.front().features.size();
  std::vector<double> mean(dims, 0.0), sd(dims, 0.0);
  for (const auto& e : pool) {
    if (e.features.size() != dims) throw InputError("feature vectors in the pool differ in length");
    for (std::size_t d = 0; d < dims; ++d) mean[d] += e.features[d];
  }
  for (double& m : mean) m /= static_cast<double>(pool.size());
  for (const auto& e : pool) {
    for (std::size_t d = 0; d < dims; ++d) sd[d] += (e.features[d] - mean[d]) * (e.features[d] - mean[d]);
  }
  for (double& s : sd) s = std::sqrt(s / static_cast<double>(pool.size()));
  std::vector<std::vector<double>> out(pool.size(), std::vector<double>(dims));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      out[i][d] = sd[d] > 0.0 ? (pool[i].features[d] - mean[d]) / sd[d] : 0.0;
    }
  }
  return out;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    dot += a[d] * b[d];
    na += a[d] * a[d];
    nb += b[d] * b[d];
  }
  if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

// Lloyd iterations from a k-means++ start. Returns the cluster of each point.
std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k, int iterations, Rng& rng,
                        std::vector<std::vector<double>>& centroids) {
  const std::size_t n = points.size();
  centroids.clear();
  centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points[i], centroids[0]);
  while (static_cast<int>(centroids.size()) < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    if (total <= 0.0) break;  // fewer distinct points than clusters
    std::discrete_distribution<std::size_t> pick(nearest.begin(), nearest.end());
    centroids.push_back(points[pick(rng)]);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
  }
  std::vector<int> assign(n, -1);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(centroids.size(), std::vector<double>(points.front().size(), 0.0));
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[static_cast<std::size_t>(assign[i])];
      for (std::size_t d = 0; d < points[i].size(); ++d) sums[static_cast<std::size_t>(assign[i])][d] += points[i][d];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
      centroids[c] = std::move(sums[c]);
    }
  }
  return assign;
}

std::string format_heuristic(double h) {
  if (h == std::floor(h) && std::abs(h) < 1e15) return std::to_string(static_cast<long long>(h));
  std::ostringstream out;
  out.precision(17);
  out << h;
  return out.str();
}

std::vector<CellIndex> parse_digits(std::string_view line) {
  std::vector<CellIndex> out;
  std::istringstream in{std::string(line)};
  int v = 0;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

ExtractedPool extract_pool(std::span<const PuzzleInstance> instances, std::span<const SearchResult> results,
                           int jobs) {
  if (instances.size() != results.size()) throw InputError("extract_pool needs one result per instance");
  std::vector<std::vector<TrainingExample>> per(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto& res = results[i];
    if (!res.solved()) return;
    const int plan = res.path_length;
    for (int j = 0; j < plan; ++j) {
      const State& s = res.path[static_cast<std::size_t>(j)];
      TrainingExample e;
      e.instance_id = inst.id;
      e.domain = inst.domain;
      e.state_key = state_key(s);
      e.ascii = render_ascii(inst, s);
      e.quick_h = quick_heuristic(s, inst);
      e.g = j;
      e.plan_len = plan;
      e.d_star = static_cast<double>(plan - j) - e.quick_h;
      e.section = section_of(j, plan);
      e.features = feature_vector(s, inst);
      per[i].push_back(std::move(e));
    }
  });
  ExtractedPool pool;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!results[i].solved()) {
      ++pool.skipped_unsolved;
      continue;
    }
    ++pool.instances_used;
    for (auto& e : per[i]) pool.examples.push_back(std::move(e));
  }
  return pool;
}

ExtractedPool solve_and_extract(std::span<const PuzzleInstance> instances, const SearchLimits& limits, int jobs) {
  std::vector<SearchResult> results(instances.size());
  const QuickHeuristic quick;
  parallel_for(instances.size(), jobs, [&](std::size_t i) { results[i] = astar(instances[i], quick, limits); });
  return extract_pool(instances, results, jobs);
}

std::string_view utility_name(UtilityVariant variant) noexcept {
  switch (variant) {
    case UtilityVariant::LogRatio: return "log_ratio";
    case UtilityVariant::Ratio: return "ratio";
    case UtilityVariant::LinearDepth: return "linear_depth";
  }
  return "unknown";
}

UtilityVariant parse_utility(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "log_ratio" || n == "log-ratio" || n == "log") return UtilityVariant::LogRatio;
  if (n == "ratio") return UtilityVariant::Ratio;
  if (n == "linear_depth" || n == "linear-depth" || n == "linear") return UtilityVariant::LinearDepth;
  throw InputError("unknown C variant '" + std::string(name) + "' (expected log_ratio, ratio or linear_depth)");
}

double utility(int g, int plan_len, UtilityVariant variant) {
  if (g < 0 || plan_len < 1) throw InputError("utility needs g >= 0 and plan_len >= 1");
  if (g >= plan_len) throw std::domain_error("C(n) is undefined at the goal (g >= plan_len)");
  const double L = plan_len;
  switch (variant) {
    case UtilityVariant::LogRatio: return std::log(L / (L - g));
    case UtilityVariant::Ratio: return L / (L - g);
    case UtilityVariant::LinearDepth: return g / L;
  }
  throw InputError("unknown C variant");
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out;
  out.reserve(logits.size());
  double total = 0.0;
  for (double l : logits) {
    out.push_back(std::exp(l - top));
    total += out.back();
  }
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> planner_aware_probabilities(std::span<const int> depths, int plan_len, double tau,
                                                UtilityVariant variant) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  std::vector<double> logits;
  for (int g : depths) logits.push_back(utility(g, plan_len, variant) / tau);
  return softmax(logits);
}

std::vector<std::size_t> weighted_draw_without_replacement(std::span<const double> weights, std::size_t m, Rng& rng) {
  std::vector<double> w(weights.begin(), weights.end());
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("sampling weights must be finite and nonnegative");
  }
  m = std::min(m, w.size());
  std::vector<std::size_t> out;
  out.reserve(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.size() < m) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::size_t pick = w.size();
    if (total > 0.0) {
      double r = unit(rng) * total;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        pick = i;
        if (r < w[i]) break;
        r -= w[i];
      }
    } else {
      // only zero weights remain: fall back to uniform over the rest
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::find(out.begin(), out.end(), i) == out.end()) rest.push_back(i);
      }
      pick = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
    }
    out.push_back(pick);
    w[pick] = 0.0;
  }
  return out;
}

std::vector<std::vector<std::size_t>> group_by_instance(std::span<const TrainingExample> pool) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (groups.empty() || pool[groups.back().front()].instance_id != pool[i].instance_id) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

std::vector<std::size_t> sample_planner_aware(std::span<const TrainingExample> pool, std::size_t m, double tau,
                                              UtilityVariant variant, std::uint64_t seed, int jobs) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  return per_instance(pool, seed, jobs, [&](const std::vector<std::size_t>& group, Rng& rng) {
    return planner_aware_in_group(pool, group, m, tau, variant, rng);
  });
}

std::vector<std::size_t> sample_uniform(std::span<const TrainingExample> pool, std::size_t m, std::uint64_t seed,
                                        int jobs) {
  return per_instance(pool, seed, jobs,
                      [&](const std::vector<std::size_t>& group, Rng& rng) { return uniform_subset(group, m, rng); });
}

std::vector<std::size_t> combine_sets(std::span<const std::size_t> s1, std::span<const std::size_t> s2, std::size_t m,
                                      Rng& rng) {
  std::vector<std::size_t> items;
  std::vector<double> weights;
  for (std::size_t x : s1) {
    if (std::find(items.begin(), items.end(), x) != items.end()) continue;
    items.push_back(x);
    weights.push_back(std::find(s2.begin(), s2.end(), x) != s2.end() ? 2.0 : 1.0);
  }
  for (std::size_t x : s2) {
    if (std::find(items.begin(), items.end(), x) != items.end()) continue;
    items.push_back(x);
    weights.push_back(1.0);
  }
  std::vector<std::size_t> out;
  for (std::size_t pos : weighted_draw_without_replacement(weights, m, rng)) out.push_back(items[pos]);
  return out;
}

std::vector<std::size_t> combine_with_baseline(std::span<const TrainingExample> pool, std::size_t m,
                                               std::span<const std::size_t> baseline, double tau,
                                               UtilityVariant variant, std::uint64_t seed, int jobs) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  std::vector<std::uint8_t> in_baseline(pool.size(), 0);
  for (std::size_t i : baseline) in_baseline.at(i) = 1;
  return per_instance(pool, seed, jobs, [&](const std::vector<std::size_t>& group, Rng& rng) {
    std::vector<std::size_t> s1;
    if (baseline.empty()) {
      s1 = uniform_subset(group, m, rng);
    } else {
      for (std::size_t i : group) {
        if (in_baseline[i]) s1.push_back(i);
      }
    }
    const auto s2 = planner_aware_in_group(pool, group, m, tau, variant, rng);
    return combine_sets(s1, s2, m, rng);
  });
}

SemDedupResult semdedup_select(std::span<const TrainingExample> pool, const SemDedupOptions& options) {
  SemDedupResult result;
  result.threshold_used = options.threshold;
  if (pool.empty()) return result;
  if (options.budget >= pool.size()) {
    result.budget_exceeds_pool = options.budget > pool.size();
    result.selected.resize(pool.size());
    std::iota(result.selected.begin(), result.selected.end(), std::size_t{0});
    result.survivors = pool.size();
    return result;
  }
  const auto points = standardized_features(pool);
  const int k = std::clamp(options.clusters.value_or(static_cast<int>((pool.size() + 199) / 200)), 1,
                           static_cast<int>(pool.size()));
  Rng rng(derive_seed(options.seed, "semdedup"));
  std::vector<std::vector<double>> centroids;
  const auto assign = kmeans(points, k, options.kmeans_iterations, rng, centroids);

  // Members of each cluster, farthest from the centroid first.
  std::vector<std::vector<std::size_t>> members(centroids.size());
  for (std::size_t i = 0; i < pool.size(); ++i) members[static_cast<std::size_t>(assign[i])].push_back(i);
  for (std::size_t c = 0; c < members.size(); ++c) {
    std::vector<double> dist(pool.size());
    for (std::size_t i : members[c]) dist[i] = squared_distance(points[i], centroids[c]);
    std::stable_sort(members[c].begin(), members[c].end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  }

  auto dedup = [&](double threshold) {
    std::vector<std::size_t> kept_all;
    for (const auto& cluster : members) {
      std::vector<std::size_t> kept;
      for (std::size_t i : cluster) {
        const bool duplicate = std::any_of(kept.begin(), kept.end(),
                                           [&](std::size_t j) { return cosine(points[i], points[j]) > threshold; });
        if (!duplicate) kept.push_back(i);
      }
      kept_all.insert(kept_all.end(), kept.begin(), kept.end());
    }
    std::sort(kept_all.begin(), kept_all.end());
    return kept_all;
  };

  double threshold = options.threshold;
  auto kept = dedup(threshold);
  // Integer steps avoid drift from repeated += 0.01.
  for (int step = 1; kept.size() < options.budget && threshold < 1.0; ++step) {
    threshold = std::min(1.0, options.threshold + 0.01 * step);
    kept = dedup(threshold);
  }
  result.threshold_used = threshold;
  result.survivors = kept.size();
  result.selected = trim_to_budget(std::move(kept), options.budget, options.seed);
  std::sort(result.selected.begin(), result.selected.end());
  return result;
}

std::string_view section_split_name(SectionSplit split) noexcept {
  switch (split) {
    case SectionSplit::Initial: return "Initial";
    case SectionSplit::Middle: return "Middle";
    case SectionSplit::End: return "End";
    case SectionSplit::All: return "All";
    case SectionSplit::NotInitial: return "~Initial";
    case SectionSplit::NotMiddle: return "~Middle";
    case SectionSplit::NotEnd: return "~End";
  }
  return "unknown";
}

SectionSplit parse_section_split(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "initial") return SectionSplit::Initial;
  if (n == "middle") return SectionSplit::Middle;
  if (n == "end") return SectionSplit::End;
  if (n == "all") return SectionSplit::All;
  if (n == "~initial" || n == "not-initial" || n == "not_initial") return SectionSplit::NotInitial;
  if (n == "~middle" || n == "not-middle" || n == "not_middle") return SectionSplit::NotMiddle;
  if (n == "~end" || n == "not-end" || n == "not_end") return SectionSplit::NotEnd;
  throw InputError("unknown section split '" + std::string(name) + "'");
}

bool split_contains(SectionSplit split, Section section) noexcept {
  switch (split) {
    case SectionSplit::Initial: return section == Section::Initial;
    case SectionSplit::Middle: return section == Section::Middle;
    case SectionSplit::End: return section == Section::End;
    case SectionSplit::All: return true;
    case SectionSplit::NotInitial: return section != Section::Initial;
    case SectionSplit::NotMiddle: return section != Section::Middle;
    case SectionSplit::NotEnd: return section != Section::End;
  }
  return false;
}

std::vector<std::size_t> build_section_split(std::span<const TrainingExample> pool, SectionSplit split,
                                             std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (split_contains(split, pool[i].section)) eligible.push_back(i);
  }
  if (eligible.size() < size) {
    throw InputError("split " + std::string(section_split_name(split)) + " needs " + std::to_string(size) +
                     " examples but only " + std::to_string(eligible.size()) + " exist (short by " +
                     std::to_string(size - eligible.size()) + ")");
  }
  Rng rng(derive_seed(seed, section_split_name(split)));
  return uniform_subset(eligible, size, rng);
}

std::string_view strategy_name(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Full: return "full";
    case Strategy::Uniform: return "uniform";
    case Strategy::PlannerAware: return "planner_aware";
    case Strategy::SemDedup: return "semdedup";
    case Strategy::Combined: return "combined";
    case Strategy::SectionSplit: return "section_split";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  std::string n = lowercase(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "full") return Strategy::Full;
  if (n == "uniform") return Strategy::Uniform;
  if (n == "planner_aware") return Strategy::PlannerAware;
  if (n == "semdedup") return Strategy::SemDedup;
  if (n == "combined") return Strategy::Combined;
  if (n == "section_split") return Strategy::SectionSplit;
  throw InputError("unknown strategy '" + std::string(name) +
                   "' (expected full, uniform, planner_aware, semdedup, combined or section_split)");
}

std::string strategy_label(Strategy strategy, double tau) {
  const std::string t = format_number(tau, tau == std::floor(tau) ? 0 : 2);
  switch (strategy) {
    case Strategy::Full: return "Full-data";
    case Strategy::Uniform: return "U(n)";
    case Strategy::PlannerAware: return "D(n," + t + ")";
    case Strategy::SemDedup: return "SD";
    case Strategy::Combined: return "SD+D(n," + t + ")";
    case Strategy::SectionSplit: return "Section";
  }
  return "unknown";
}

void SamplingSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("tau must be positive");
  if (strategy != Strategy::Full && budget == 0) throw InputError("budget must be positive");
  if (per_problem_m && *per_problem_m == 0) throw InputError("per-problem m must be positive");
  if (clusters && *clusters < 1) throw InputError("cluster count must be positive");
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw InputError("similarity threshold must lie in [-1, 1]");
}

Selection select_examples(std::span<const TrainingExample> pool, const SamplingSpec& spec, int jobs) {
  spec.validate();
  Selection sel;
  if (pool.empty()) throw InputError("cannot sample from an empty pool");
  if (spec.strategy != Strategy::Full && spec.budget > pool.size()) {
    sel.notes.push_back("budget " + std::to_string(spec.budget) + " exceeds pool size " +
                        std::to_string(pool.size()) + "; taking every example");
  }
  const std::size_t n_instances = group_by_instance(pool).size();
  const std::size_t m = spec.per_problem_m.value_or((spec.budget + n_instances - 1) / n_instances);

  auto semdedup = [&] {
    SemDedupOptions o;
    o.budget = spec.budget;
    o.clusters = spec.clusters;
    o.threshold = spec.threshold;
    o.seed = spec.seed;
    auto r = semdedup_select(pool, o);
    if (r.threshold_used != spec.threshold) {
      sel.notes.push_back("similarity threshold raised to " + format_number(r.threshold_used, 2) +
                          " to reach the budget");
    }
    return r.selected;
  };

  std::vector<std::size_t> chosen;
  switch (spec.strategy) {
    case Strategy::Full:
      chosen.resize(pool.size());
      std::iota(chosen.begin(), chosen.end(), std::size_t{0});
      sel.indices = std::move(chosen);
      return sel;
    case Strategy::Uniform: chosen = sample_uniform(pool, m, spec.seed, jobs); break;
    case Strategy::PlannerAware: chosen = sample_planner_aware(pool, m, spec.tau, spec.c_variant, spec.seed, jobs); break;
    case Strategy::SemDedup: chosen = semdedup(); break;
    case Strategy::Combined: {
      const auto baseline = semdedup();
      chosen = combine_with_baseline(pool, m, baseline, spec.tau, spec.c_variant, derive_seed(spec.seed, "combine"),
                                     jobs);
      break;
    }
    case Strategy::SectionSplit:
      chosen = build_section_split(pool, spec.section, std::min(spec.budget, pool.size()), spec.seed);
      break;
  }
  chosen = trim_to_budget(std::move(chosen), spec.budget, spec.seed);
  std::sort(chosen.begin(), chosen.end());
  sel.indices = std::move(chosen);
  return sel;
}

std::string to_hex(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xf]);
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw InputError("hex string has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InputError(std::string("bad hex digit '") + c + "'");
  };
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return out;
}

std::string render_prompt(const TrainingExample& example, std::uint64_t symbol_seed) {
  std::string legend_text(legend(example.domain));
  std::string puzzle = example.ascii;
  if (example.domain == Domain::Stp) {
    std::istringstream lines(example.ascii);
    std::string row, goal_row;
    std::getline(lines, row);
    std::getline(lines, goal_row);
    const auto tiles = parse_digits(row);
    const auto width = static_cast<int>(std::lround(std::sqrt(static_cast<double>(tiles.size()))));
    const auto goal = goal_row.empty() ? stp_goal_tiles(width) : parse_digits(goal_row);
    const auto table = make_symbol_table(width, derive_seed(symbol_seed, example.instance_id));
    puzzle = table.render(tiles);
    legend_text = "goal = \"" + table.render(goal) + "\", " + legend_text;
  } else if (!puzzle.empty() && puzzle.back() == '\n') {
    puzzle.pop_back();
  }
  std::string out =
      "import torch\n"
      "def get_improved_heuristic(heuristic: int, difference: int):\n"
      "    '''\n"
      "        A function that takes in the admissible A* heuristic and adds to it the difference, to return a "
      "heuristic closer to the optimal cost to the goal. The difference should be calculated keeping in mind the "
      "optimal cost of the puzzle.\n"
      "    '''\n"
      "    return heuristic + difference\n"
      "\n"
      "# The difference is calculated by observing the ";
  out += domain_name(example.domain);
  out += " puzzle and deducing the optimal cost to goal. The heuristic is subtracted from this optimal cost\n# ";
  out += legend_text;
  out += "\npuzzle_str = \"";
  out += puzzle;
  out += "\"\nimproved_heuristic = get_improved_heuristic(";
  out += format_heuristic(example.quick_h);
  out += ",";
  return out;
}

void export_corpus(std::span<const TrainingExample> examples, ExportFormat format, const std::filesystem::path& path,
                   std::uint64_t symbol_seed) {
  if (examples.empty()) throw InputError("nothing to export");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& e : examples) {
    nlohmann::json rec;
    if (format == ExportFormat::Records) {
      rec = {{"instance_id", e.instance_id},
             {"domain", domain_name(e.domain)},
             {"state_key", to_hex(e.state_key)},
             {"ascii", e.ascii},
             {"quick_h", e.quick_h},
             {"d_star", e.d_star},
             {"g", e.g},
             {"plan_len", e.plan_len},
             {"section", section_name(e.section)},
             {"features", e.features}};
    } else {
      rec = {{"instance_id", e.instance_id}, {"prompt", render_prompt(e, symbol_seed)}, {"target", e.d_star}};
    }
    out << rec.dump() << '\n';
  }
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<TrainingExample> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::vector<TrainingExample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrainingExample e;
      e.instance_id = j.at("instance_id").get<std::string>();
      e.domain = parse_domain(j.at("domain").get<std::string>());
      e.state_key = from_hex(j.at("state_key").get<std::string>());
      e.ascii = j.at("ascii").get<std::string>();
      e.quick_h = j.at("quick_h").get<double>();
      e.d_star = j.at("d_star").get<double>();
      e.g = j.at("g").get<int>();
      e.plan_len = j.at("plan_len").get<int>();
      e.section = parse_section(j.at("section").get<std::string>());
      e.features = j.at("features").get<std::vector<double>>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ": " + ex.what(), line_no, 1);
    }
  }
  return out;
}

}  // namespace heurlab
