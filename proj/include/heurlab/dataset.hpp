#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heurlab/common.hpp"
#include "heurlab/domain.hpp"
#include "heurlab/oracle_noise.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

/// One node of an optimal path with its residual target.
struct TrainingExample {
  std::string instance_id;
  Domain domain = Domain::Maze;
  std::string state_key;  ///< raw bytes of state_key(); hex in files
  std::string ascii;      ///< rendered board (STP: one row of digits)
  double quick_h = 0.0;
  double d_star = 0.0;    ///< (plan_len - g) - quick_h
  int g = 0;              ///< depth j on the optimal path
  int plan_len = 0;
  Section section = Section::Initial;
  std::vector<double> features;

  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

struct ExtractedPool {
  std::vector<TrainingExample> examples;  ///< instance order, then depth
  int instances_used = 0;
  int skipped_unsolved = 0;
};

/// One example per node n_0 .. n_{L-1} of each solved path; the goal node
/// is left out. Results must come from an admissible heuristic.
[[nodiscard]] ExtractedPool extract_pool(std::span<const PuzzleInstance> instances,
                                         std::span<const SearchResult> results, int jobs = 0);

/// Solves each instance with the quick heuristic, then extracts.
[[nodiscard]] ExtractedPool solve_and_extract(std::span<const PuzzleInstance> instances,
                                              const SearchLimits& limits = {}, int jobs = 0);

enum class UtilityVariant : std::uint8_t { LogRatio, Ratio, LinearDepth };

[[nodiscard]] std::string_view utility_name(UtilityVariant variant) noexcept;
[[nodiscard]] UtilityVariant parse_utility(std::string_view name);

/// C(n): log(L/(L-g)), L/(L-g) or g/L. Throws std::domain_error when g >= L.
[[nodiscard]] double utility(int g, int plan_len, UtilityVariant variant);

/// softmax(logits). Stable for large logits.
[[nodiscard]] std::vector<double> softmax(std::span<const double> logits);

/// First-draw probabilities of D(n, tau) over one path's nodes.
[[nodiscard]] std::vector<double> planner_aware_probabilities(std::span<const int> depths, int plan_len, double tau,
                                                              UtilityVariant variant);

/// m positions drawn without replacement by successive draws proportional to
/// `weights`, renormalizing after each draw. Returns positions in draw order.
/// m >= weights.size() returns every position.
[[nodiscard]] std::vector<std::size_t> weighted_draw_without_replacement(std::span<const double> weights,
                                                                         std::size_t m, Rng& rng);

/// Example indices grouped per instance, in pool order.
[[nodiscard]] std::vector<std::vector<std::size_t>> group_by_instance(std::span<const TrainingExample> pool);

/// Indices into `pool`, ascending. Per instance, m nodes via D(n, tau).
[[nodiscard]] std::vector<std::size_t> sample_planner_aware(std::span<const TrainingExample> pool, std::size_t m,
                                                            double tau, UtilityVariant variant, std::uint64_t seed,
                                                            int jobs = 0);
/// Per instance, m nodes uniformly.
[[nodiscard]] std::vector<std::size_t> sample_uniform(std::span<const TrainingExample> pool, std::size_t m,
                                                      std::uint64_t seed, int jobs = 0);

/// Resamples m items without replacement from S1 u S2; items in both sets
/// weigh 2, the rest 1. Output in draw order.
[[nodiscard]] std::vector<std::size_t> combine_sets(std::span<const std::size_t> s1, std::span<const std::size_t> s2,
                                                    std::size_t m, Rng& rng);

/// Per instance, S1 = members of `baseline` in that instance (or m uniform
/// draws when `baseline` is empty), S2 = m draws from D(n, tau), then
/// combine_sets.
[[nodiscard]] std::vector<std::size_t> combine_with_baseline(std::span<const TrainingExample> pool, std::size_t m,
                                                             std::span<const std::size_t> baseline, double tau,
                                                             UtilityVariant variant, std::uint64_t seed, int jobs = 0);

struct SemDedupOptions {
  std::size_t budget = 0;
  std::optional<int> clusters;  ///< default ceil(pool / 200)
  double threshold = 0.95;      ///< cosine similarity above which a pair is a duplicate
  int kmeans_iterations = 50;
  std::uint64_t seed = 0;
};

struct SemDedupResult {
  std::vector<std::size_t> selected;  ///< ascending
  double threshold_used = 0.0;
  std::size_t survivors = 0;          ///< before the final trim
  bool budget_exceeds_pool = false;
};

/// Clusters standardized features with k-means, drops near duplicates inside
/// each cluster (keeping the member farther from the centroid), then trims
/// uniformly to the budget. Raises the threshold in 0.01 steps while the
/// survivors fall short.
[[nodiscard]] SemDedupResult semdedup_select(std::span<const TrainingExample> pool, const SemDedupOptions& options);

/// Training splits by path section. Exclusion kinds drop one section.
enum class SectionSplit : std::uint8_t { Initial, Middle, End, All, NotInitial, NotMiddle, NotEnd };

[[nodiscard]] std::string_view section_split_name(SectionSplit split) noexcept;
[[nodiscard]] SectionSplit parse_section_split(std::string_view name);
[[nodiscard]] bool split_contains(SectionSplit split, Section section) noexcept;

/// Exactly `size` examples drawn uniformly from the split's sections.
/// Throws InputError naming the shortfall when too few exist.
[[nodiscard]] std::vector<std::size_t> build_section_split(std::span<const TrainingExample> pool, SectionSplit split,
                                                           std::size_t size, std::uint64_t seed);

enum class Strategy : std::uint8_t { Full, Uniform, PlannerAware, SemDedup, Combined, SectionSplit };

[[nodiscard]] std::string_view strategy_name(Strategy strategy) noexcept;
[[nodiscard]] Strategy parse_strategy(std::string_view name);

/// Label used in comparison tables: Full-data, U(n), D(n,tau), SD, SD+D(n,tau).
[[nodiscard]] std::string strategy_label(Strategy strategy, double tau);

struct SamplingSpec {
  Strategy strategy = Strategy::PlannerAware;
  double tau = 1.0;
  UtilityVariant c_variant = UtilityVariant::LogRatio;
  std::size_t budget = 0;
  std::optional<std::size_t> per_problem_m;  ///< default ceil(budget / #instances)
  std::optional<int> clusters;
  double threshold = 0.95;
  heurlab::SectionSplit section = heurlab::SectionSplit::All;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Selection {
  std::vector<std::size_t> indices;  ///< ascending pool indices
  std::vector<std::string> notes;    ///< warnings, e.g. budget above pool size
};

/// Runs one strategy at the spec's budget. Per-instance strategies draw
/// ceil(budget / #instances) per path, then trim uniformly to the budget.
[[nodiscard]] Selection select_examples(std::span<const TrainingExample> pool, const SamplingSpec& spec,
                                        int jobs = 0);

enum class ExportFormat : std::uint8_t { Records, Prompts };

[[nodiscard]] std::string to_hex(std::string_view bytes);
[[nodiscard]] std::string from_hex(std::string_view hex);

/// Prompt text for one example. STP digits are replaced by letters chosen
/// with derive_seed(symbol_seed, instance_id).
[[nodiscard]] std::string render_prompt(const TrainingExample& example, std::uint64_t symbol_seed = 0);

/// One JSON object per line. Throws InputError on an empty set or an
/// unwritable path.
void export_corpus(std::span<const TrainingExample> examples, ExportFormat format,
                   const std::filesystem::path& path, std::uint64_t symbol_seed = 0);

[[nodiscard]] std::vector<TrainingExample> read_records(const std::filesystem::path& path);

}  // namespace heurlab
