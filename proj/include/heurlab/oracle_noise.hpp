#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heurlab/common.hpp"
#include "heurlab/experiment.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

enum class Section : std::uint8_t { Initial, Middle, End };

[[nodiscard]] std::string_view section_name(Section section) noexcept;
[[nodiscard]] Section parse_section(std::string_view name);

/// Thirds of the optimal path by depth: g < plan/3 is Initial,
/// g < 2 plan/3 is Middle, the rest End. Exact, no rounding of plan/3.
[[nodiscard]] Section section_of(int g, int plan_len);

/// Exact distance-to-goal for every open cell of a maze.
class OracleDistances {
 public:
  /// Runs a breadth-first sweep outward from the goal (unit-cost Dijkstra).
  explicit OracleDistances(const PuzzleInstance& maze);

  /// Distance of the state's cell, or nullopt when the goal cannot be reached.
  [[nodiscard]] std::optional<int> distance(const State& state) const;
  [[nodiscard]] std::optional<int> distance_of_cell(CellIndex cell) const;
  [[nodiscard]] int plan_length() const noexcept { return plan_length_; }
  /// Reachable cells and their distances, ascending by cell index.
  [[nodiscard]] std::vector<std::pair<CellIndex, int>> entries() const;

 private:
  std::vector<int> by_cell_;  // -1 = unreachable
  int plan_length_ = -1;
};

/// Throws UnsupportedDomain for Sokoban and STP.
[[nodiscard]] std::shared_ptr<const OracleDistances> oracle_distances(const PuzzleInstance& instance);

/// Where the noise comes from.
///   PerState: one draw per (noise_seed, state key); re-encounters agree.
///   PerQuery: a fresh draw every evaluation; not shareable.
enum class NoiseMode : std::uint8_t { PerState, PerQuery };

inline constexpr std::uint8_t kSectionInitial = 1u << 0;
inline constexpr std::uint8_t kSectionMiddle = 1u << 1;
inline constexpr std::uint8_t kSectionEnd = 1u << 2;
inline constexpr std::uint8_t kSectionAll = kSectionInitial | kSectionMiddle | kSectionEnd;

[[nodiscard]] constexpr std::uint8_t section_bit(Section s) noexcept {
  return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
}

struct NoiseSpec {
  double sigma = 0.0;
  std::uint8_t oracle_sections = kSectionAll;  ///< sections that get the exact h*
  bool clamp_at_zero = true;
  std::uint64_t noise_seed = 0;
  NoiseMode mode = NoiseMode::PerState;

  void validate() const;
};

/// Standard normal variate that depends only on (seed, key).
[[nodiscard]] double keyed_normal(std::uint64_t seed, std::string_view key) noexcept;

/// h*(n) in the oracle sections, h*(n) + N(0, sigma) elsewhere.
class NoisyOracle final : public HeuristicEvaluator {
 public:
  NoisyOracle(std::shared_ptr<const OracleDistances> oracle, NoiseSpec spec);

  void evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                      std::span<double> out) const override;
  [[nodiscard]] bool shareable() const noexcept override { return spec_.mode == NoiseMode::PerState; }

  /// Queries for states missing from the oracle table, answered by the quick heuristic.
  [[nodiscard]] std::int64_t fallbacks() const noexcept { return fallbacks_.load(); }

 private:
  std::shared_ptr<const OracleDistances> oracle_;
  NoiseSpec spec_;
  mutable std::atomic<std::int64_t> fallbacks_{0};
  mutable std::mutex rng_mutex_;
  mutable Rng rng_;
};

struct OracleStudyOptions {
  bool clamp_at_zero = true;
  NoiseMode mode = NoiseMode::PerState;
  SearchLimits limits;
  int jobs = 0;
};

/// One line of the oracle table. `all_row` marks the exact-oracle baseline.
struct OracleStudyRow {
  bool all_row = false;
  Section section = Section::Initial;
  double sigma = 0.0;
  ExperimentReport report;

  [[nodiscard]] std::string set_name() const;
};

/// The All row first, then each sigma with Initial, Middle, End. Every row
/// runs all instances under all seeds; noise for an instance is keyed by
/// derive_seed(seed, instance id).
[[nodiscard]] std::vector<OracleStudyRow> run_oracle_experiment(std::span<const PuzzleInstance> instances,
                                                                std::span<const ReferenceSolution> references,
                                                                std::span<const double> sigmas,
                                                                std::span<const std::uint64_t> seeds,
                                                                const OracleStudyOptions& options = {});

/// Delimiter-separated table: set, sigma, ILR-on-solved, ILR-on-optimal, SWC, Optimal%.
[[nodiscard]] std::string format_oracle_table(std::span<const OracleStudyRow> rows, char delimiter = ',');

/// Per-sigma check of End > Middle > Initial with adjacent gaps of at least
/// `margin`. Returns one message per violation; empty means it holds.
[[nodiscard]] std::vector<std::string> check_section_ordering(std::span<const OracleStudyRow> rows,
                                                              double margin = 0.0);

}  // namespace heurlab
