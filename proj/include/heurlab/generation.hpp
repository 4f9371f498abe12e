#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heurlab/domain.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

/// Acceptance filter for generated problems, checked by solving with the
/// quick heuristic.
struct GenFilter {
  int min_plan_length = 0;                ///< O_l: optimal plan length must exceed it
  double alpha = 1.0;                     ///< closed length / plan length must exceed it
  std::optional<std::int64_t> beta_min;   ///< A* iterations window, inclusive
  std::optional<std::int64_t> beta_max;
  int retries = 10;                       ///< start/goal resamples per fresh board

  /// Throws InputError when the invariants (O_l >= 0, alpha >= 1,
  /// beta_min <= beta_max, retries >= 1) do not hold.
  void validate() const;
};

struct FilterOutcome {
  bool accepted = false;
  bool solved = false;
  int plan_length = 0;
  std::int64_t closed_length = 0;
  double wall_time = 0.0;
};

/// Iteration cap applied when no beta_max bounds the search.
inline constexpr std::int64_t kDefaultFilterIterationCap = 2'000'000;

[[nodiscard]] FilterOutcome evaluate_filter(const PuzzleInstance& instance, const GenFilter& filter);

struct MazeOptions {
  double break_probability = 0.2;  ///< per wall on the start/goal region boundary
  int min_broken = 1;
  int generation_cap = 1000;       ///< fresh boards before GenerationExhausted
};

/// Board side in cells for a nominal maze size: 2*floor(n/2)+1, so 20 -> 21.
[[nodiscard]] constexpr int maze_grid_side(int nominal) noexcept { return 2 * (nominal / 2) + 1; }

/// Randomized Prim's maze with boundary walls broken between the cells
/// closer to the start and those closer to the goal. Start and goal are
/// resampled up to filter.retries times per board.
[[nodiscard]] PuzzleInstance generate_maze(int width, int height, const GenFilter& filter, std::uint64_t seed,
                                           const MazeOptions& options = {});

/// Parses boxoban text (";" index line followed by board rows). Instances keep
/// source order; ids are "<source>:<index>".
[[nodiscard]] std::vector<PuzzleInstance> parse_boxoban(std::string_view text, std::string_view source = "boxoban");
[[nodiscard]] std::vector<PuzzleInstance> load_boxoban(const std::filesystem::path& path);
/// Boxoban text for instances (start states), one block per instance.
[[nodiscard]] std::string render_boxoban(std::span<const PuzzleInstance> instances);

/// Keeps a seeded random subset of `boxes` boxes and `boxes` docks.
[[nodiscard]] PuzzleInstance subsample_boxes(const PuzzleInstance& instance, int boxes, std::uint64_t seed);

/// Boxoban-style synthetic room: random-walk floor plan, boxes placed on
/// docks, then pulled backwards by reverse play. Solvable by construction;
/// not filtered.
[[nodiscard]] PuzzleInstance generate_sokoban_room(int rows, int cols, int boxes, std::uint64_t seed);

/// Synthetic rooms until one passes `filter`.
[[nodiscard]] PuzzleInstance generate_sokoban(int rows, int cols, int boxes, const GenFilter& filter,
                                              std::uint64_t seed, int generation_cap = 1000);

/// Walks a seeded permutation of `sources`, subsampling `boxes` boxes from
/// each, and keeps the first `count` that pass `filter`.
[[nodiscard]] std::vector<PuzzleInstance> select_boxoban(std::span<const PuzzleInstance> sources, int boxes,
                                                         const GenFilter& filter, int count, std::uint64_t seed,
                                                         int jobs = 0);

/// Solvability w.r.t. the canonical goal (blank first), by permutation parity.
[[nodiscard]] bool stp_is_solvable(std::span<const CellIndex> tiles, int width);

/// Width 3: uniform random solvable permutation. Wider: 20..30 random moves
/// from the goal without immediate reversals. Resampled until `filter` passes.
[[nodiscard]] PuzzleInstance generate_stp(int width, const GenFilter& filter, std::uint64_t seed,
                                          int generation_cap = 1000);

/// Letters standing in for STP digits; digit 0 stays "0".
struct SymbolTable {
  std::vector<char> symbol_of_digit;  ///< index = digit

  [[nodiscard]] std::string render(std::span<const CellIndex> tiles) const;
  /// Inverse mapping; throws InputError on an unknown symbol.
  [[nodiscard]] std::vector<CellIndex> digits(std::string_view rendered) const;
};

struct RemappedStp {
  SymbolTable table;
  std::string puzzle;  ///< start state in letters
  std::string goal;    ///< goal in letters, "0" first
};

/// Samples w^2-1 distinct lowercase letters, sorts them and assigns them to
/// digits 1..w^2-1 in order.
[[nodiscard]] SymbolTable make_symbol_table(int width, std::uint64_t seed);
[[nodiscard]] RemappedStp remap_stp_symbols(const PuzzleInstance& instance, std::uint64_t seed);

/// One homogeneous block of a split.
struct SplitPart {
  int count = 0;
  int size = 20;   ///< maze nominal side, STP width, Sokoban board side
  int boxes = 2;   ///< Sokoban only
  GenFilter filter;
};

struct SplitSpec {
  std::string name;
  Domain domain = Domain::Maze;
  std::vector<SplitPart> parts;

  [[nodiscard]] int count() const noexcept;
  void validate() const;
};

/// Split shapes reported for each domain (train, val, test-iid, test-ood).
[[nodiscard]] std::vector<SplitSpec> default_splits(Domain domain);
/// Scales counts by `scale`, rounding up and keeping every part nonempty.
[[nodiscard]] SplitSpec scale_split(SplitSpec spec, double scale);

/// Generates every part of a split. Instance i derives its seed from
/// (master_seed, split name, i), so the result does not depend on `jobs`.
/// Sokoban splits draw from `boxoban` when given, else from synthetic rooms.
[[nodiscard]] std::vector<PuzzleInstance> generate_split(const SplitSpec& spec, std::uint64_t master_seed,
                                                         int jobs = 0,
                                                         std::span<const PuzzleInstance> boxoban = {});

}  // namespace heurlab
