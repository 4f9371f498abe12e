#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace heurlab {

enum class Domain : std::uint8_t { Maze, Sokoban, Stp };

[[nodiscard]] std::string_view domain_name(Domain domain) noexcept;
/// Accepts "maze", "sokoban", "stp" (case-insensitive). Throws InputError otherwise.
[[nodiscard]] Domain parse_domain(std::string_view name);

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

using CellIndex = std::int32_t;

[[nodiscard]] constexpr int manhattan(Cell a, Cell b) noexcept {
  return (a.row > b.row ? a.row - b.row : b.row - a.row) +
         (a.col > b.col ? a.col - b.col : b.col - a.col);
}

/// Canonical search state shared by all three domains.
///   maze:    player = player cell, cells empty
///   Sokoban: player = player cell, cells = box cells in ascending order
///   STP:     player = blank cell,  cells = tiles row-major (0 is the blank)
struct State {
  CellIndex player = -1;
  std::vector<CellIndex> cells;
  friend bool operator==(const State&, const State&) = default;
};

enum class Action : std::uint8_t { Up, Down, Left, Right };

struct Successor {
  Action action;
  State state;
};

/// Player-to-box term of the Sokoban quick heuristic.
///   AdjacentCell: max(0, min_box manhattan(player, box) - 1), the distance to the
///                 nearest cell from which a push is possible. Admissible.
///   BoxCell:      min_box manhattan(player, box), the literal term. It
///                 overestimates by one whenever a single push finishes the puzzle.
enum class SokobanPlayerTerm : std::uint8_t { AdjacentCell, BoxCell };

/// One problem of a domain. Walls are unused for STP.
struct PuzzleInstance {
  Domain domain = Domain::Maze;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> walls;     ///< rows*cols, 1 = wall (maze, Sokoban)
  CellIndex goal = -1;                 ///< maze goal cell
  std::vector<CellIndex> docks;        ///< Sokoban docks, ascending
  std::vector<CellIndex> goal_tiles;   ///< STP goal permutation, row-major
  State start;
  std::string id;
  std::uint64_t seed = 0;
  std::string provenance;

  [[nodiscard]] int cell_count() const noexcept { return rows * cols; }
  [[nodiscard]] CellIndex index(Cell c) const noexcept { return c.row * cols + c.col; }
  [[nodiscard]] Cell cell(CellIndex i) const noexcept { return {i / cols, i % cols}; }
  [[nodiscard]] bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols;
  }
  [[nodiscard]] bool is_wall(CellIndex i) const noexcept {
    return !walls.empty() && walls[static_cast<std::size_t>(i)] != 0;
  }
  [[nodiscard]] bool is_dock(CellIndex i) const noexcept;
};

[[nodiscard]] State make_maze_state(const PuzzleInstance& instance, Cell player);
/// Sorts the boxes so that box order never affects the state.
[[nodiscard]] State make_sokoban_state(const PuzzleInstance& instance, Cell player, std::vector<Cell> boxes);
/// Locates the blank; throws InputError when tiles is not a permutation of 0..n-1.
[[nodiscard]] State make_stp_state(std::vector<CellIndex> tiles);

/// Goal permutation with the blank first: 0 1 2 ... w^2-1.
[[nodiscard]] std::vector<CellIndex> stp_goal_tiles(int width);
[[nodiscard]] PuzzleInstance make_stp_instance(int width, std::vector<CellIndex> tiles);

/// Throws InputError when state is not valid on instance.
void validate_state(const State& state, const PuzzleInstance& instance);

[[nodiscard]] bool is_goal(const State& state, const PuzzleInstance& instance);

/// Legal moves in fixed order up, down, left, right. `out` is cleared first.
void successors(const State& state, const PuzzleInstance& instance, std::vector<Successor>& out);
[[nodiscard]] std::vector<Successor> successors(const State& state, const PuzzleInstance& instance);

/// maze: Manhattan to goal; Sokoban: player term + min-cost box/dock
/// assignment; STP: summed tile Manhattan distances (blank excluded).
[[nodiscard]] double quick_heuristic(const State& state, const PuzzleInstance& instance,
                                     SokobanPlayerTerm player_term = SokobanPlayerTerm::AdjacentCell);

/// Injective byte encoding of a state within one instance.
[[nodiscard]] std::string state_key(const State& state);

[[nodiscard]] std::size_t feature_length(const PuzzleInstance& instance);
/// Fixed-length numeric description: quick heuristic, normalized player
/// coordinates, domain statistics and a local window around the player/blank.
[[nodiscard]] std::vector<double> feature_vector(const State& state, const PuzzleInstance& instance);

}  // namespace heurlab
