#include "heurlab/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "heurlab/common.hpp"
#include "heurlab/hungarian.hpp"

namespace heurlab {

namespace {

constexpr std::array<Cell, 4> kMoves{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
constexpr std::array<Action, 4> kActions{Action::Up, Action::Down, Action::Left, Action::Right};
constexpr int kWindowRadius = 2;

Cell step(Cell c, Cell d) noexcept { return {c.row + d.row, c.col + d.col}; }

bool has_box(const State& s, CellIndex i) { return std::binary_search(s.cells.begin(), s.cells.end(), i); }

double sokoban_heuristic(const State& s, const PuzzleInstance& inst, SokobanPlayerTerm term) {
  const std::size_t n = s.cells.size();
  if (n == 0) return 0.0;
  CostMatrix cost(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t d = 0; d < n; ++d) {
      cost(b, d) = manhattan(inst.cell(s.cells[b]), inst.cell(inst.docks[d]));
    }
  }
  const double assignment = hungarian_min_cost(cost).total_cost;
  if (assignment == 0.0) return 0.0;  // every box docked
  int nearest = std::numeric_limits<int>::max();
  const Cell player = inst.cell(s.player);
  for (CellIndex box : s.cells) nearest = std::min(nearest, manhattan(player, inst.cell(box)));
  const int player_term = term == SokobanPlayerTerm::BoxCell ? nearest : std::max(0, nearest - 1);
  return player_term + assignment;
}

double stp_heuristic(const State& s, const PuzzleInstance& inst) {
  // goal cell of each tile value
  std::vector<CellIndex> target(inst.goal_tiles.size());
  for (std::size_t i = 0; i < inst.goal_tiles.size(); ++i) {
    target[static_cast<std::size_t>(inst.goal_tiles[i])] = static_cast<CellIndex>(i);
  }
  int sum = 0;
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    const CellIndex tile = s.cells[i];
    if (tile == 0) continue;
    sum += manhattan(inst.cell(static_cast<CellIndex>(i)), inst.cell(target[static_cast<std::size_t>(tile)]));
  }
  return sum;
}

void append_window(std::vector<double>& out, const PuzzleInstance& inst, const State& s) {
  const Cell centre = inst.cell(s.player);
  for (int dr = -kWindowRadius; dr <= kWindowRadius; ++dr) {
    for (int dc = -kWindowRadius; dc <= kWindowRadius; ++dc) {
      const Cell c{centre.row + dr, centre.col + dc};
      if (!inst.in_bounds(c)) {
        out.push_back(1.0);
        continue;
      }
      const CellIndex i = inst.index(c);
      double v = inst.is_wall(i) ? 1.0 : 0.0;
      if (inst.domain == Domain::Maze && i == inst.goal) v = 0.5;
      if (inst.domain == Domain::Sokoban) {
        if (has_box(s, i)) v += 0.5;
        if (inst.is_dock(i)) v += 0.25;
      }
      out.push_back(v);
    }
  }
}

}  // namespace

std::string_view domain_name(Domain domain) noexcept {
  switch (domain) {
    case Domain::Maze: return "maze";
    case Domain::Sokoban: return "sokoban";
    case Domain::Stp: return "stp";
  }
  return "unknown";
}

Domain parse_domain(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "maze") return Domain::Maze;
  if (lower == "sokoban") return Domain::Sokoban;
  if (lower == "stp") return Domain::Stp;
  throw InputError("unknown domain '" + std::string(name) + "' (expected maze, sokoban or stp)");
}

bool PuzzleInstance::is_dock(CellIndex i) const noexcept {
  return std::binary_search(docks.begin(), docks.end(), i);
}

State make_maze_state(const PuzzleInstance& instance, Cell player) {
  return State{instance.index(player), {}};
}

State make_sokoban_state(const PuzzleInstance& instance, Cell player, std::vector<Cell> boxes) {
  State s{instance.index(player), {}};
  s.cells.reserve(boxes.size());
  for (Cell b : boxes) s.cells.push_back(instance.index(b));
  std::sort(s.cells.begin(), s.cells.end());
  return s;
}

State make_stp_state(std::vector<CellIndex> tiles) {
  std::vector<bool> seen(tiles.size(), false);
  CellIndex blank = -1;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const CellIndex t = tiles[i];
    if (t < 0 || static_cast<std::size_t>(t) >= tiles.size() || seen[static_cast<std::size_t>(t)]) {
      throw InputError("tiles are not a permutation of 0.." + std::to_string(tiles.size() - 1));
    }
    seen[static_cast<std::size_t>(t)] = true;
    if (t == 0) blank = static_cast<CellIndex>(i);
  }
  return State{blank, std::move(tiles)};
}

std::vector<CellIndex> stp_goal_tiles(int width) {
  std::vector<CellIndex> tiles(static_cast<std::size_t>(width * width));
  std::iota(tiles.begin(), tiles.end(), 0);
  return tiles;
}

PuzzleInstance make_stp_instance(int width, std::vector<CellIndex> tiles) {
  if (width < 2) throw InputError("STP width must be at least 2");
  if (tiles.size() != static_cast<std::size_t>(width * width)) {
    throw InputError("STP tile count " + std::to_string(tiles.size()) + " does not match width " +
                     std::to_string(width));
  }
  PuzzleInstance inst;
  inst.domain = Domain::Stp;
  inst.rows = width;
  inst.cols = width;
  inst.goal_tiles = stp_goal_tiles(width);
  inst.start = make_stp_state(std::move(tiles));
  return inst;
}

void validate_state(const State& state, const PuzzleInstance& inst) {
  const auto n = static_cast<CellIndex>(inst.cell_count());
  if (state.player < 0 || state.player >= n) throw InputError("player cell out of bounds");
  switch (inst.domain) {
    case Domain::Maze:
      if (inst.is_wall(state.player)) throw InputError("player is on a wall");
      if (!state.cells.empty()) throw InputError("maze state carries box cells");
      return;
    case Domain::Sokoban: {
      if (inst.is_wall(state.player)) throw InputError("player is on a wall");
      if (!std::is_sorted(state.cells.begin(), state.cells.end()) ||
          std::adjacent_find(state.cells.begin(), state.cells.end()) != state.cells.end()) {
        throw InputError("box cells must be distinct and ascending");
      }
      for (CellIndex b : state.cells) {
        if (b < 0 || b >= n || inst.is_wall(b)) throw InputError("box on a wall or out of bounds");
        if (b == state.player) throw InputError("player and box share a cell");
      }
      if (state.cells.size() != inst.docks.size()) throw InputError("box count differs from dock count");
      return;
    }
    case Domain::Stp: {
      if (state.cells.size() != static_cast<std::size_t>(n)) throw InputError("tile count mismatch");
      const State check = make_stp_state(state.cells);
      if (check.player != state.player) throw InputError("blank position does not match tiles");
      return;
    }
  }
}

bool is_goal(const State& state, const PuzzleInstance& inst) {
  switch (inst.domain) {
    case Domain::Maze: return state.player == inst.goal;
    case Domain::Sokoban: return state.cells == inst.docks;
    case Domain::Stp: return state.cells == inst.goal_tiles;
  }
  return false;
}

void successors(const State& state, const PuzzleInstance& inst, std::vector<Successor>& out) {
  out.clear();
  const Cell from = inst.cell(state.player);
  for (std::size_t m = 0; m < kMoves.size(); ++m) {
    const Cell to = step(from, kMoves[m]);
    if (!inst.in_bounds(to)) continue;
    const CellIndex ti = inst.index(to);
    switch (inst.domain) {
      case Domain::Maze:
        if (!inst.is_wall(ti)) out.push_back({kActions[m], State{ti, {}}});
        break;
      case Domain::Sokoban: {
        if (inst.is_wall(ti)) break;
        if (!has_box(state, ti)) {
          out.push_back({kActions[m], State{ti, state.cells}});
          break;
        }
        const Cell beyond = step(to, kMoves[m]);
        if (!inst.in_bounds(beyond)) break;
        const CellIndex bi = inst.index(beyond);
        if (inst.is_wall(bi) || has_box(state, bi)) break;
        State next{ti, state.cells};
        *std::find(next.cells.begin(), next.cells.end(), ti) = bi;
        std::sort(next.cells.begin(), next.cells.end());
        out.push_back({kActions[m], std::move(next)});
        break;
      }
      case Domain::Stp: {
        State next{ti, state.cells};
        std::swap(next.cells[static_cast<std::size_t>(state.player)], next.cells[static_cast<std::size_t>(ti)]);
        out.push_back({kActions[m], std::move(next)});
        break;
      }
    }
  }
}

std::vector<Successor> successors(const State& state, const PuzzleInstance& instance) {
  std::vector<Successor> out;
  successors(state, instance, out);
  return out;
}

double quick_heuristic(const State& state, const PuzzleInstance& inst, SokobanPlayerTerm player_term) {
  switch (inst.domain) {
    case Domain::Maze: return manhattan(inst.cell(state.player), inst.cell(inst.goal));
    case Domain::Sokoban: return sokoban_heuristic(state, inst, player_term);
    case Domain::Stp: return stp_heuristic(state, inst);
  }
  return 0.0;
}

std::string state_key(const State& state) {
  std::string key;
  key.reserve(2 * (state.cells.size() + 1));
  auto put = [&key](CellIndex v) {
    const auto u = static_cast<std::uint16_t>(v);
    key.push_back(static_cast<char>(u & 0xff));
    key.push_back(static_cast<char>(u >> 8));
  };
  put(state.player);
  for (CellIndex c : state.cells) put(c);
  return key;
}

std::size_t feature_length(const PuzzleInstance& inst) {
  constexpr std::size_t window = (2 * kWindowRadius + 1) * (2 * kWindowRadius + 1);
  switch (inst.domain) {
    case Domain::Maze: return 5 + window;
    case Domain::Sokoban: return 10 + window;
    case Domain::Stp: return 3 + static_cast<std::size_t>(2 * inst.cols - 1) + window;
  }
  return 0;
}

std::vector<double> feature_vector(const State& state, const PuzzleInstance& inst) {
  std::vector<double> f;
  f.reserve(feature_length(inst));
  const Cell p = inst.cell(state.player);
  f.push_back(quick_heuristic(state, inst));
  f.push_back(static_cast<double>(p.row) / inst.rows);
  f.push_back(static_cast<double>(p.col) / inst.cols);

  switch (inst.domain) {
    case Domain::Maze: {
      const Cell g = inst.cell(inst.goal);
      f.push_back(static_cast<double>(g.row - p.row) / inst.rows);
      f.push_back(static_cast<double>(g.col - p.col) / inst.cols);
      append_window(f, inst, state);
      break;
    }
    case Domain::Sokoban: {
      double box_min = 0, box_sum = 0, box_max = 0, pl_min = 0, pl_sum = 0, pl_max = 0;
      int docked = 0;
      bool first = true;
      for (CellIndex b : state.cells) {
        int nearest_dock = std::numeric_limits<int>::max();
        for (CellIndex d : inst.docks) nearest_dock = std::min(nearest_dock, manhattan(inst.cell(b), inst.cell(d)));
        const int to_player = manhattan(p, inst.cell(b));
        if (first) {
          box_min = box_max = nearest_dock;
          pl_min = pl_max = to_player;
          first = false;
        }
        box_min = std::min<double>(box_min, nearest_dock);
        box_max = std::max<double>(box_max, nearest_dock);
        pl_min = std::min<double>(pl_min, to_player);
        pl_max = std::max<double>(pl_max, to_player);
        box_sum += nearest_dock;
        pl_sum += to_player;
        if (inst.is_dock(b)) ++docked;
      }
      const double n = state.cells.empty() ? 1.0 : static_cast<double>(state.cells.size());
      f.insert(f.end(), {box_min, box_sum / n, box_max, pl_min, pl_sum / n, pl_max, docked / n});
      append_window(f, inst, state);
      break;
    }
    case Domain::Stp: {
      const int w = inst.cols;
      std::vector<int> target(state.cells.size());
      for (std::size_t i = 0; i < inst.goal_tiles.size(); ++i) {
        target[static_cast<std::size_t>(inst.goal_tiles[i])] = static_cast<int>(i);
      }
      auto displacement = [&](CellIndex at) {
        const CellIndex tile = state.cells[static_cast<std::size_t>(at)];
        return manhattan(inst.cell(at), inst.cell(target[static_cast<std::size_t>(tile)]));
      };
      std::vector<double> histogram(static_cast<std::size_t>(2 * w - 1), 0.0);
      for (std::size_t i = 0; i < state.cells.size(); ++i) {
        if (state.cells[i] == 0) continue;
        histogram[static_cast<std::size_t>(displacement(static_cast<CellIndex>(i)))] += 1.0;
      }
      f.insert(f.end(), histogram.begin(), histogram.end());
      for (int dr = -kWindowRadius; dr <= kWindowRadius; ++dr) {
        for (int dc = -kWindowRadius; dc <= kWindowRadius; ++dc) {
          const Cell c{p.row + dr, p.col + dc};
          f.push_back(inst.in_bounds(c) ? displacement(inst.index(c)) : -1.0);
        }
      }
      break;
    }
  }
  return f;
}

}  // namespace heurlab
