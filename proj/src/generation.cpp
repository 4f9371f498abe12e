#include "heurlab/generation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "heurlab/ascii.hpp"
#include "heurlab/common.hpp"
#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

constexpr std::array<Cell, 4> kDirs{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<int> grid_distances(const PuzzleInstance& maze, CellIndex from) {
  std::vector<int> dist(static_cast<std::size_t>(maze.cell_count()), -1);
  std::deque<CellIndex> queue{from};
  dist[static_cast<std::size_t>(from)] = 0;
  while (!queue.empty()) {
    const CellIndex at = queue.front();
    queue.pop_front();
    const Cell c = maze.cell(at);
    for (Cell d : kDirs) {
      const Cell n{c.row + d.row, c.col + d.col};
      if (!maze.in_bounds(n)) continue;
      const CellIndex ni = maze.index(n);
      if (maze.is_wall(ni) || dist[static_cast<std::size_t>(ni)] >= 0) continue;
      dist[static_cast<std::size_t>(ni)] = dist[static_cast<std::size_t>(at)] + 1;
      queue.push_back(ni);
    }
  }
  return dist;
}

// Randomized Prim's over the odd-coordinate rooms of a rows x cols grid.
PuzzleInstance prim_maze(int rows, int cols, Rng& rng) {
  PuzzleInstance maze;
  maze.domain = Domain::Maze;
  maze.rows = rows;
  maze.cols = cols;
  maze.walls.assign(static_cast<std::size_t>(rows * cols), 1);

  auto open = [&](Cell c) { maze.walls[static_cast<std::size_t>(maze.index(c))] = 0; };
  auto is_room = [&](Cell c) { return c.row >= 1 && c.col >= 1 && c.row < rows - 1 && c.col < cols - 1; };

  std::vector<std::uint8_t> in_frontier(static_cast<std::size_t>(rows * cols), 0);
  std::vector<Cell> frontier;
  auto add_frontier = [&](Cell c) {
    for (Cell d : kDirs) {
      const Cell n{c.row + 2 * d.row, c.col + 2 * d.col};
      if (!is_room(n)) continue;
      const auto ni = static_cast<std::size_t>(maze.index(n));
      if (!maze.walls[ni] || in_frontier[ni]) continue;
      in_frontier[ni] = 1;
      frontier.push_back(n);
    }
  };

  const int room_rows = (rows - 1) / 2;
  const int room_cols = (cols - 1) / 2;
  const Cell first{2 * static_cast<int>(uniform_index(rng, static_cast<std::size_t>(room_rows))) + 1,
                   2 * static_cast<int>(uniform_index(rng, static_cast<std::size_t>(room_cols))) + 1};
  open(first);
  add_frontier(first);
  std::vector<Cell> carved_neighbours;
  while (!frontier.empty()) {
    const std::size_t pick = uniform_index(rng, frontier.size());
    const Cell cell = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    carved_neighbours.clear();
    for (Cell d : kDirs) {
      const Cell n{cell.row + 2 * d.row, cell.col + 2 * d.col};
      if (is_room(n) && !maze.walls[static_cast<std::size_t>(maze.index(n))]) carved_neighbours.push_back(d);
    }
    const Cell d = carved_neighbours[uniform_index(rng, carved_neighbours.size())];
    open(cell);
    open({cell.row + d.row, cell.col + d.col});
    add_frontier(cell);
  }
  return maze;
}

// Removes walls separating a start-side open cell from a goal-side one.
void break_boundary_walls(PuzzleInstance& maze, CellIndex start, CellIndex goal, const MazeOptions& options,
                          Rng& rng) {
  const auto from_start = grid_distances(maze, start);
  const auto from_goal = grid_distances(maze, goal);
  auto start_side = [&](CellIndex i) {
    return from_start[static_cast<std::size_t>(i)] <= from_goal[static_cast<std::size_t>(i)];
  };
  std::vector<CellIndex> boundary;
  for (int r = 1; r < maze.rows - 1; ++r) {
    for (int c = 1; c < maze.cols - 1; ++c) {
      const CellIndex w = maze.index({r, c});
      if (!maze.is_wall(w)) continue;
      for (auto [a, b] : {std::pair{Cell{r - 1, c}, Cell{r + 1, c}}, std::pair{Cell{r, c - 1}, Cell{r, c + 1}}}) {
        const CellIndex ai = maze.index(a), bi = maze.index(b);
        if (maze.is_wall(ai) || maze.is_wall(bi)) continue;
        if (from_start[static_cast<std::size_t>(ai)] < 0 || from_start[static_cast<std::size_t>(bi)] < 0) continue;
        if (start_side(ai) != start_side(bi)) {
          boundary.push_back(w);
          break;
        }
      }
    }
  }
  std::bernoulli_distribution coin(options.break_probability);
  std::vector<CellIndex> kept;
  int broken = 0;
  for (CellIndex w : boundary) {
    if (coin(rng)) {
      maze.walls[static_cast<std::size_t>(w)] = 0;
      ++broken;
    } else {
      kept.push_back(w);
    }
  }
  while (broken < options.min_broken && !kept.empty()) {
    const std::size_t pick = uniform_index(rng, kept.size());
    maze.walls[static_cast<std::size_t>(kept[pick])] = 0;
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(pick));
    ++broken;
  }
}

std::string boxoban_error(std::string_view source, std::string_view index, const std::string& what) {
  return "boxoban " + std::string(source) + " puzzle " + std::string(index) + ": " + what;
}

int inversions(std::span<const CellIndex> tiles) {
  int count = 0;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (tiles[i] == 0) continue;
    for (std::size_t j = i + 1; j < tiles.size(); ++j) {
      if (tiles[j] != 0 && tiles[j] < tiles[i]) ++count;
    }
  }
  return count;
}

// Permutation-parity invariant preserved by every legal STP move.
int stp_parity(std::span<const CellIndex> tiles, int width) {
  const int inv = inversions(tiles);
  if (width % 2 == 1) return inv % 2;
  const auto blank = static_cast<int>(std::find(tiles.begin(), tiles.end(), 0) - tiles.begin());
  const int row_from_bottom = width - blank / width;  // 1-based
  return (inv + row_from_bottom) % 2;
}

}  // namespace

void GenFilter::validate() const {
  if (min_plan_length < 0) throw InputError("O_l must be nonnegative");
  if (!(alpha >= 1.0)) throw InputError("alpha must be at least 1");
  if (beta_min && *beta_min < 0) throw InputError("beta_min must be nonnegative");
  if (beta_max && *beta_max < 0) throw InputError("beta_max must be nonnegative");
  if (beta_min && beta_max && *beta_min > *beta_max) throw InputError("beta_min exceeds beta_max");
  if (retries < 1) throw InputError("retries must be positive");
}

FilterOutcome evaluate_filter(const PuzzleInstance& instance, const GenFilter& filter) {
  SearchLimits limits;
  limits.max_iterations = filter.beta_max ? *filter.beta_max + 1 : kDefaultFilterIterationCap;
  const auto result = astar(instance, QuickHeuristic{}, limits);
  FilterOutcome out;
  out.solved = result.solved();
  out.plan_length = result.path_length;
  out.closed_length = result.closed_length;
  out.wall_time = result.wall_time;
  if (!out.solved || out.plan_length <= filter.min_plan_length) return out;
  if (!(static_cast<double>(out.closed_length) / out.plan_length > filter.alpha)) return out;
  if (filter.beta_min && out.closed_length < *filter.beta_min) return out;
  if (filter.beta_max && out.closed_length > *filter.beta_max) return out;
  out.accepted = true;
  return out;
}

PuzzleInstance generate_maze(int width, int height, const GenFilter& filter, std::uint64_t seed,
                             const MazeOptions& options) {
  if (width < 5 || height < 5) throw InputError("maze dimensions must be at least 5");
  filter.validate();
  const int rows = maze_grid_side(height);
  const int cols = maze_grid_side(width);
  Rng rng(seed);
  for (int board = 0; board < options.generation_cap; ++board) {
    const PuzzleInstance perfect = prim_maze(rows, cols, rng);
    std::vector<CellIndex> rooms;
    for (int r = 1; r < rows; r += 2) {
      for (int c = 1; c < cols; c += 2) rooms.push_back(perfect.index({r, c}));
    }
    for (int attempt = 0; attempt < filter.retries; ++attempt) {
      const std::size_t a = uniform_index(rng, rooms.size());
      std::size_t b = uniform_index(rng, rooms.size() - 1);
      if (b >= a) ++b;
      PuzzleInstance maze = perfect;
      maze.goal = rooms[b];
      maze.start = State{rooms[a], {}};
      break_boundary_walls(maze, rooms[a], rooms[b], options, rng);
      if (evaluate_filter(maze, filter).accepted) {
        maze.seed = seed;
        maze.provenance = "prim+break boards=" + std::to_string(board + 1) + " attempt=" + std::to_string(attempt + 1);
        return maze;
      }
    }
  }
  throw GenerationExhausted("no maze passed the filter within " + std::to_string(options.generation_cap) +
                            " boards (seed " + std::to_string(seed) + ")");
}

std::vector<PuzzleInstance> parse_boxoban(std::string_view text, std::string_view source) {
  std::vector<PuzzleInstance> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string index;
  std::string board;
  bool in_block = false;
  auto flush = [&] {
    if (!in_block) return;
    if (board.empty()) throw InputError(boxoban_error(source, index, "no board rows"));
    PuzzleInstance inst;
    try {
      inst = parse_ascii(board, Domain::Sokoban);
    } catch (const ParseError& e) {
      throw InputError(boxoban_error(source, index, e.what()));
    }
    inst.id = std::string(source) + ":" + index;
    inst.provenance = "boxoban " + std::string(source) + " #" + index;
    out.push_back(std::move(inst));
    board.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == ';') {
      flush();
      index = line.substr(1);
      index.erase(0, index.find_first_not_of(' '));
      index.erase(index.find_last_not_of(' ') + 1);
      in_block = true;
      continue;
    }
    if (line.empty()) continue;
    if (!in_block) throw InputError(boxoban_error(source, "?", "board row before any ';' index line"));
    board += line;
    board.push_back('\n');
  }
  flush();
  return out;
}

std::vector<PuzzleInstance> load_boxoban(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open boxoban file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_boxoban(text.str(), path.filename().string());
}

std::string render_boxoban(std::span<const PuzzleInstance> instances) {
  std::string out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& id = instances[i].id;
    const auto colon = id.rfind(':');
    out += "; " + (colon == std::string::npos ? std::to_string(i) : id.substr(colon + 1)) + "\n";
    out += render_ascii(instances[i]);
    out += "\n";
  }
  return out;
}

PuzzleInstance subsample_boxes(const PuzzleInstance& instance, int boxes, std::uint64_t seed) {
  if (instance.domain != Domain::Sokoban) throw UnsupportedDomain("subsample_boxes needs a Sokoban instance");
  if (boxes < 1) throw InputError("box count must be positive");
  const auto have = static_cast<int>(instance.start.cells.size());
  if (have < boxes || static_cast<int>(instance.docks.size()) < boxes) {
    throw InputError("instance " + instance.id + " has " + std::to_string(have) + " boxes, fewer than " +
                     std::to_string(boxes));
  }
  Rng rng(seed);
  std::vector<CellIndex> kept_boxes, kept_docks;
  std::sample(instance.start.cells.begin(), instance.start.cells.end(), std::back_inserter(kept_boxes), boxes, rng);
  std::sample(instance.docks.begin(), instance.docks.end(), std::back_inserter(kept_docks), boxes, rng);
  PuzzleInstance out = instance;
  out.docks = std::move(kept_docks);
  out.start.cells = std::move(kept_boxes);
  std::sort(out.docks.begin(), out.docks.end());
  std::sort(out.start.cells.begin(), out.start.cells.end());
  out.seed = seed;
  out.provenance = instance.provenance + " subsample B=" + std::to_string(boxes);
  return out;
}

PuzzleInstance generate_sokoban_room(int rows, int cols, int boxes, std::uint64_t seed) {
  if (rows < 5 || cols < 5) throw InputError("Sokoban room must be at least 5x5");
  if (boxes < 1) throw InputError("box count must be positive");
  Rng rng(seed);
  const int interior = (rows - 2) * (cols - 2);
  const int floor_target = std::max(boxes * 3 + 4, interior * 45 / 100);
  for (;;) {
    PuzzleInstance room;
    room.domain = Domain::Sokoban;
    room.rows = rows;
    room.cols = cols;
    room.walls.assign(static_cast<std::size_t>(rows * cols), 1);

    // random walk with direction persistence carves the floor
    Cell at{1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(rows - 2))),
            1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(cols - 2)))};
    std::vector<CellIndex> floor;
    Cell dir = kDirs[uniform_index(rng, 4)];
    std::bernoulli_distribution turn(0.35);
    for (int steps = 0; static_cast<int>(floor.size()) < floor_target && steps < interior * 40; ++steps) {
      const auto idx = static_cast<std::size_t>(room.index(at));
      if (room.walls[idx]) {
        room.walls[idx] = 0;
        floor.push_back(room.index(at));
      }
      if (turn(rng)) dir = kDirs[uniform_index(rng, 4)];
      const Cell next{at.row + dir.row, at.col + dir.col};
      if (next.row >= 1 && next.col >= 1 && next.row < rows - 1 && next.col < cols - 1) at = next;
      else dir = kDirs[uniform_index(rng, 4)];
    }
    if (static_cast<int>(floor.size()) < boxes + 2) continue;

    // docks away from the border walls are easier to pull out of
    std::vector<CellIndex> candidates;
    for (CellIndex f : floor) {
      int open_neighbours = 0;
      const Cell c = room.cell(f);
      for (Cell d : kDirs) open_neighbours += room.is_wall(room.index({c.row + d.row, c.col + d.col})) ? 0 : 1;
      if (open_neighbours >= 2) candidates.push_back(f);
    }
    if (static_cast<int>(candidates.size()) < boxes + 1) continue;
    std::shuffle(candidates.begin(), candidates.end(), rng);
    room.docks.assign(candidates.begin(), candidates.begin() + boxes);
    std::sort(room.docks.begin(), room.docks.end());
    std::vector<CellIndex> box_cells = room.docks;
    CellIndex player = candidates[static_cast<std::size_t>(boxes)];

    auto box_at = [&](CellIndex i) { return std::find(box_cells.begin(), box_cells.end(), i) != box_cells.end(); };
    std::bernoulli_distribution pull(0.7);
    const int reverse_steps = 60 * boxes + 150;
    for (int s = 0; s < reverse_steps; ++s) {
      const Cell d = kDirs[uniform_index(rng, 4)];
      const Cell p = room.cell(player);
      const Cell to{p.row + d.row, p.col + d.col};
      const CellIndex ti = room.index(to);
      if (room.is_wall(ti) || box_at(ti)) continue;
      const Cell behind{p.row - d.row, p.col - d.col};
      const CellIndex bi = room.index(behind);
      if (!room.is_wall(bi) && box_at(bi) && pull(rng)) *std::find(box_cells.begin(), box_cells.end(), bi) = player;
      player = ti;
    }
    std::sort(box_cells.begin(), box_cells.end());
    if (box_cells == room.docks) continue;
    room.start = State{player, std::move(box_cells)};
    room.seed = seed;
    room.provenance = "synthetic room B=" + std::to_string(boxes);
    return room;
  }
}

PuzzleInstance generate_sokoban(int rows, int cols, int boxes, const GenFilter& filter, std::uint64_t seed,
                                int generation_cap) {
  filter.validate();
  for (int attempt = 0; attempt < generation_cap; ++attempt) {
    auto room = generate_sokoban_room(rows, cols, boxes, derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (evaluate_filter(room, filter).accepted) {
      room.seed = seed;
      room.provenance += " attempt=" + std::to_string(attempt + 1);
      return room;
    }
  }
  throw GenerationExhausted("no Sokoban room passed the filter within " + std::to_string(generation_cap) +
                            " boards (seed " + std::to_string(seed) + ")");
}

std::vector<PuzzleInstance> select_boxoban(std::span<const PuzzleInstance> sources, int boxes,
                                           const GenFilter& filter, int count, std::uint64_t seed, int jobs) {
  filter.validate();
  std::vector<std::size_t> order(sources.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<PuzzleInstance> out;
  const std::size_t chunk = static_cast<std::size_t>(std::max(1, resolve_jobs(jobs))) * 8;
  for (std::size_t begin = 0; begin < order.size() && static_cast<int>(out.size()) < count; begin += chunk) {
    const std::size_t end = std::min(order.size(), begin + chunk);
    std::vector<std::optional<PuzzleInstance>> accepted(end - begin);
    parallel_for(end - begin, jobs, [&](std::size_t k) {
      const auto& src = sources[order[begin + k]];
      if (static_cast<int>(src.start.cells.size()) < boxes) return;
      auto candidate = subsample_boxes(src, boxes, derive_seed(seed, static_cast<std::uint64_t>(begin + k)));
      if (evaluate_filter(candidate, filter).accepted) accepted[k] = std::move(candidate);
    });
    for (auto& a : accepted) {
      if (a && static_cast<int>(out.size()) < count) out.push_back(std::move(*a));
    }
  }
  if (static_cast<int>(out.size()) < count) {
    throw GenerationExhausted("only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                              " boxoban puzzles passed the filter");
  }
  return out;
}

bool stp_is_solvable(std::span<const CellIndex> tiles, int width) {
  const auto goal = stp_goal_tiles(width);
  return stp_parity(tiles, width) == stp_parity(goal, width);
}

PuzzleInstance generate_stp(int width, const GenFilter& filter, std::uint64_t seed, int generation_cap) {
  if (width < 3) throw InputError("STP width must be at least 3");
  filter.validate();
  Rng rng(seed);
  for (int attempt = 0; attempt < generation_cap; ++attempt) {
    std::vector<CellIndex> tiles = stp_goal_tiles(width);
    if (width == 3) {
      std::shuffle(tiles.begin(), tiles.end(), rng);
      if (!stp_is_solvable(tiles, width)) continue;
    } else {
      PuzzleInstance scratch = make_stp_instance(width, tiles);
      State s = scratch.start;
      const int moves = std::uniform_int_distribution<int>(20, 30)(rng);
      std::optional<Action> last;
      std::vector<Successor> next;
      for (int m = 0; m < moves; ++m) {
        successors(s, scratch, next);
        std::erase_if(next, [&](const Successor& c) {
          if (!last) return false;
          const auto a = static_cast<int>(*last), b = static_cast<int>(c.action);
          return (a ^ 1) == b;  // Up<->Down, Left<->Right
        });
        const auto& pick = next[uniform_index(rng, next.size())];
        last = pick.action;
        s = pick.state;
      }
      tiles = s.cells;
    }
    PuzzleInstance inst = make_stp_instance(width, std::move(tiles));
    if (evaluate_filter(inst, filter).accepted) {
      inst.seed = seed;
      inst.provenance = (width == 3 ? "random permutation" : "random scramble") + std::string(" attempt=") +
                        std::to_string(attempt + 1);
      return inst;
    }
  }
  throw GenerationExhausted("no STP puzzle passed the filter within " + std::to_string(generation_cap) +
                            " attempts (seed " + std::to_string(seed) + ")");
}

std::string SymbolTable::render(std::span<const CellIndex> tiles) const {
  std::string out;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(symbol_of_digit.at(static_cast<std::size_t>(tiles[i])));
  }
  return out;
}

std::vector<CellIndex> SymbolTable::digits(std::string_view rendered) const {
  std::vector<CellIndex> out;
  for (char ch : rendered) {
    if (ch == ' ') continue;
    const auto it = std::find(symbol_of_digit.begin(), symbol_of_digit.end(), ch);
    if (it == symbol_of_digit.end()) throw InputError(std::string("unknown STP symbol '") + ch + "'");
    out.push_back(static_cast<CellIndex>(it - symbol_of_digit.begin()));
  }
  return out;
}

SymbolTable make_symbol_table(int width, std::uint64_t seed) {
  const int needed = width * width - 1;
  if (width < 2 || needed > 26) throw InputError("STP width " + std::to_string(width) + " exceeds the alphabet");
  static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz";
  Rng rng(seed);
  std::string letters;
  std::sample(kAlphabet.begin(), kAlphabet.end(), std::back_inserter(letters), needed, rng);
  std::sort(letters.begin(), letters.end());
  SymbolTable table;
  table.symbol_of_digit.push_back('0');
  table.symbol_of_digit.insert(table.symbol_of_digit.end(), letters.begin(), letters.end());
  return table;
}

RemappedStp remap_stp_symbols(const PuzzleInstance& instance, std::uint64_t seed) {
  if (instance.domain != Domain::Stp) throw UnsupportedDomain("symbol remapping applies to STP only");
  RemappedStp out;
  out.table = make_symbol_table(instance.cols, seed);
  out.puzzle = out.table.render(instance.start.cells);
  out.goal = out.table.render(instance.goal_tiles);
  return out;
}

int SplitSpec::count() const noexcept {
  int n = 0;
  for (const auto& p : parts) n += p.count;
  return n;
}

void SplitSpec::validate() const {
  if (parts.empty()) throw InputError("split " + name + " has no parts");
  for (const auto& p : parts) {
    if (p.count <= 0) throw InputError("split " + name + " part count must be positive");
    p.filter.validate();
  }
}

std::vector<SplitSpec> default_splits(Domain domain) {
  auto filt = [](int o_l, double alpha, std::optional<std::int64_t> bmin, std::optional<std::int64_t> bmax) {
    GenFilter f;
    f.min_plan_length = o_l;
    f.alpha = alpha;
    f.beta_min = bmin;
    f.beta_max = bmax;
    return f;
  };
  switch (domain) {
    case Domain::Maze: {
      const auto f20 = filt(20, 3.5, std::nullopt, std::nullopt);
      const auto f30 = filt(30, 3.5, std::nullopt, std::nullopt);
      return {{"train", domain, {{750, 20, 0, f20}}},
              {"val", domain, {{750, 20, 0, f20}}},
              {"test-iid", domain, {{500, 20, 0, f20}}},
              {"test-ood", domain, {{500, 30, 0, f30}}}};
    }
    case Domain::Sokoban: {
      const auto easy = filt(20, 6.0, 0, 7000);
      const auto hard = filt(20, 6.0, 7000, 14000);
      return {{"train", domain, {{1000, 10, 2, easy}}},
              {"val", domain, {{1000, 10, 2, easy}}},
              {"test-iid", domain, {{284, 10, 2, easy}}},
              {"test-ood",
               domain,
               {{15, 10, 2, hard}, {100, 10, 3, easy}, {100, 10, 3, hard}, {100, 10, 4, easy}, {100, 10, 4, hard}}}};
    }
    case Domain::Stp: {
      const auto f = filt(20, 6.0, 0, 5000);
      return {{"train", domain, {{1000, 3, 0, f}}},
              {"val", domain, {{1000, 3, 0, f}}},
              {"test-iid", domain, {{500, 3, 0, f}}},
              {"test-ood", domain, {{250, 4, 0, f}, {250, 5, 0, f}}}};
    }
  }
  return {};
}

SplitSpec scale_split(SplitSpec spec, double scale) {
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  for (auto& p : spec.parts) p.count = std::max(1, static_cast<int>(std::ceil(p.count * scale - 1e-9)));
  return spec;
}

std::vector<PuzzleInstance> generate_split(const SplitSpec& spec, std::uint64_t master_seed, int jobs,
                                           std::span<const PuzzleInstance> boxoban) {
  spec.validate();
  const std::uint64_t split_seed = derive_seed(master_seed, spec.name);
  std::vector<PuzzleInstance> out;
  int offset = 0;
  for (std::size_t part_index = 0; part_index < spec.parts.size(); ++part_index) {
    const auto& part = spec.parts[part_index];
    std::vector<PuzzleInstance> block;
    if (spec.domain == Domain::Sokoban && !boxoban.empty()) {
      block = select_boxoban(boxoban, part.boxes, part.filter, part.count,
                             derive_seed(split_seed, 0x5000 + part_index), jobs);
    } else {
      block.resize(static_cast<std::size_t>(part.count));
      parallel_for(block.size(), jobs, [&](std::size_t k) {
        const std::uint64_t seed = derive_seed(split_seed, static_cast<std::uint64_t>(offset) + k);
        switch (spec.domain) {
          case Domain::Maze: block[k] = generate_maze(part.size, part.size, part.filter, seed); break;
          case Domain::Sokoban: block[k] = generate_sokoban(part.size, part.size, part.boxes, part.filter, seed); break;
          case Domain::Stp: block[k] = generate_stp(part.size, part.filter, seed); break;
        }
      });
    }
    for (std::size_t k = 0; k < block.size(); ++k) {
      char id[96];
      std::snprintf(id, sizeof id, "%s-%s-%05d", std::string(domain_name(spec.domain)).c_str(), spec.name.c_str(),
                    offset + static_cast<int>(k));
      block[k].id = id;
      out.push_back(std::move(block[k]));
    }
    offset += part.count;
  }
  return out;
}

}  // namespace heurlab
