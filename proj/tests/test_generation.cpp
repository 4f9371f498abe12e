#include <algorithm>
#include <set>

#include "doctest.h"
#include "heurlab/common.hpp"
#include "heurlab/ascii.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/instance_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace heurlab;

TEST_CASE("filter invariants are validated") {
  GenFilter f;
  f.alpha = 0.5;
  CHECK_THROWS_AS(f.validate(), InputError);
  f.alpha = 1.0;
  f.beta_min = 10;
  f.beta_max = 5;
  CHECK_THROWS_AS(f.validate(), InputError);
  f.beta_max = 10;
  CHECK_NOTHROW(f.validate());
  f.min_plan_length = -1;
  CHECK_THROWS_AS(f.validate(), InputError);
}

TEST_CASE("generated mazes satisfy their filter") {
  GenFilter f;
  f.min_plan_length = 20;
  f.alpha = 3.5;
  int multi_path = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto maze = generate_maze(20, 20, f, seed);
    CHECK(maze.rows == 21);
    CHECK(maze.cols == 21);
    const auto r = astar(maze, QuickHeuristic{});
    REQUIRE(r.solved());
    CHECK(r.path_length > 20);
    CHECK(static_cast<double>(r.closed_length) / r.path_length > 3.5);
    // A perfect maze is a tree: open cells minus one equals open adjacencies.
    int open = 0, edges = 0;
    for (CellIndex i = 0; i < maze.cell_count(); ++i) {
      if (maze.is_wall(i)) continue;
      ++open;
      const Cell c = maze.cell(i);
      if (c.col + 1 < maze.cols && !maze.is_wall(i + 1)) ++edges;
      if (c.row + 1 < maze.rows && !maze.is_wall(i + maze.cols)) ++edges;
    }
    multi_path += edges > open - 1 ? 1 : 0;
  }
  CHECK(multi_path >= 1);
}

TEST_CASE("an unsatisfiable filter exhausts generation") {
  GenFilter f;
  f.min_plan_length = 10000;
  MazeOptions opts;
  opts.generation_cap = 3;
  CHECK_THROWS_AS((void)generate_maze(10, 10, f, 1, opts), GenerationExhausted);
}

TEST_CASE("maze default split shapes and scaling") {
  const auto splits = default_splits(Domain::Maze);
  REQUIRE(splits.size() == 4);
  CHECK(splits[0].name == "train");
  CHECK(splits[0].count() == 750);
  CHECK(splits[3].parts[0].size == 30);
  CHECK(splits[3].parts[0].filter.min_plan_length == 30);
  CHECK(scale_split(splits[0], 0.1).count() == 75);
  CHECK(scale_split(splits[2], 0.1).count() == 50);
  const auto sok = default_splits(Domain::Sokoban);
  std::set<int> boxes;
  for (const auto& p : sok[3].parts) boxes.insert(p.boxes);
  CHECK(boxes == std::set<int>{2, 3, 4});
  const auto stp = default_splits(Domain::Stp);
  CHECK(stp[3].parts.size() == 2);
  CHECK(stp[3].parts[0].count == 250);
  CHECK(stp[3].parts[0].size == 4);
  CHECK(stp[3].parts[1].size == 5);
}

TEST_CASE("splits do not depend on the worker count") {
  auto spec = scale_split(default_splits(Domain::Maze)[0], 0.02);
  const auto a = generate_split(spec, 9, 1);
  const auto b = generate_split(spec, 9, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(render_ascii(a[i]) == render_ascii(b[i]));
  }
  const auto c = generate_split(spec, 10, 1);
  CHECK(render_ascii(a[0]) != render_ascii(c[0]));
}

TEST_CASE("boxoban fixture") {
  const auto puzzles = load_boxoban(testing::fixture_path("two_puzzles.boxoban"));
  REQUIRE(puzzles.size() == 2);
  for (const auto& p : puzzles) {
    CHECK(p.rows == 10);
    CHECK(p.cols == 10);
    CHECK(p.start.cells.size() == 4);
    CHECK(p.docks.size() == 4);
  }
  // Every board is followed by a blank line, the last one included.
  CHECK(render_boxoban(puzzles) == testing::read_fixture("two_puzzles.boxoban") + "\n");
  CHECK_THROWS_AS((void)parse_boxoban("; 7\n#####\n#@$ #\n#####\n", "bad"), InputError);
}

TEST_CASE("box subsampling keeps matching boxes and docks") {
  const auto puzzles = load_boxoban(testing::fixture_path("two_puzzles.boxoban"));
  const auto two = subsample_boxes(puzzles[0], 2, 5);
  CHECK(two.start.cells.size() == 2);
  CHECK(two.docks.size() == 2);
  for (CellIndex b : two.start.cells) {
    CHECK(std::binary_search(puzzles[0].start.cells.begin(), puzzles[0].start.cells.end(), b));
  }
  CHECK_THROWS_AS((void)subsample_boxes(puzzles[0], 5, 5), InputError);
}

TEST_CASE("boxoban selection respects the iteration window") {
  const auto puzzles = load_boxoban(testing::fixture_path("two_puzzles.boxoban"));
  GenFilter f;
  f.beta_min = 1;
  f.beta_max = 100000;
  const auto chosen = select_boxoban(puzzles, 2, f, 2, 3);
  CHECK(chosen.size() <= 2);
  for (const auto& inst : chosen) {
    const auto r = astar(inst, QuickHeuristic{});
    REQUIRE(r.solved());
    CHECK(r.expansions >= 1);
    CHECK(r.expansions <= 100000);
  }
}

TEST_CASE("synthetic Sokoban rooms are solvable and filtered") {
  const auto split = generate_split(scale_split(default_splits(Domain::Sokoban)[0], 0.01), 4);
  CHECK(split.size() == 10);
  for (const auto& inst : split) {
    CHECK(inst.rows == 10);
    const auto r = astar(inst, QuickHeuristic{});
    REQUIRE(r.solved());
    CHECK(r.path_length > 20);
    CHECK(r.expansions <= 7000);
    CHECK(static_cast<double>(r.closed_length) / r.path_length > 6.0);
  }
}

TEST_CASE("STP generation") {
  GenFilter f;
  f.min_plan_length = 20;
  for (int width : {3, 4}) {
    const auto inst = generate_stp(width, f, 12);
    CHECK(stp_is_solvable(inst.start.cells, width));
    CHECK(astar(inst, QuickHeuristic{}).path_length > 20);
  }
  GenFilter impossible;
  impossible.min_plan_length = 1000;
  CHECK_THROWS_AS((void)generate_stp(3, impossible, 1, 5), GenerationExhausted);
}

TEST_CASE("symbol tables") {
  const auto t = make_symbol_table(3, 42);
  CHECK(t.symbol_of_digit.size() == 9);
  CHECK(t.symbol_of_digit[0] == '0');
  CHECK(std::is_sorted(t.symbol_of_digit.begin() + 1, t.symbol_of_digit.end()));
  CHECK(std::adjacent_find(t.symbol_of_digit.begin(), t.symbol_of_digit.end()) == t.symbol_of_digit.end());
  const auto again = make_symbol_table(3, 42);
  CHECK(t.symbol_of_digit == again.symbol_of_digit);
  const std::vector<CellIndex> tiles{3, 1, 2, 5, 8, 6, 7, 0, 4};
  const std::string shown = t.render(tiles);
  CHECK(t.digits(shown) == tiles);
  // The goal reads "0" followed by the letters in alphabetical order.
  const std::string goal = t.render(stp_goal_tiles(3));
  CHECK(goal.substr(0, 2) == "0 ");
  std::string letters;
  for (char c : goal) {
    if (c != ' ' && c != '0') letters += c;
  }
  CHECK(std::is_sorted(letters.begin(), letters.end()));
  CHECK_THROWS_AS((void)make_symbol_table(6, 1), InputError);
  CHECK_THROWS_AS((void)t.digits("0 a b"), InputError);
}

TEST_CASE("a letter row maps back to its permutation") {
  SymbolTable t;
  t.symbol_of_digit = {'0', 'a', 'h', 'i', 'm', 'o', 'u', 'v', 'y'};
  const auto tiles = t.digits("i a h m v o u 0 y");
  CHECK(tiles == std::vector<CellIndex>{3, 1, 2, 4, 7, 5, 6, 0, 8});
  CHECK(t.render(stp_goal_tiles(3)) == "0 a h i m o u v y");
}

TEST_CASE("instance directories round trip and refuse overwrites") {
  testing::TempDir dir("instances");
  const auto split = generate_split(scale_split(default_splits(Domain::Stp)[0], 0.005), 2);
  write_instance_set(dir.path(), {Domain::Stp, "train", split}, false);
  const auto back = read_instance_set(dir.path());
  REQUIRE(back.instances.size() == split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    CHECK(back.instances[i].id == split[i].id);
    CHECK(back.instances[i].start == split[i].start);
    CHECK(back.instances[i].goal_tiles == split[i].goal_tiles);
  }
  CHECK_THROWS_AS(write_instance_set(dir.path(), {Domain::Stp, "train", split}, false), InputError);
  CHECK_NOTHROW(write_instance_set(dir.path(), {Domain::Stp, "train", split}, true));
  write_text(dir / (split[0].id + ".txt"), "1 2 3 4 5 6 7 8 0\n");
  CHECK_THROWS_AS((void)read_instance_set(dir.path()), InputError);
}
