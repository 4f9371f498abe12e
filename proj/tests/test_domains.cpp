#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "heurlab/common.hpp"
#include "heurlab/ascii.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/hungarian.hpp"
#include "heurlab/instance_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace heurlab;

namespace {

// Boxes at distance 2/3 and 4/1 from the two docks, player next to the first box.
const char* kAssignmentBoard =
    "#######\n"
    "#     #\n"
    "#@$ . #\n"
    "#     #\n"
    "#  .  #\n"
    "#  $  #\n"
    "#     #\n"
    "#######\n";

}  // namespace

TEST_CASE("maze parse, goal and successors") {
  const auto maze = parse_ascii(
      "#####\n"
      "#...#\n"
      "#.@.#\n"
      "#..X#\n"
      "#####\n",
      Domain::Maze);
  CHECK(maze.rows == 5);
  CHECK(maze.cols == 5);
  CHECK(successors(maze.start, maze).size() == 4);
  const auto kids = successors(maze.start, maze);
  CHECK(kids[0].action == Action::Up);
  CHECK(kids[3].action == Action::Right);
  CHECK(quick_heuristic(maze.start, maze) == 2.0);
}

TEST_CASE("maze Manhattan heuristic example") {
  PuzzleInstance maze = parse_ascii(testing::read_fixture("maze_21x21.txt"), Domain::Maze);
  const State s = make_maze_state(maze, {1, 1});
  maze.goal = maze.index({4, 5});
  CHECK(quick_heuristic(s, maze) == 7.0);
}

TEST_CASE("fixture boards round trip through text") {
  for (const auto& [file, domain] : {std::pair{"maze_21x21.txt", Domain::Maze},
                                     std::pair{"sokoban_two_box.txt", Domain::Sokoban}}) {
    const std::string text = testing::read_fixture(file);
    const auto inst = parse_ascii(text, domain);
    CHECK(render_ascii(inst) == text);
  }
}

TEST_CASE("the two-box Sokoban fixture is a 10x10 board with two boxes and two docks") {
  const auto inst = parse_ascii(testing::read_fixture("sokoban_two_box.txt"), Domain::Sokoban);
  CHECK(inst.rows == 10);
  CHECK(inst.cols == 10);
  CHECK(inst.start.cells.size() == 2);
  CHECK(inst.docks.size() == 2);
  const auto d = testing::bfs_distance(inst);
  REQUIRE(d.has_value());
  CHECK(quick_heuristic(inst.start, inst) <= *d);
}

TEST_CASE("parse errors carry line and column") {
  try {
    (void)parse_ascii("#####\n#@.@#\n#..X#\n#####\n", Domain::Maze);
    FAIL("two players accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 4);
  }
  CHECK_THROWS_AS((void)parse_ascii("#####\n#@.?#\n#..X#\n#####\n", Domain::Maze), ParseError);
  CHECK_THROWS_AS((void)parse_ascii("#####\n#@.#\n#..X#\n#####\n", Domain::Maze), ParseError);
  CHECK_THROWS_AS((void)parse_ascii("#####\n#@$.#\n#..$#\n#####\n", Domain::Sokoban), ParseError);
  CHECK_THROWS_AS((void)parse_ascii("1 2 0", Domain::Stp), InputError);
  CHECK_THROWS_AS((void)parse_ascii("1 2 3 4 5 6 7 8 8", Domain::Stp), InputError);
}

TEST_CASE("Sokoban assignment example") {
  const auto inst = parse_ascii(kAssignmentBoard, Domain::Sokoban);
  CHECK(hungarian_min_cost({{2, 3}, {4, 1}}).total_cost == 3.0);
  // Literal player term: distance to the nearest box.
  CHECK(quick_heuristic(inst.start, inst, SokobanPlayerTerm::BoxCell) == 4.0);
  // Default term counts steps to a pushing position, one less.
  CHECK(quick_heuristic(inst.start, inst) == 3.0);
  const auto d = testing::bfs_distance(inst);
  REQUIRE(d.has_value());
  CHECK(quick_heuristic(inst.start, inst) <= *d);
}

TEST_CASE("Sokoban pushes are blocked by walls and boxes") {
  const auto inst = parse_ascii(
      "######\n"
      "#@$#.#\n"
      "#    #\n"
      "######\n",
      Domain::Sokoban);
  for (const auto& s : successors(inst.start, inst)) CHECK(s.action != Action::Right);
  const auto two = parse_ascii(
      "#######\n"
      "#@$$ .#\n"
      "#    .#\n"
      "#######\n",
      Domain::Sokoban);
  for (const auto& s : successors(two.start, two)) CHECK(s.action != Action::Right);
}

TEST_CASE("Sokoban state keys ignore box order") {
  const auto inst = parse_ascii(kAssignmentBoard, Domain::Sokoban);
  const auto a = make_sokoban_state(inst, {1, 1}, {{2, 2}, {5, 3}});
  const auto b = make_sokoban_state(inst, {1, 1}, {{5, 3}, {2, 2}});
  CHECK(state_key(a) == state_key(b));
  const auto c = make_sokoban_state(inst, {1, 2}, {{5, 3}, {2, 2}});
  CHECK(state_key(a) != state_key(c));
}

TEST_CASE("state keys do not collide on random Sokoban states") {
  const auto inst = parse_ascii(testing::read_fixture("sokoban_two_box.txt"), Domain::Sokoban);
  std::vector<CellIndex> floor;
  for (CellIndex i = 0; i < inst.cell_count(); ++i) {
    if (!inst.is_wall(i)) floor.push_back(i);
  }
  Rng rng(7);
  std::set<std::vector<CellIndex>> states;
  std::set<std::string> keys;
  for (int t = 0; t < 10000; ++t) {
    std::shuffle(floor.begin(), floor.end(), rng);
    std::vector<Cell> boxes{inst.cell(floor[1]), inst.cell(floor[2])};
    const State s = make_sokoban_state(inst, inst.cell(floor[0]), boxes);
    std::vector<CellIndex> repr{s.player};
    repr.insert(repr.end(), s.cells.begin(), s.cells.end());
    states.insert(repr);
    keys.insert(state_key(s));
  }
  CHECK(keys.size() == states.size());
}

TEST_CASE("STP successors and heuristic") {
  const auto corner = make_stp_instance(3, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(successors(corner.start, corner).size() == 2);
  CHECK(quick_heuristic(corner.start, corner) == 0.0);
  CHECK(is_goal(corner.start, corner));
  const auto center = make_stp_instance(3, {1, 2, 3, 4, 0, 5, 6, 7, 8});
  CHECK(successors(center.start, center).size() == 4);
}

TEST_CASE("STP solvability agrees with BFS on the small cases") {
  CHECK(stp_is_solvable(stp_goal_tiles(3), 3));
  CHECK_FALSE(stp_is_solvable(std::vector<CellIndex>{0, 2, 1, 3, 4, 5, 6, 7, 8}, 3));
  CHECK_FALSE(testing::bfs_distance(make_stp_instance(3, {0, 2, 1, 3, 4, 5, 6, 7, 8})).has_value());
  // Random walks from the goal stay solvable, also for even widths.
  Rng rng(3);
  for (int width : {3, 4, 5}) {
    auto inst = make_stp_instance(width, stp_goal_tiles(width));
    State s = inst.start;
    for (int step = 0; step < 200; ++step) {
      const auto kids = successors(s, inst);
      s = kids[std::uniform_int_distribution<std::size_t>(0, kids.size() - 1)(rng)].state;
      CHECK(stp_is_solvable(s.cells, width));
    }
  }
}

TEST_CASE("quick heuristics are admissible and maze/STP moves are symmetric") {
  Rng rng(11);
  std::vector<PuzzleInstance> instances;
  for (int i = 0; i < 3; ++i) {
    GenFilter f;
    f.min_plan_length = 5;
    instances.push_back(generate_maze(10, 10, f, 100 + i));
    instances.push_back(generate_sokoban_room(8, 8, 2, 200 + i));
    instances.push_back(generate_stp(3, GenFilter{}, 300 + i));
  }
  for (const auto& inst : instances) {
    State s = inst.start;
    for (int step = 0; step < 120; ++step) {
      const auto d = testing::bfs_distance(inst, s, 100000);
      if (d) CHECK(quick_heuristic(s, inst) <= *d);
      const auto kids = successors(s, inst);
      if (kids.empty()) break;
      if (inst.domain != Domain::Sokoban) {
        for (const auto& k : kids) {
          const auto back = successors(k.state, inst);
          CHECK(std::any_of(back.begin(), back.end(), [&](const Successor& b) { return b.state == s; }));
          if (inst.domain == Domain::Maze) {
            CHECK(std::abs(quick_heuristic(k.state, inst) - quick_heuristic(s, inst)) <= 1.0);
          }
        }
      }
      s = kids[std::uniform_int_distribution<std::size_t>(0, kids.size() - 1)(rng)].state;
    }
  }
}

TEST_CASE("feature vectors have fixed length and start with the quick heuristic") {
  GenFilter f;
  f.min_plan_length = 5;
  const auto maze = generate_maze(10, 10, f, 5);
  Rng rng(5);
  State s = maze.start;
  for (int t = 0; t < 100; ++t) {
    const auto v = feature_vector(s, maze);
    CHECK(v.size() == feature_length(maze));
    CHECK(v == feature_vector(s, maze));
    CHECK(v[0] == quick_heuristic(s, maze));
    const auto kids = successors(s, maze);
    s = kids[std::uniform_int_distribution<std::size_t>(0, kids.size() - 1)(rng)].state;
  }
  const State goal = make_maze_state(maze, maze.cell(maze.goal));
  CHECK(feature_vector(goal, maze)[0] == 0.0);
  const auto stp = make_stp_instance(3, stp_goal_tiles(3));
  CHECK(feature_vector(stp.start, stp)[0] == 0.0);
  CHECK(feature_vector(stp.start, stp).size() == feature_length(stp));
}

TEST_CASE("Hungarian small cases and errors") {
  CHECK(hungarian_min_cost({{0, 9}, {9, 0}}).total_cost == 0.0);
  const auto a = hungarian_min_cost({{2, 3}, {4, 1}});
  CHECK(a.total_cost == 3.0);
  CHECK(a.column_of_row == std::vector<std::size_t>{0, 1});
  CHECK(hungarian_min_cost(std::vector<std::vector<double>>{}).total_cost == 0.0);
  CHECK_THROWS_AS((void)hungarian_min_cost({{1, 2}, {3}}), InputError);
  CHECK_THROWS_AS((void)hungarian_min_cost({{1, std::nan("")}, {3, 4}}), InputError);
}

TEST_CASE("Hungarian matches permutation enumeration") {
  Rng rng(99);
  std::uniform_int_distribution<int> u(0, 9);
  for (int n = 1; n <= 6; ++n) {
    for (int t = 0; t < 50; ++t) {
      std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
      for (auto& row : m) {
        for (auto& v : row) v = u(rng);
      }
      CHECK(hungarian_min_cost(m).total_cost == testing::brute_force_assignment(m));
    }
  }
}
