#include <set>

#include "doctest.h"
#include "heurlab/common.hpp"
#include "heurlab/ascii.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/oracle_noise.hpp"
#include "heurlab/search.hpp"
#include "support/oracles.hpp"

using namespace heurlab;

namespace {

bool legal_path(const std::vector<State>& path, const PuzzleInstance& inst) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto kids = successors(path[i - 1], inst);
    bool found = false;
    for (const auto& k : kids) found = found || k.state == path[i];
    if (!found) return false;
  }
  return true;
}

// Records every batch it is asked for.
class CountingHeuristic final : public HeuristicEvaluator {
 public:
  void evaluate_batch(const PuzzleInstance& inst, std::span<const HeuristicQuery> queries,
                      std::span<double> out) const override {
    ++batches;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      out[i] = quick_heuristic(*queries[i].state, inst);
      keys.insert(state_key(*queries[i].state));
    }
  }
  [[nodiscard]] bool shareable() const noexcept override { return false; }
  mutable std::int64_t batches = 0;
  mutable std::set<std::string> keys;
};

}  // namespace

TEST_CASE("start equal to goal") {
  const auto inst = parse_ascii("#####\n#...#\n#.O.#\n#...#\n#####\n", Domain::Maze);
  const auto r = astar(inst, QuickHeuristic{});
  REQUIRE(r.solved());
  CHECK(r.path_length == 0);
  CHECK(r.path.size() == 1);
  CHECK(r.selections == 1);
  CHECK(r.expansions == 0);
  CHECK(r.closed_length == 0);
}

TEST_CASE("adjacent start and goal") {
  const auto inst = parse_ascii("#####\n#@X.#\n#...#\n#####\n", Domain::Maze);
  const auto r = astar(inst, QuickHeuristic{});
  REQUIRE(r.solved());
  CHECK(r.path_length == 1);
  CHECK(r.path.front() == inst.start);
  CHECK(is_goal(r.path.back(), inst));
}

TEST_CASE("walled-off goal exhausts the frontier") {
  const auto inst = parse_ascii("#######\n#@.#X.#\n#..#..#\n#######\n", Domain::Maze);
  const auto r = astar(inst, QuickHeuristic{});
  CHECK(r.status == SearchStatus::FrontierExhausted);
  CHECK(r.path.empty());
  CHECK(r.distinct_states == 4);
}

TEST_CASE("iteration limit is an ordinary result") {
  GenFilter f;
  f.min_plan_length = 20;
  const auto maze = generate_maze(20, 20, f, 42);
  SearchLimits limits;
  limits.max_iterations = 3;
  const auto r = astar(maze, ZeroHeuristic{}, limits);
  CHECK(r.status == SearchStatus::LimitExceeded);
  CHECK(r.expansions == 3);
}

TEST_CASE("paths are optimal and legal across domains") {
  std::vector<PuzzleInstance> instances;
  for (int i = 0; i < 10; ++i) {
    GenFilter f;
    f.min_plan_length = 10;
    instances.push_back(generate_maze(16, 16, f, 10 + i));
    instances.push_back(generate_sokoban_room(8, 8, 2, 20 + i));
    instances.push_back(generate_stp(3, GenFilter{}, 30 + i));
  }
  for (const auto& inst : instances) {
    const auto bfs = testing::bfs_distance(inst);
    for (TieBreak tb : {TieBreak::LargerG, TieBreak::SmallerG}) {
      const auto r = astar(inst, QuickHeuristic{}, {}, tb);
      REQUIRE(bfs.has_value());
      REQUIRE(r.solved());
      CHECK(r.path_length == *bfs);
      CHECK(r.path.size() == static_cast<std::size_t>(r.path_length) + 1);
      CHECK(legal_path(r.path, inst));
      CHECK(r.selections == r.closed_length + 1);
    }
  }
}

TEST_CASE("heuristic is batched once per expansion plus the root") {
  GenFilter f;
  f.min_plan_length = 20;
  const auto maze = generate_maze(20, 20, f, 77);
  CountingHeuristic h;
  const auto r = astar(maze, h);
  REQUIRE(r.solved());
  CHECK(h.batches == r.heuristic_calls);
  CHECK(r.heuristic_calls == r.expansions + 1);
  CHECK(static_cast<std::int64_t>(h.keys.size()) == r.distinct_states);
  CHECK(r.heuristic_calls <= r.distinct_states);
}

TEST_CASE("closed length shrinks with better heuristics") {
  GenFilter f;
  f.min_plan_length = 20;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto maze = generate_maze(20, 20, f, 500 + seed);
    const auto zero = astar(maze, ZeroHeuristic{});
    const auto quick = astar(maze, QuickHeuristic{});
    const auto exact = astar(maze, NoisyOracle(oracle_distances(maze), NoiseSpec{}));
    CHECK(zero.closed_length >= quick.closed_length);
    CHECK(quick.closed_length >= exact.closed_length);
    CHECK(exact.closed_length == exact.path_length);
  }
}

TEST_CASE("search results are deterministic apart from wall time") {
  const auto inst = generate_sokoban_room(9, 9, 2, 8);
  const auto a = astar(inst, QuickHeuristic{});
  const auto b = astar(inst, QuickHeuristic{});
  CHECK(a.path == b.path);
  CHECK(a.closed_length == b.closed_length);
  CHECK(a.nodes_generated == b.nodes_generated);
  CHECK(a.reopened == b.reopened);
}

TEST_CASE("reconstruct_path follows parents") {
  std::vector<SearchNode> tree(3);
  tree[0].state.player = 0;
  tree[1].state.player = 1;
  tree[1].parent = 0;
  tree[1].g = 1;
  tree[2].state.player = 2;
  tree[2].parent = 1;
  tree[2].g = 2;
  CHECK(reconstruct_path(tree, 0).size() == 1);
  const auto p = reconstruct_path(tree, 2);
  REQUIRE(p.size() == 3);
  CHECK(p[0].player == 0);
  CHECK(p[2].player == 2);
}
