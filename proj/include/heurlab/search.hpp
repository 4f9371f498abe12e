#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heurlab/domain.hpp"

namespace heurlab {

/// One heuristic request: the state being scored and the tree cost g of the
/// node that will carry it.
struct HeuristicQuery {
  const State* state = nullptr;
  int g = 0;
};

/// Scores a batch of states. The engine calls evaluate_batch once per
/// expansion with every child of the expanded node, plus once for the root.
/// Implementations must return finite, nonnegative values and must give the
/// same value for the same (instance, state, g) regardless of caching.
class HeuristicEvaluator {
 public:
  virtual ~HeuristicEvaluator() = default;
  virtual void evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                              std::span<double> out) const = 0;
  /// True when one evaluator may serve concurrent searches.
  [[nodiscard]] virtual bool shareable() const noexcept = 0;
};

/// The domain's admissible quick heuristic.
class QuickHeuristic final : public HeuristicEvaluator {
 public:
  explicit QuickHeuristic(SokobanPlayerTerm term = SokobanPlayerTerm::AdjacentCell) : term_(term) {}
  void evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                      std::span<double> out) const override;
  [[nodiscard]] bool shareable() const noexcept override { return true; }

 private:
  SokobanPlayerTerm term_;
};

/// h = 0: uniform-cost search.
class ZeroHeuristic final : public HeuristicEvaluator {
 public:
  void evaluate_batch(const PuzzleInstance&, std::span<const HeuristicQuery> queries,
                      std::span<double> out) const override;
  [[nodiscard]] bool shareable() const noexcept override { return true; }
};

/// Order among frontier nodes of equal f. Remaining ties go to the most
/// recently inserted node (LIFO).
enum class TieBreak : std::uint8_t { LargerG, SmallerG };

struct SearchLimits {
  std::optional<std::int64_t> max_iterations;  ///< cap on expansions
  std::optional<double> max_wall_time;         ///< seconds
};

enum class SearchStatus : std::uint8_t { SolutionFound, FrontierExhausted, LimitExceeded };

[[nodiscard]] std::string_view status_name(SearchStatus status) noexcept;

struct SearchNode {
  State state;
  int g = 0;
  double h = 0.0;
  double f = 0.0;                      ///< g + h
  std::optional<std::size_t> parent;   ///< index into the tree
  std::uint64_t insertion_seq = 0;
};

struct SearchResult {
  SearchStatus status = SearchStatus::FrontierExhausted;
  std::vector<State> path;            ///< start .. goal when solved
  int path_length = 0;                ///< moves, path.size() - 1
  std::int64_t closed_length = 0;     ///< S: nodes moved to the closed list
  std::int64_t selections = 0;        ///< frontier pops, including the goal
  std::int64_t expansions = 0;
  std::int64_t nodes_generated = 0;   ///< children produced by expansions
  std::int64_t nodes_admitted = 0;    ///< children added to the tree
  std::int64_t reopened = 0;          ///< admitted children that superseded a closed node
  std::int64_t distinct_states = 0;   ///< states ever seen (root included)
  std::int64_t heuristic_calls = 0;   ///< evaluate_batch invocations
  std::int64_t heuristic_states = 0;  ///< states scored across all batches
  double wall_time = 0.0;             ///< seconds

  [[nodiscard]] bool solved() const noexcept { return status == SearchStatus::SolutionFound; }
};

/// A* search. Selection pops the frontier node of least f; the goal test is
/// applied to the selected node. A child enters the tree when no frontier or
/// closed node holds its state, or when the existing node has strictly larger
/// f; a superseded closed node is reopened. Edge costs are 1.
[[nodiscard]] SearchResult astar(const PuzzleInstance& instance, const HeuristicEvaluator& heuristic,
                                 const SearchLimits& limits = {}, TieBreak tie_break = TieBreak::LargerG);

/// States from the root to `goal_index` by parent links.
[[nodiscard]] std::vector<State> reconstruct_path(std::span<const SearchNode> tree, std::size_t goal_index);

}  // namespace heurlab
