#include "heurlab/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>

#include "heurlab/common.hpp"

namespace heurlab {

namespace {

struct FrontierEntry {
  double f;
  int g;
  std::uint64_t seq;
  std::size_t node;
};

// std::priority_queue pops the "largest"; this orders the best entry last.
struct WorseThan {
  TieBreak tie_break;
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const noexcept {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return tie_break == TieBreak::LargerG ? a.g < b.g : a.g > b.g;
    return a.seq < b.seq;
  }
};

struct LiveNode {
  std::size_t node;
  bool closed;
};

void check_heuristic(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("heuristic returned " + std::to_string(v) + "; values must be finite and nonnegative");
    }
  }
}

}  // namespace

void QuickHeuristic::evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                                    std::span<double> out) const {
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = quick_heuristic(*queries[i].state, instance, term_);
}

void ZeroHeuristic::evaluate_batch(const PuzzleInstance&, std::span<const HeuristicQuery> queries,
                                   std::span<double> out) const {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(queries.size()), 0.0);
}

std::string_view status_name(SearchStatus status) noexcept {
  switch (status) {
    case SearchStatus::SolutionFound: return "solved";
    case SearchStatus::FrontierExhausted: return "exhausted";
    case SearchStatus::LimitExceeded: return "limit";
  }
  return "unknown";
}

SearchResult astar(const PuzzleInstance& instance, const HeuristicEvaluator& heuristic, const SearchLimits& limits,
                   TieBreak tie_break) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  SearchResult result;
  std::vector<SearchNode> tree;
  std::unordered_map<std::string, LiveNode> live;  // state key -> node currently in frontier or closed
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, WorseThan> frontier(WorseThan{tie_break});
  std::uint64_t seq = 0;

  {
    double h = 0.0;
    const HeuristicQuery root_query{&instance.start, 0};
    heuristic.evaluate_batch(instance, {&root_query, 1}, {&h, 1});
    check_heuristic({&h, 1});
    ++result.heuristic_calls;
    ++result.heuristic_states;
    tree.push_back(SearchNode{instance.start, 0, h, h, std::nullopt, seq++});
    live.emplace(state_key(instance.start), LiveNode{0, false});
    frontier.push({h, 0, tree[0].insertion_seq, 0});
  }

  std::vector<Successor> children;
  std::vector<HeuristicQuery> queries;
  std::vector<double> hs;

  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.distinct_states = static_cast<std::int64_t>(live.size());
    result.wall_time = elapsed();
    return result;
  };

  while (!frontier.empty()) {
    if (limits.max_iterations && result.expansions >= *limits.max_iterations) {
      return finish(SearchStatus::LimitExceeded);
    }
    if (limits.max_wall_time && elapsed() > *limits.max_wall_time) return finish(SearchStatus::LimitExceeded);

    const FrontierEntry top = frontier.top();
    frontier.pop();
    const std::size_t current = top.node;
    const std::string key = state_key(tree[current].state);
    auto it = live.find(key);
    if (it == live.end() || it->second.node != current) continue;  // superseded entry

    ++result.selections;
    if (is_goal(tree[current].state, instance)) {
      result.path = reconstruct_path(tree, current);
      result.path_length = tree[current].g;
      return finish(SearchStatus::SolutionFound);
    }

    // Expansion: children are scored as one batch, then filtered.
    it->second.closed = true;
    ++result.closed_length;
    ++result.expansions;
    successors(tree[current].state, instance, children);
    result.nodes_generated += static_cast<std::int64_t>(children.size());
    if (children.empty()) continue;

    const int child_g = tree[current].g + 1;
    queries.clear();
    for (const auto& c : children) queries.push_back({&c.state, child_g});
    hs.assign(children.size(), 0.0);
    heuristic.evaluate_batch(instance, queries, hs);
    check_heuristic(hs);
    ++result.heuristic_calls;
    result.heuristic_states += static_cast<std::int64_t>(children.size());

    for (std::size_t i = 0; i < children.size(); ++i) {
      const double f = child_g + hs[i];
      std::string child_key = state_key(children[i].state);
      auto existing = live.find(child_key);
      if (existing != live.end()) {
        if (!(f < tree[existing->second.node].f)) continue;
        if (existing->second.closed) ++result.reopened;
      }
      const std::size_t index = tree.size();
      tree.push_back(SearchNode{std::move(children[i].state), child_g, hs[i], f, current, seq++});
      ++result.nodes_admitted;
      if (existing != live.end()) {
        existing->second = LiveNode{index, false};
      } else {
        live.emplace(std::move(child_key), LiveNode{index, false});
      }
      frontier.push({f, child_g, tree[index].insertion_seq, index});
    }
  }
  return finish(SearchStatus::FrontierExhausted);
}

std::vector<State> reconstruct_path(std::span<const SearchNode> tree, std::size_t goal_index) {
  std::vector<State> path;
  std::optional<std::size_t> at = goal_index;
  while (at) {
    path.push_back(tree[*at].state);
    at = tree[*at].parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace heurlab
