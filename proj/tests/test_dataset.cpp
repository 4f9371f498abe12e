#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "heurlab/ascii.hpp"
#include "heurlab/common.hpp"
#include "heurlab/dataset.hpp"
#include "heurlab/generation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace heurlab;

namespace {

std::vector<PuzzleInstance> small_mazes(int n, std::uint64_t seed) {
  std::vector<PuzzleInstance> out;
  GenFilter f;
  f.min_plan_length = 15;
  for (int i = 0; i < n; ++i) {
    out.push_back(generate_maze(14, 14, f, seed + static_cast<std::uint64_t>(i)));
    out.back().id = "m" + std::to_string(i);
  }
  return out;
}

// One instance with `n` path nodes and random 12-dimensional features, so
// distinct examples are far from collinear.
std::vector<TrainingExample> synthetic_path(const std::string& id, int n) {
  std::vector<TrainingExample> out;
  for (int g = 0; g < n; ++g) {
    TrainingExample e;
    e.instance_id = id;
    e.g = g;
    e.plan_len = n;
    e.section = section_of(g, n);
    e.state_key = id + "/" + std::to_string(g);
    Rng rng(derive_seed(fnv1a(id), static_cast<std::uint64_t>(g)));
    std::normal_distribution<double> normal;
    for (int d = 0; d < 12; ++d) e.features.push_back(normal(rng));
    out.push_back(e);
  }
  return out;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

}  // namespace

TEST_CASE("residual targets along optimal paths") {
  const auto mazes = small_mazes(6, 40);
  std::vector<SearchResult> results;
  for (const auto& m : mazes) results.push_back(astar(m, QuickHeuristic{}));
  const auto pool = extract_pool(mazes, results);
  std::size_t expected = 0;
  for (const auto& r : results) expected += static_cast<std::size_t>(r.path_length);
  REQUIRE(pool.examples.size() == expected);
  CHECK(pool.instances_used == 6);
  std::size_t at = 0;
  for (std::size_t i = 0; i < mazes.size(); ++i) {
    for (int g = 0; g < results[i].path_length; ++g, ++at) {
      const auto& e = pool.examples[at];
      const State& s = results[i].path[static_cast<std::size_t>(g)];
      CHECK(e.instance_id == mazes[i].id);
      CHECK(e.g == g);
      CHECK(e.plan_len == results[i].path_length);
      CHECK(e.state_key == state_key(s));
      CHECK(e.section == section_of(g, e.plan_len));
      const auto remaining = testing::bfs_distance(mazes[i], s);
      REQUIRE(remaining.has_value());
      CHECK(e.d_star == doctest::Approx(*remaining - quick_heuristic(s, mazes[i])));
      CHECK(e.d_star >= 0.0);
    }
  }
}

TEST_CASE("unsolved results are skipped and counted") {
  const auto mazes = small_mazes(2, 70);
  SearchLimits tight;
  tight.max_iterations = 1;
  std::vector<SearchResult> results{astar(mazes[0], QuickHeuristic{}), astar(mazes[1], QuickHeuristic{}, tight)};
  const auto pool = extract_pool(mazes, results);
  CHECK(pool.skipped_unsolved == 1);
  CHECK(pool.instances_used == 1);
  CHECK(pool.examples.size() == static_cast<std::size_t>(results[0].path_length));
}

TEST_CASE("utility values") {
  CHECK(utility(0, 10, UtilityVariant::LogRatio) == 0.0);
  CHECK(utility(0, 10, UtilityVariant::Ratio) == 1.0);
  CHECK(utility(0, 10, UtilityVariant::LinearDepth) == 0.0);
  CHECK(utility(20, 30, UtilityVariant::LogRatio) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS((void)utility(10, 10, UtilityVariant::LogRatio), std::domain_error);
  for (auto v : {UtilityVariant::LogRatio, UtilityVariant::Ratio, UtilityVariant::LinearDepth}) {
    CHECK(parse_utility(utility_name(v)) == v);
    for (int plan = 2; plan <= 200; ++plan) {
      for (int g = 1; g < plan; ++g) CHECK(utility(g, plan, v) > utility(g - 1, plan, v));
    }
  }
}

TEST_CASE("softmax and planner-aware first draws") {
  const std::vector<double> logits{0.0, std::log(2.0)};
  const auto p = softmax(logits);
  CHECK(p[0] == doctest::Approx(1.0 / 3));
  CHECK(p[1] == doctest::Approx(2.0 / 3));
  const std::vector<double> huge{1000.0, 1000.0};
  CHECK(softmax(huge)[0] == doctest::Approx(0.5));

  std::vector<int> depths(25);
  std::iota(depths.begin(), depths.end(), 0);
  const auto hot = planner_aware_probabilities(depths, 25, 1e6, UtilityVariant::LogRatio);
  CHECK(testing::tv_distance(hot, std::vector<double>(25, 1.0 / 25)) < 1e-4);
  const auto cold = planner_aware_probabilities(depths, 25, 0.5, UtilityVariant::LogRatio);
  CHECK(cold.back() > cold.front());
  CHECK(std::is_sorted(cold.begin(), cold.end()));
}

TEST_CASE("high temperature sampling is empirically uniform") {
  const auto pool = synthetic_path("a", 20);
  std::vector<double> counts(20, 0.0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto pick = sample_planner_aware(pool, 1, 1e6, UtilityVariant::LogRatio, static_cast<std::uint64_t>(t), 1);
    REQUIRE(pick.size() == 1);
    counts[pick[0]] += 1.0 / trials;
  }
  CHECK(testing::tv_distance(counts, std::vector<double>(20, 1.0 / 20)) < 0.01);
}

TEST_CASE("weighted draws without replacement") {
  Rng rng(1);
  const std::vector<double> w{1, 2, 3, 4};
  const auto all = weighted_draw_without_replacement(w, 10, rng);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 4);
  std::vector<double> freq(4, 0.0);
  for (int t = 0; t < 100000; ++t) {
    const auto d = weighted_draw_without_replacement(w, 2, rng);
    REQUIRE(d.size() == 2);
    CHECK(d[0] != d[1]);
    freq[d[0]] += 1e-5;
  }
  CHECK(testing::tv_distance(freq, {0.1, 0.2, 0.3, 0.4}) < 0.01);
}

TEST_CASE("uniform sampling is uniform per instance") {
  const auto pool = synthetic_path("u", 30);
  CHECK(sample_uniform(pool, 30, 3).size() == 30);
  CHECK(sample_uniform(pool, 99, 3).size() == 30);
  std::vector<double> counts(30, 0.0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) counts[sample_uniform(pool, 1, static_cast<std::uint64_t>(t), 1)[0]] += 1.0;
  double chi2 = 0.0;
  const double expected = trials / 30.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 29 degrees of freedom, upper 1% point.
  CHECK(chi2 < 49.59);
}

TEST_CASE("sampling groups by instance and is reproducible") {
  auto pool = synthetic_path("a", 12);
  const auto b = synthetic_path("b", 7);
  pool.insert(pool.end(), b.begin(), b.end());
  const auto groups = group_by_instance(pool);
  REQUIRE(groups.size() == 2);
  CHECK(groups[1].size() == 7);
  const auto s = sample_planner_aware(pool, 5, 1.0, UtilityVariant::LogRatio, 11);
  CHECK(s.size() == 10);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(s == sample_planner_aware(pool, 5, 1.0, UtilityVariant::LogRatio, 11, 4));
  CHECK(std::count_if(s.begin(), s.end(), [](std::size_t i) { return i >= 12; }) == 5);
  CHECK(sample_planner_aware(pool, 9, 1.0, UtilityVariant::LogRatio, 11).size() == 16);
}

TEST_CASE("combining two sets weighs the intersection double") {
  const std::vector<std::size_t> s1{0, 1}, s2{1, 2};
  Rng rng(5);
  std::vector<double> freq(3, 0.0);
  for (int t = 0; t < 100000; ++t) freq[combine_sets(s1, s2, 1, rng)[0]] += 1e-5;
  CHECK(testing::tv_distance(freq, {0.25, 0.5, 0.25}) < 0.01);
  const std::vector<std::size_t> same{4, 7, 9};
  auto out = combine_sets(same, same, 3, rng);
  std::sort(out.begin(), out.end());
  CHECK(out == same);
}

TEST_CASE("SemDeDup keeps one of an exact duplicate pair") {
  auto pool = synthetic_path("s", 40);
  auto twin = pool[7];
  twin.state_key = "twin";
  pool.push_back(twin);
  SemDedupOptions opts;
  opts.budget = 40;
  opts.clusters = 1;
  const auto r = semdedup_select(pool, opts);
  CHECK(r.selected.size() == 40);
  CHECK(std::is_sorted(r.selected.begin(), r.selected.end()));
  const bool has7 = std::binary_search(r.selected.begin(), r.selected.end(), 7);
  const bool has_twin = std::binary_search(r.selected.begin(), r.selected.end(), 40);
  CHECK(has7 != has_twin);

  SemDedupOptions big = opts;
  big.budget = 1000;
  const auto all = semdedup_select(pool, big);
  CHECK(all.budget_exceeds_pool);
}

TEST_CASE("SemDeDup with an unreachable threshold subsamples") {
  const auto pool = synthetic_path("t", 60);
  SemDedupOptions opts;
  opts.budget = 25;
  opts.threshold = 1.0;
  opts.clusters = 3;
  const auto r = semdedup_select(pool, opts);
  CHECK(r.selected.size() == 25);
  CHECK(r.survivors == 60);
  for (std::size_t budget : {1, 10, 59}) {
    opts.budget = budget;
    CHECK(semdedup_select(pool, opts).selected.size() == budget);
  }
}

TEST_CASE("section splits") {
  const auto mazes = small_mazes(20, 300);
  const auto pool = solve_and_extract(mazes).examples;
  const std::size_t size = 60;
  for (auto split : {SectionSplit::Initial, SectionSplit::Middle, SectionSplit::End, SectionSplit::All,
                     SectionSplit::NotInitial, SectionSplit::NotMiddle, SectionSplit::NotEnd}) {
    const auto chosen = build_section_split(pool, split, size, 3);
    CHECK(chosen.size() == size);
    CHECK(std::set<std::size_t>(chosen.begin(), chosen.end()).size() == size);
    for (auto i : chosen) CHECK(split_contains(split, pool[i].section));
    CHECK(parse_section_split(section_split_name(split)) == split);
  }
  for (auto i : build_section_split(pool, SectionSplit::NotEnd, size, 4)) CHECK(pool[i].section != Section::End);
  CHECK_THROWS_AS((void)build_section_split(pool, SectionSplit::End, pool.size(), 1), InputError);
}

TEST_CASE("low temperature favours the end of the path") {
  const auto pool = solve_and_extract(small_mazes(30, 500)).examples;
  auto end_share = [&](Strategy strategy, double tau) {
    SamplingSpec spec;
    spec.strategy = strategy;
    spec.tau = tau;
    spec.budget = 150;
    spec.seed = 2;
    const auto sel = select_examples(pool, spec).indices;
    const auto ends = std::count_if(sel.begin(), sel.end(), [&](std::size_t i) { return pool[i].section == Section::End; });
    return static_cast<double>(ends) / static_cast<double>(sel.size());
  };
  CHECK(end_share(Strategy::PlannerAware, 0.3) > end_share(Strategy::Uniform, 1.0));
}

TEST_CASE("select_examples honours the budget") {
  const auto pool = solve_and_extract(small_mazes(10, 600)).examples;
  for (auto strategy : {Strategy::Uniform, Strategy::PlannerAware, Strategy::SemDedup, Strategy::Combined}) {
    SamplingSpec spec;
    spec.strategy = strategy;
    spec.budget = 57;
    const auto sel = select_examples(pool, spec);
    CHECK(sel.indices.size() == 57);
    CHECK(std::is_sorted(sel.indices.begin(), sel.indices.end()));
    CHECK(sel.indices == select_examples(pool, spec, 3).indices);
  }
  SamplingSpec full;
  full.strategy = Strategy::Full;
  CHECK(select_examples(pool, full).indices.size() == pool.size());
  SamplingSpec bad;
  bad.tau = 0.0;
  bad.budget = 5;
  CHECK_THROWS_AS(bad.validate(), InputError);
  CHECK(strategy_label(Strategy::PlannerAware, 2.0) == "D(n,2)");
  CHECK(strategy_label(Strategy::Uniform, 2.0) == "U(n)");
}

TEST_CASE("maze prompt reproduces the template byte for byte") {
  const auto pool = solve_and_extract(small_mazes(1, 800)).examples;
  const auto& e = pool[3];
  std::string want = testing::read_fixture("prompt_template.txt");
  want.pop_back();
  std::string board = e.ascii;
  if (board.back() == '\n') board.pop_back();
  want = replace_all(want, "{domain}", "maze");
  want = replace_all(want, "{puzzle_legend}", "@ - player, # - wall, . - empty cell, X - goal");
  want = replace_all(want, "{puzzle_str}", board);
  want = replace_all(want, "{heuristic}", std::to_string(static_cast<int>(e.quick_h)));
  CHECK(render_prompt(e) == want);
}

TEST_CASE("Sokoban prompt carries the Sokoban legend") {
  const auto inst = parse_ascii(testing::read_fixture("sokoban_two_box.txt"), Domain::Sokoban);
  const std::vector<PuzzleInstance> one{inst};
  const auto pool = solve_and_extract(one).examples;
  REQUIRE_FALSE(pool.empty());
  const auto prompt = render_prompt(pool[0]);
  CHECK(prompt.find("# @ - player, # - wall, . - empty docks, ' ' - empty cell, $ - box, X - box on dock, "
                    "O - player on dock\n") != std::string::npos);
  CHECK(prompt.find("observing the sokoban puzzle") != std::string::npos);
}

TEST_CASE("STP prompts use remapped letters") {
  const std::vector<PuzzleInstance> one{generate_stp(3, GenFilter{}, 4)};
  const auto pool = solve_and_extract(one).examples;
  REQUIRE_FALSE(pool.empty());
  const auto prompt = render_prompt(pool[0], 9);
  const auto start = prompt.find("puzzle_str = \"") + 14;
  const std::string row = prompt.substr(start, prompt.find('"', start) - start);
  CHECK(std::none_of(row.begin(), row.end(), [](char c) { return c >= '1' && c <= '9'; }));
  const auto table = make_symbol_table(3, derive_seed(9, pool[0].instance_id));
  std::vector<CellIndex> digits;
  std::istringstream first_row(pool[0].ascii.substr(0, pool[0].ascii.find('\n')));
  for (int d; first_row >> d;) digits.push_back(d);
  CHECK(table.digits(row) == digits);
  CHECK(prompt.find("0 - empty space") != std::string::npos);
  CHECK(prompt.find("goal = \"" + table.render(stp_goal_tiles(3)) + "\"") != std::string::npos);
}

TEST_CASE("record and prompt exports") {
  const auto pool = solve_and_extract(small_mazes(3, 900)).examples;
  testing::TempDir dir("export");
  export_corpus(pool, ExportFormat::Records, dir / "records.jsonl");
  CHECK(read_records(dir / "records.jsonl") == pool);
  export_corpus(pool, ExportFormat::Prompts, dir / "prompts.jsonl");
  const auto text = read_text(dir / "prompts.jsonl");
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == pool.size());
  CHECK(text.find("\"target\"") != std::string::npos);
  CHECK_THROWS_AS(export_corpus({}, ExportFormat::Records, dir / "empty.jsonl"), InputError);
  CHECK(from_hex(to_hex(std::string("\x00\xff\x10", 3))) == std::string("\x00\xff\x10", 3));
}
