#include <cmath>
#include <set>

#include "doctest.h"
#include "heurlab/common.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/model.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace heurlab;

namespace {

std::vector<TrainingExample> random_examples(std::size_t n, std::size_t dims, std::uint64_t seed,
                                             bool linear_target) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<TrainingExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = out[i];
    e.instance_id = "i" + std::to_string(i % 17);
    for (std::size_t d = 0; d < dims; ++d) e.features.push_back(normal(rng) * static_cast<double>(d + 1));
    // Constant column to exercise the unit scale.
    e.features.push_back(3.0);
    double y = 5.0;
    for (std::size_t d = 0; d < dims; ++d) y += (static_cast<double>(d) - 1.5) * e.features[d];
    e.d_star = linear_target ? y : std::abs(normal(rng)) * 4.0;
  }
  return out;
}

std::vector<PuzzleInstance> mazes(int n, std::uint64_t seed) {
  std::vector<PuzzleInstance> out;
  GenFilter f;
  f.min_plan_length = 20;
  f.alpha = 3.5;
  for (int i = 0; i < n; ++i) {
    out.push_back(generate_maze(16, 16, f, seed + static_cast<std::uint64_t>(i)));
    out.back().id = "maze-" + std::to_string(i);
  }
  return out;
}

FeatureMatrix matrix_of(const std::vector<TrainingExample>& examples) {
  FeatureMatrix m;
  m.rows = examples.size();
  m.cols = examples.front().features.size();
  for (const auto& e : examples) m.data.insert(m.data.end(), e.features.begin(), e.features.end());
  return m;
}

}  // namespace

TEST_CASE("linear model recovers an exact linear target") {
  const auto train = random_examples(200, 4, 1, true);
  const auto model = ResidualModel::fit(train, ModelKind::Linear, 8, 1e-9);
  CHECK(mean_absolute_error(model, train) < 1e-6);
  const auto fresh = random_examples(50, 4, 2, true);
  CHECK(mean_absolute_error(model, fresh) < 1e-6);
}

TEST_CASE("k-NN edge cases") {
  const auto train = random_examples(120, 3, 3, false);
  const auto one = ResidualModel::fit(train, ModelKind::Knn, 1, 0.0);
  CHECK(mean_absolute_error(one, train) == 0.0);
  const auto all = ResidualModel::fit(train, ModelKind::Knn, 120, 0.0);
  double mean = 0.0;
  for (const auto& e : train) mean += e.d_star / 120.0;
  for (const auto& q : random_examples(20, 3, 4, false)) CHECK(all.predict(q.features) == doctest::Approx(mean));
  CHECK_THROWS_AS((void)ResidualModel::fit(train, ModelKind::Knn, 121, 0.0), InputError);
  CHECK_THROWS_AS((void)ResidualModel::fit(train, ModelKind::Knn, 0, 0.0), InputError);
}

TEST_CASE("k-NN matches a brute-force scan over standardized features") {
  const auto train = random_examples(400, 5, 5, false);
  const auto model = ResidualModel::fit(train, ModelKind::Knn, 8, 0.0);
  const std::size_t dims = train.front().features.size();
  std::vector<double> mean(dims, 0.0), scale(dims, 0.0);
  for (const auto& e : train) {
    for (std::size_t d = 0; d < dims; ++d) mean[d] += e.features[d] / static_cast<double>(train.size());
  }
  for (const auto& e : train) {
    for (std::size_t d = 0; d < dims; ++d) {
      scale[d] += std::pow(e.features[d] - mean[d], 2) / static_cast<double>(train.size());
    }
  }
  for (auto& s : scale) s = s > 0.0 ? std::sqrt(s) : 1.0;
  auto z = [&](const std::vector<double>& raw) {
    std::vector<double> out(dims);
    for (std::size_t d = 0; d < dims; ++d) out[d] = (raw[d] - mean[d]) / scale[d];
    return out;
  };
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  for (const auto& e : train) {
    rows.push_back(z(e.features));
    targets.push_back(e.d_star);
  }
  for (const auto& q : random_examples(1000, 5, 6, false)) {
    CHECK(model.predict(q.features) == doctest::Approx(testing::brute_force_knn(rows, targets, z(q.features), 8)));
  }
}

TEST_CASE("batched and parallel predictions equal scalar predictions") {
  const auto train = random_examples(300, 4, 7, false);
  const auto queries = random_examples(257, 4, 8, false);
  const auto batch = matrix_of(queries);
  for (auto kind : {ModelKind::Knn, ModelKind::Linear}) {
    const auto model = ResidualModel::fit(train, kind, 8, 1e-6);
    const auto serial = model.predict_batch_serial(batch);
    CHECK(model.predict_batch(batch, 4) == serial);
    CHECK(model.predict_batch(batch, 1) == serial);
    for (std::size_t i = 0; i < queries.size(); ++i) CHECK(model.predict(queries[i].features) == serial[i]);
    const auto single = matrix_of({queries[0]});
    CHECK(model.predict_batch(single)[0] == model.predict(queries[0].features));
    CHECK_THROWS_AS((void)model.predict(std::vector<double>{1.0, 2.0}), InputError);
  }
}

TEST_CASE("models survive a save and load") {
  testing::TempDir dir("model");
  const auto train = random_examples(100, 3, 9, false);
  for (auto kind : {ModelKind::Knn, ModelKind::Linear}) {
    auto model = ResidualModel::fit(train, kind, 5, 1e-6);
    TrainingManifest m;
    m.strategy = "uniform";
    m.seed = 12;
    model.set_manifest(m);
    const auto path = dir / (std::string(model_kind_name(kind)) + ".json");
    model.save(path);
    const auto back = ResidualModel::load(path);
    CHECK(back.same_parameters(model));
    CHECK(back.manifest().strategy == "uniform");
    CHECK(back.manifest().seed == 12);
    for (const auto& q : random_examples(30, 3, 10, false)) CHECK(back.predict(q.features) == model.predict(q.features));
    CHECK(parse_model_kind(model_kind_name(kind)) == kind);
  }
  write_text(dir / "junk.json", "{\"format\": \"something else\"}");
  CHECK_THROWS_AS((void)ResidualModel::load(dir / "junk.json"), InputError);
  CHECK_THROWS_AS((void)ResidualModel::load(dir / "missing.json"), InputError);
}

TEST_CASE("learned heuristic caches by state") {
  const auto train_mazes = mazes(12, 1000);
  const auto pool = solve_and_extract(train_mazes).examples;
  auto model = std::make_shared<const ResidualModel>(ResidualModel::fit(pool, ModelKind::Knn, 8, 0.0));
  const auto test = mazes(3, 2000);

  const LearnedHeuristic h(model, Domain::Maze);
  const State s = test[0].start;
  HeuristicQuery q{&s, 0};
  double first = 0.0, second = 0.0;
  h.evaluate_batch(test[0], {&q, 1}, {&first, 1});
  const auto calls = h.model_invocations();
  h.evaluate_batch(test[0], {&q, 1}, {&second, 1});
  CHECK(first == second);
  CHECK(h.model_invocations() == calls);
  CHECK(h.cache_hits() == 1);
  CHECK(first >= quick_heuristic(s, test[0]));

  for (const auto& inst : test) {
    LearnedHeuristicOptions no_cache;
    no_cache.cache_capacity = 0;
    LearnedHeuristicOptions tiny;
    tiny.cache_capacity = 3;
    const LearnedHeuristic cached(model, Domain::Maze), uncached(model, Domain::Maze, no_cache),
        small(model, Domain::Maze, tiny);
    const auto a = astar(inst, cached);
    const auto b = astar(inst, uncached);
    const auto c = astar(inst, small);
    CHECK(a.path == b.path);
    CHECK(a.closed_length == b.closed_length);
    CHECK(c.closed_length == b.closed_length);
    CHECK(a.heuristic_calls <= a.distinct_states);
    CHECK(cached.model_evaluations() <= a.distinct_states);
  }
  const auto stp = make_stp_instance(3, stp_goal_tiles(3));
  CHECK_THROWS_AS(astar(stp, h), InputError);
}

TEST_CASE("a zero residual leaves the goal at zero") {
  const auto inst = mazes(1, 3000)[0];
  const auto pool = solve_and_extract(std::vector<PuzzleInstance>{inst}).examples;
  auto flat = pool;
  for (auto& e : flat) e.d_star = 0.0;
  const LearnedHeuristic h(std::make_shared<const ResidualModel>(ResidualModel::fit(flat, ModelKind::Knn, 3, 0.0)),
                           Domain::Maze);
  const State goal = make_maze_state(inst, inst.cell(inst.goal));
  HeuristicQuery q{&goal, 0};
  double out = -1.0;
  h.evaluate_batch(inst, {&q, 1}, {&out, 1});
  CHECK(out == 0.0);
}

TEST_CASE("residual model beats the zero predictor on held-out mazes") {
  const auto pool = solve_and_extract(mazes(60, 4000)).examples;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainOptions opts;
    opts.seed = seed;
    const auto model = train_residual_model(pool, opts);
    const auto& m = model.manifest();
    CHECK(m.n_validation > 0);
    CHECK(m.n_train + m.n_validation == pool.size());
    CHECK(m.validation_mae < m.zero_predictor_validation_mae);
  }
  TrainOptions none;
  none.validation_fraction = 0.0;
  CHECK(std::isnan(train_residual_model(pool, none).manifest().validation_mae));
}
