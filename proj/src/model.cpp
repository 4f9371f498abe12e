#include "heurlab/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "json.hpp"

#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatTag = "heurlab-residual-model";

FeatureMatrix features_of(std::span<const TrainingExample> examples) {
  FeatureMatrix m;
  m.rows = examples.size();
  m.cols = examples.empty() ? 0 : examples.front().features.size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& e : examples) {
    if (e.features.size() != m.cols) throw InputError("training examples differ in feature length");
    for (double v : e.features) {
      if (!std::isfinite(v)) throw InputError("training features must be finite");
      m.data.push_back(v);
    }
  }
  return m;
}

nlohmann::json manifest_json(const TrainingManifest& m) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"strategy", m.strategy},
          {"seed", m.seed},
          {"budget", m.budget},
          {"n_train", m.n_train},
          {"n_validation", m.n_validation},
          {"train_mae", num(m.train_mae)},
          {"validation_mae", num(m.validation_mae)},
          {"zero_predictor_validation_mae", num(m.zero_predictor_validation_mae)}};
}

TrainingManifest manifest_from(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  TrainingManifest m;
  m.strategy = j.at("strategy").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.budget = j.at("budget").get<std::size_t>();
  m.n_train = j.at("n_train").get<std::size_t>();
  m.n_validation = j.at("n_validation").get<std::size_t>();
  m.train_mae = num(j.at("train_mae"));
  m.validation_mae = num(j.at("validation_mae"));
  m.zero_predictor_validation_mae = num(j.at("zero_predictor_validation_mae"));
  return m;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) noexcept { return kind == ModelKind::Knn ? "knn" : "linear"; }

ModelKind parse_model_kind(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "knn") return ModelKind::Knn;
  if (n == "linear") return ModelKind::Linear;
  throw InputError("unknown model kind '" + std::string(name) + "' (expected knn or linear)");
}

ResidualModel ResidualModel::fit(std::span<const TrainingExample> examples, ModelKind kind, int k, double ridge) {
  if (k < 1) throw InputError("k must be positive");
  if (!(ridge >= 0.0)) throw InputError("ridge must be nonnegative");
  const FeatureMatrix x = features_of(examples);
  const std::size_t n = x.rows, d = x.cols;
  const std::size_t needed = kind == ModelKind::Knn ? static_cast<std::size_t>(k) : d + 1;
  if (n < needed || n == 0) {
    throw InputError("training needs at least " + std::to_string(std::max<std::size_t>(needed, 1)) +
                     " examples, got " + std::to_string(n));
  }

  ResidualModel model;
  model.kind_ = kind;
  model.k_ = k;
  model.mean_.assign(d, 0.0);
  model.scale_.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) model.mean_[c] += x.data[r * d + c];
  }
  for (double& m : model.mean_) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = x.data[r * d + c] - model.mean_[c];
      model.scale_[c] += dv * dv;
    }
  }
  for (double& s : model.scale_) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;
  }

  std::vector<double> z(n * d);
  for (std::size_t r = 0; r < n; ++r) model.standardize(x.row(r), {z.data() + r * d, d});

  if (kind == ModelKind::Knn) {
    model.points_ = std::move(z);
    for (const auto& e : examples) model.targets_.push_back(e.d_star);
    return model;
  }

  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const Matrix> zx(z.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) y[static_cast<Eigen::Index>(r)] = examples[r].d_star;
  // Standardized columns have zero mean, so the intercept is the target mean.
  const double y_mean = y.mean();
  Eigen::MatrixXd gram = zx.transpose() * zx;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = zx.transpose() * (y.array() - y_mean).matrix();
  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("normal equations could not be factorized");
  const Eigen::VectorXd w = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !w.allFinite()) throw NumericalError("normal equations are singular");
  model.weights_.assign(w.data(), w.data() + w.size());
  model.bias_ = y_mean;
  return model;
}

void ResidualModel::check_dims(std::size_t cols) const {
  if (cols != dims()) {
    throw InputError("feature length " + std::to_string(cols) + " does not match the model's " +
                     std::to_string(dims()));
  }
}

void ResidualModel::standardize(std::span<const double> raw, std::span<double> out) const {
  for (std::size_t c = 0; c < raw.size(); ++c) out[c] = (raw[c] - mean_[c]) / scale_[c];
}

double ResidualModel::predict_standardized(std::span<const double> z) const {
  const std::size_t d = dims();
  if (kind_ == ModelKind::Linear) {
    double v = bias_;
    for (std::size_t c = 0; c < d; ++c) v += weights_[c] * z[c];
    return v;
  }
  // (distance, insertion index): lexicographic order breaks ties by insertion.
  const std::size_t n = targets_.size();
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* p = points_.data() + r * d;
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += (p[c] - z[c]) * (p[c] - z[c]);
    dist[r] = {s, r};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += targets_[dist[i].second];
  return sum / static_cast<double>(k);
}

double ResidualModel::predict(std::span<const double> features) const {
  check_dims(features.size());
  std::vector<double> z(features.size());
  standardize(features, z);
  return predict_standardized(z);
}

std::vector<double> ResidualModel::predict_batch(const FeatureMatrix& batch, int jobs) const {
  check_dims(batch.cols);
  std::vector<double> out(batch.rows);
  parallel_for(batch.rows, jobs, [&](std::size_t r) {
    std::vector<double> z(batch.cols);
    standardize(batch.row(r), z);
    out[r] = predict_standardized(z);
  });
  return out;
}

std::vector<double> ResidualModel::predict_batch_serial(const FeatureMatrix& batch) const {
  check_dims(batch.cols);
  std::vector<double> out;
  out.reserve(batch.rows);
  std::vector<double> z(batch.cols);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    standardize(batch.row(r), z);
    out.push_back(predict_standardized(z));
  }
  return out;
}

bool ResidualModel::same_parameters(const ResidualModel& other) const {
  return kind_ == other.kind_ && k_ == other.k_ && mean_ == other.mean_ && scale_ == other.scale_ &&
         points_ == other.points_ && targets_ == other.targets_ && weights_ == other.weights_ &&
         bias_ == other.bias_;
}

void ResidualModel::save(const std::filesystem::path& path) const {
  const nlohmann::json j{{"format", kFormatTag},
                         {"version", kFormatVersion},
                         {"kind", model_kind_name(kind_)},
                         {"k", k_},
                         {"mean", mean_},
                         {"scale", scale_},
                         {"points", points_},
                         {"targets", targets_},
                         {"weights", weights_},
                         {"bias", bias_},
                         {"manifest", manifest_json(manifest_)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

ResidualModel ResidualModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (j.value("format", "") != kFormatTag) throw InputError(path.string() + " is not a residual model file");
  if (j.value("version", 0) != kFormatVersion) {
    throw InputError(path.string() + ": unsupported model version " + std::to_string(j.value("version", 0)));
  }
  try {
    ResidualModel m;
    m.kind_ = parse_model_kind(j.at("kind").get<std::string>());
    m.k_ = j.at("k").get<int>();
    m.mean_ = j.at("mean").get<std::vector<double>>();
    m.scale_ = j.at("scale").get<std::vector<double>>();
    m.points_ = j.at("points").get<std::vector<double>>();
    m.targets_ = j.at("targets").get<std::vector<double>>();
    m.weights_ = j.at("weights").get<std::vector<double>>();
    m.bias_ = j.at("bias").get<double>();
    m.manifest_ = manifest_from(j.at("manifest"));
    const bool consistent = m.scale_.size() == m.mean_.size() &&
                            (m.kind_ == ModelKind::Knn ? m.points_.size() == m.targets_.size() * m.dims() &&
                                                             !m.targets_.empty()
                                                       : m.weights_.size() == m.dims());
    if (!consistent) throw InputError(path.string() + ": parameter sizes are inconsistent");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

double mean_absolute_error(const ResidualModel& model, std::span<const TrainingExample> examples) {
  if (examples.empty()) return std::nan("");
  const FeatureMatrix x = features_of(examples);
  const auto predictions = model.predict_batch(x);
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) total += std::abs(predictions[i] - examples[i].d_star);
  return total / static_cast<double>(examples.size());
}

ResidualModel train_residual_model(std::span<const TrainingExample> examples, const TrainOptions& options) {
  if (!(options.validation_fraction >= 0.0 && options.validation_fraction < 1.0)) {
    throw InputError("validation fraction must lie in [0, 1)");
  }
  std::vector<std::string> ids;
  for (const auto& e : examples) ids.push_back(e.instance_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Rng rng(derive_seed(options.seed, "validation"));
  std::shuffle(ids.begin(), ids.end(), rng);
  auto held = static_cast<std::size_t>(std::floor(options.validation_fraction * static_cast<double>(ids.size())));
  if (ids.size() < 2) held = 0;
  const std::set<std::string> validation_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(held));

  std::vector<TrainingExample> train, validation;
  for (const auto& e : examples) (validation_ids.count(e.instance_id) ? validation : train).push_back(e);

  ResidualModel model = ResidualModel::fit(train, options.kind, options.k, options.ridge);
  TrainingManifest m;
  m.strategy = options.strategy;
  m.seed = options.seed;
  m.budget = options.budget;
  m.n_train = train.size();
  m.n_validation = validation.size();
  m.train_mae = mean_absolute_error(model, train);
  m.validation_mae = mean_absolute_error(model, validation);
  double zero = 0.0;
  for (const auto& e : validation) zero += std::abs(e.d_star);
  m.zero_predictor_validation_mae = validation.empty() ? std::nan("") : zero / static_cast<double>(validation.size());
  model.set_manifest(std::move(m));
  return model;
}

LearnedHeuristic::LearnedHeuristic(std::shared_ptr<const ResidualModel> model, Domain domain,
                                   LearnedHeuristicOptions options)
    : model_(std::move(model)), domain_(domain), options_(options) {
  if (!model_) throw InputError("learned heuristic needs a model");
}

std::optional<double> LearnedHeuristic::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void LearnedHeuristic::insert(const std::string& key, double value) const {
  std::lock_guard lock(mutex_);
  if (index_.count(key)) return;  // a racing writer stored the same value
  lru_.emplace_front(key, value);
  index_.emplace(key, lru_.begin());
  while (lru_.size() > options_.cache_capacity) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

void LearnedHeuristic::evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                                      std::span<double> out) const {
  if (instance.domain != domain_) {
    throw InputError("model trained for " + std::string(domain_name(domain_)) + " applied to " +
                     std::string(domain_name(instance.domain)));
  }
  const bool caching = options_.cache_capacity > 0;
  std::vector<std::size_t> misses;
  std::vector<std::string> keys(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (caching) {
      keys[i] = instance.id;
      keys[i].push_back('\0');
      keys[i] += state_key(*queries[i].state);
      if (const auto v = lookup(keys[i])) {
        out[i] = *v;
        ++hits_;
        continue;
      }
    }
    misses.push_back(i);
  }
  if (misses.empty()) return;

  FeatureMatrix batch;
  batch.rows = misses.size();
  batch.cols = model_->dims();
  batch.data.reserve(batch.rows * batch.cols);
  for (std::size_t i : misses) {
    const auto f = feature_vector(*queries[i].state, instance);
    if (f.size() != batch.cols) {
      throw InputError("feature length " + std::to_string(f.size()) + " does not match the model's " +
                       std::to_string(batch.cols));
    }
    batch.data.insert(batch.data.end(), f.begin(), f.end());
  }
  // Searches already run in parallel; keep each batch on its own thread.
  const auto residuals = model_->predict_batch(batch, 1);
  ++invocations_;
  evaluations_ += static_cast<std::int64_t>(misses.size());
  for (std::size_t b = 0; b < misses.size(); ++b) {
    const std::size_t i = misses[b];
    double r = residuals[b];
    if (options_.round_residual) r = std::round(r);
    if (options_.floor_residual) r = std::max(r, 0.0);
    const double h = std::max(quick_heuristic(*queries[i].state, instance) + r, 0.0);
    out[i] = h;
    if (caching) insert(keys[i], h);
  }
}

}  // namespace heurlab
