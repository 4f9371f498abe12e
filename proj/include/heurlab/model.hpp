#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "heurlab/dataset.hpp"
#include "heurlab/search.hpp"

namespace heurlab {

enum class ModelKind : std::uint8_t { Knn, Linear };

[[nodiscard]] std::string_view model_kind_name(ModelKind kind) noexcept;
[[nodiscard]] ModelKind parse_model_kind(std::string_view name);

/// Where a model came from and how well it fits.
struct TrainingManifest {
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  double train_mae = 0.0;
  double validation_mae = 0.0;  ///< NaN without a validation split
  double zero_predictor_validation_mae = 0.0;
};

struct TrainOptions {
  ModelKind kind = ModelKind::Knn;
  int k = 8;
  double ridge = 1e-6;
  double validation_fraction = 0.1;  ///< share of instance ids held out
  std::uint64_t seed = 0;
  std::string strategy;
  std::size_t budget = 0;
};

/// Row-major batch of feature vectors.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Regressor for the residual d* over standardized features.
class ResidualModel {
 public:
  /// Knn: stores every example. Linear: ridge least squares with intercept.
  static ResidualModel fit(std::span<const TrainingExample> examples, ModelKind kind, int k, double ridge);

  [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] std::size_t dims() const noexcept { return mean_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return targets_.size(); }
  [[nodiscard]] const TrainingManifest& manifest() const noexcept { return manifest_; }
  void set_manifest(TrainingManifest manifest) { manifest_ = std::move(manifest); }

  /// Throws InputError when the dimensionality differs from training.
  [[nodiscard]] double predict(std::span<const double> features) const;
  /// One prediction per row, OpenMP across rows.
  [[nodiscard]] std::vector<double> predict_batch(const FeatureMatrix& batch, int jobs = 0) const;
  /// Reference path for predict_batch.
  [[nodiscard]] std::vector<double> predict_batch_serial(const FeatureMatrix& batch) const;

  void save(const std::filesystem::path& path) const;
  static ResidualModel load(const std::filesystem::path& path);

  /// Equal kind, hyperparameters and fitted parameters; the manifest is ignored.
  [[nodiscard]] bool same_parameters(const ResidualModel& other) const;

 private:
  void check_dims(std::size_t cols) const;
  void standardize(std::span<const double> raw, std::span<double> out) const;
  [[nodiscard]] double predict_standardized(std::span<const double> z) const;

  ModelKind kind_ = ModelKind::Knn;
  int k_ = 8;
  std::vector<double> mean_;
  std::vector<double> scale_;    ///< 1 for constant dimensions
  std::vector<double> points_;   ///< Knn: standardized training rows
  std::vector<double> targets_;  ///< Knn: d* per row; Linear: empty
  std::vector<double> weights_;  ///< Linear
  double bias_ = 0.0;
  TrainingManifest manifest_;
};

/// Splits by instance id, fits on the training ids and records the MAEs.
[[nodiscard]] ResidualModel train_residual_model(std::span<const TrainingExample> examples,
                                                 const TrainOptions& options);

[[nodiscard]] double mean_absolute_error(const ResidualModel& model, std::span<const TrainingExample> examples);

struct LearnedHeuristicOptions {
  std::size_t cache_capacity = 1 << 16;  ///< 0 disables the cache
  bool floor_residual = true;
  bool round_residual = false;
};

/// h = quick + max(0, predicted residual), one model call per batch of
/// cache misses, LRU cache keyed by state.
class LearnedHeuristic final : public HeuristicEvaluator {
 public:
  LearnedHeuristic(std::shared_ptr<const ResidualModel> model, Domain domain, LearnedHeuristicOptions options = {});

  void evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                      std::span<double> out) const override;
  [[nodiscard]] bool shareable() const noexcept override { return true; }

  [[nodiscard]] std::int64_t model_invocations() const noexcept { return invocations_.load(); }
  [[nodiscard]] std::int64_t model_evaluations() const noexcept { return evaluations_.load(); }
  [[nodiscard]] std::int64_t cache_hits() const noexcept { return hits_.load(); }

 private:
  [[nodiscard]] std::optional<double> lookup(const std::string& key) const;
  void insert(const std::string& key, double value) const;

  std::shared_ptr<const ResidualModel> model_;
  Domain domain_;
  LearnedHeuristicOptions options_;
  mutable std::mutex mutex_;
  mutable std::list<std::pair<std::string, double>> lru_;  // most recent first
  mutable std::unordered_map<std::string, std::list<std::pair<std::string, double>>::iterator> index_;
  mutable std::atomic<std::int64_t> invocations_{0};
  mutable std::atomic<std::int64_t> evaluations_{0};
  mutable std::atomic<std::int64_t> hits_{0};
};

}  // namespace heurlab
