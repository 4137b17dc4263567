#pragma once

#include "barrier/features.hpp"
#include "barrier/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace barrier {

enum class ModelFamily {
  Uniform,
  Stratified,
  MostFrequent,
  SVM,
  KNN,
  DecisionTree,
  RandomForest,
  NaiveBayes
};

/// Report order.
inline constexpr std::array<ModelFamily, 8> kAllFamilies = {
    ModelFamily::Uniform,      ModelFamily::Stratified, ModelFamily::MostFrequent,
    ModelFamily::SVM,          ModelFamily::KNN,        ModelFamily::DecisionTree,
    ModelFamily::RandomForest, ModelFamily::NaiveBayes};

/// CLI / file tag: uniform, stratified, most-frequent, svm, knn,
/// decision-tree, random-forest, naive-bayes.
std::string_view family_tag(ModelFamily family);
/// Report name: Uniform, Stratified, Most Frequent, SVM, kNN, ...
std::string_view family_display_name(ModelFamily family);
std::optional<ModelFamily> parse_family(std::string_view text);
bool is_baseline(ModelFamily family);

using Hyperparameters = std::map<std::string, double, std::less<>>;

/// Defaults per family:
///   svm:           lambda = 1e-3, epochs = 50
///   knn:           k = 5
///   decision-tree: max_leaf_nodes = 0 (unlimited)
///   random-forest: n_estimators = 100, max_features = 0 (ceil(sqrt(d))),
///                  max_leaf_nodes = 0, bootstrap = 1
///   naive-bayes:   var_smoothing = 1e-9
/// Baselines take none.
Hyperparameters default_hyperparameters(ModelFamily family);

struct ModelSpec {
  ModelFamily family = ModelFamily::MostFrequent;
  Hyperparameters hyperparameters;
  std::uint64_t seed = 0;

  /// Hyperparameter with the family default as fallback.
  double param(std::string_view name) const;
};

ModelSpec make_spec(ModelFamily family, std::uint64_t seed, const Hyperparameters& overrides = {});

/// Ordered list of hyperparameter points; the first point wins ties.
using HyperparameterGrid = std::vector<Hyperparameters>;

/// Sweep grids: svm lambda {1e-4,1e-3,1e-2}; knn k {1,3,5,7,9,11,15};
/// decision-tree max_leaf_nodes {2,4,8,16,32,64,128,256}; random-forest
/// n_estimators {10,50,100,200}. Empty for baselines and naive-bayes.
HyperparameterGrid default_grid(ModelFamily family);

/// Parses "k:1,3,5" or "a:1,2;b:3,4" (cartesian product, last name varies
/// fastest). Throws Error(InvalidArgument).
HyperparameterGrid parse_grid(std::string_view text);
std::string format_grid(const HyperparameterGrid& grid);

/// Per-feature (x - mean) / scale. Zero-variance features carry mean 0 and
/// scale 1, so they pass through untouched.
struct Standardization {
  vector_t mean;
  vector_t scale;

  bool empty() const { return mean.size() == 0; }
  static Standardization fit(const matrix_t& X);
  template <typename Derived>
  vector_t apply(const Eigen::MatrixBase<Derived>& x) const {
    return ((x.derived().array() - mean.array()) / scale.array()).matrix();
  }
  matrix_t apply_rows(const matrix_t& X) const;
};

struct ConstantParams {
  bool label = false;
};

/// Independent Bernoulli draws per prediction, keyed by (seed, draw index).
struct RandomParams {
  double p_true = 0.5;
  std::uint64_t seed = 0;
};

struct LinearParams {
  vector_t weights;
  scalar_t bias = 0;
};

struct KnnParams {
  matrix_t points;  ///< standardized training rows
  labels_t labels;
  int k = 1;
};

/// Flat binary tree; node 0 is the root. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  scalar_t threshold = 0;  ///< go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  bool label = false;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
};

struct TreeParams {
  std::vector<TreeNode> nodes;

  std::size_t leaf_count() const;
  bool predict(const vector_t& x) const;
};

struct ForestParams {
  std::vector<TreeParams> trees;
};

struct NaiveBayesParams {
  /// Row 0 = FALSE class, row 1 = TRUE class.
  Eigen::Matrix<scalar_t, 2, Eigen::Dynamic> means;
  Eigen::Matrix<scalar_t, 2, Eigen::Dynamic> variances;
  Eigen::Matrix<scalar_t, 2, 1> log_prior;
};

using ModelParams = std::variant<ConstantParams, RandomParams, LinearParams, KnnParams,
                                 TreeParams, ForestParams, NaiveBayesParams>;

struct TrainedModel {
  ModelSpec spec;
  std::size_t n_features = 0;
  /// Empty unless the family standardizes (svm, knn).
  Standardization standardization;
  ModelParams params;
};

/// Errors: EmptyInput, LengthMismatch, DegenerateTrainingSet (single-class
/// data for naive-bayes or the stratified baseline), InvalidArgument.
TrainedModel train(const ModelSpec& spec, const matrix_t& X, const labels_t& y);
TrainedModel train(const ModelSpec& spec, const std::vector<LabeledInstance>& data);

/// Throws Error(LengthMismatch). For the random baselines `draw` selects the
/// draw; all other families ignore it.
bool predict(const TrainedModel& model, const vector_t& x, std::uint64_t draw = 0);
/// Row i uses draw index i.
labels_t predict(const TrainedModel& model, const matrix_t& X);

/// Fitting routines behind train(); exposed for direct testing.
LinearParams svm_fit(const matrix_t& Xs, const labels_t& y, double lambda, int epochs,
                     std::uint64_t seed);
TreeParams cart_fit(const matrix_t& X, const labels_t& y, std::span<const std::size_t> rows,
                    std::size_t max_leaf_nodes, std::size_t max_features, std::uint64_t seed);
NaiveBayesParams gaussian_nb_fit(const matrix_t& X, const labels_t& y, double var_smoothing);
bool knn_predict(const KnnParams& params, const vector_t& xs);

/// Grid point with the best micro-F1 on the evaluation data; the first
/// point wins ties. A grid with one point returns it without training.
/// Throws Error(InvalidArgument) on an empty grid.
ModelSpec sweep(ModelFamily family, const HyperparameterGrid& grid, std::uint64_t seed,
                const matrix_t& X_train, const labels_t& y_train, const matrix_t& X_eval,
                const labels_t& y_eval);
/// Same, overlaying each grid point on `base` (other hyperparameters and the
/// seed are kept).
ModelSpec sweep(const ModelSpec& base, const HyperparameterGrid& grid, const matrix_t& X_train,
                const labels_t& y_train, const matrix_t& X_eval, const labels_t& y_eval);

/// Versioned JSON document: format, version, family, hyperparameters, seed,
/// n_features, standardization, params.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace barrier
