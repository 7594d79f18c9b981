#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cstream/features.hpp"

namespace cstream {

struct TreeParams {
  std::size_t min_leaf = 5;
  double min_gain = 1e-4;

  bool operator==(const TreeParams&) const = default;
};

struct ForestParams {
  std::size_t n_trees = 101;
  std::size_t feature_subset_size = 0;  // 0: floor(sqrt(#features)) per split
  std::uint64_t seed = 1;
  bool bootstrap = true;
  TreeParams tree;

  bool operator==(const ForestParams&) const = default;
};

// Flat node storage, root at index 0. A numeric split routes missing values
// through the dedicated absent branch; a categorical split routes unseen
// values through the default branch.
struct TreeNode {
  enum class Kind : std::uint8_t { leaf, numeric_split, categorical_split };
  Kind kind = Kind::leaf;

  Label klass = Label::automatic;  // leaf
  double probability = 1.0;        // leaf: majority-class fraction

  std::uint32_t feature = 0;
  double threshold = 0.0;  // numeric: value <= threshold goes left
  std::int32_t le_child = -1;
  std::int32_t gt_child = -1;
  std::int32_t absent_child = -1;

  std::vector<std::pair<std::string, std::int32_t>> branches;  // categorical, sorted
  std::int32_t default_child = -1;

  bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
  TreeParams params;

  bool operator==(const TreeModel&) const = default;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  ForestParams params;

  bool operator==(const ForestModel&) const = default;
};

using Model = std::variant<TreeModel, ForestModel>;

struct Prediction {
  Label label = Label::automatic;
  double probability = 1.0;
};

// Shannon entropy of a two-class distribution, in bits.
double entropy_bits(std::size_t a, std::size_t b);

// H(labels) - sum_v (n_v/n) H(labels|v). Values are arbitrary category ids;
// missing must be pre-encoded as its own id.
double information_gain_categorical(std::span<const std::int32_t> values,
                                    std::span<const Label> labels);

// Max gain over midpoint thresholds between consecutive distinct present
// values; each candidate partitions into {<=t, >t} plus a missing cell
// (NaN). No threshold candidates -> 0.
double information_gain_numeric(std::span<const double> values, std::span<const Label> labels);

// IG of one feature over labeled examples (dispatches on feature kind).
double information_gain(std::span<const FeatureVector> examples, std::size_t feature);

// All 17 features, sorted by IG descending (ties by feature index).
std::vector<std::pair<std::size_t, double>> information_gain_ranking(
    std::span<const FeatureVector> examples);

// Gain-ratio (C4.5 style) recursive induction; stops on pure nodes, nodes
// smaller than min_leaf, or when no split reaches min_gain. All examples
// must carry labels.
TreeModel train_tree(std::span<const FeatureVector> examples, const TreeParams& params = {});

// Bootstrap-resampled trees with a random feature subset drawn per split.
// Deterministic given params.seed; `jobs` only parallelizes the work.
ForestModel train_forest(std::span<const FeatureVector> examples, const ForestParams& params = {},
                         unsigned jobs = 1);

Prediction predict(const TreeModel& model, const FeatureVector& v);
// Majority vote; ties go to automatic. Probability is the vote fraction of
// the returned class.
Prediction predict(const ForestModel& model, const FeatureVector& v);
Prediction predict(const Model& model, const FeatureVector& v);

struct EvalReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;  // user_action is the positive class
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
};

// Undefined ratios stay absent rather than collapsing to 0.
EvalReport compute_metrics(std::span<const Label> predictions, std::span<const Label> truths);

struct TrainConfig {
  bool use_forest = false;
  TreeParams tree;
  ForestParams forest;
};

Model train_model(std::span<const FeatureVector> examples, const TrainConfig& config,
                  unsigned jobs = 1);

// Stratified k-fold cross-validation; metrics are computed on the pooled
// out-of-fold predictions. Each class needs at least k examples.
EvalReport cross_validate(std::span<const FeatureVector> examples, const TrainConfig& config,
                          std::size_t k = 10, std::uint64_t seed = 1, unsigned jobs = 1);

struct LearningPoint {
  std::size_t n_groups = 0;
  EvalReport cv;       // k-fold CV on the first n groups
  EvalReport holdout;  // trained on those groups, tested on the rest
};

// Group order is fixed by shuffling once with `seed`; needs >= 2 groups.
std::vector<LearningPoint> learning_curve(const std::vector<std::vector<FeatureVector>>& groups,
                                          const TrainConfig& config, std::size_t k = 10,
                                          std::uint64_t seed = 1, unsigned jobs = 1);

inline constexpr int kModelSchemaVersion = 1;

class ModelSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Versioned JSON document: params echo, feature names, flat node arrays.
// Round trips byte-identically.
std::string model_to_json(const Model& model);
Model model_from_json(std::string_view text);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace cstream
