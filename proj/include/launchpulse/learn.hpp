#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "launchpulse/rng.hpp"

namespace launchpulse::learn {

// ---------------------------------------------------------------------------
// Splitting

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1; the first round((1 - ratio) n) shuffled indices form the test
/// set. Requires 0 < ratio < 1 and n >= 5.
SplitIndices train_test_split(std::size_t n, double ratio, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_rows(const std::vector<T>& rows, double ratio, std::uint64_t seed) {
  const auto idx = train_test_split(rows.size(), ratio, seed);
  std::vector<T> train, test;
  for (auto i : idx.train) train.push_back(rows[i]);
  for (auto i : idx.test) test.push_back(rows[i]);
  return {std::move(train), std::move(test)};
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> r2;  // absent when y_true has zero variance
};

/// Throws std::invalid_argument on length mismatch or fewer than two observations.
Metrics evaluate(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

// ---------------------------------------------------------------------------
// Elastic net

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;     // population standard deviation; 1 for frozen columns
  std::vector<bool> frozen;  // zero-variance columns, coefficient pinned at 0
};

Standardization standardize_columns(const Eigen::MatrixXd& X);

struct ElasticNetModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;      // original scale, one per column of X
  Eigen::VectorXd std_coefficients;  // standardized scale
  double lambda = 0.0;
  double l1_ratio = 1.0;
  std::vector<std::string> column_names;
  Standardization standardization;
  double y_mean = 0.0;
  int iterations = 0;
  bool reached_max_iter = false;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Cyclic coordinate descent with soft-thresholding on standardized X and centred y,
/// minimising (1/2n)|y - Xb|^2 + lambda (l1_ratio |b|_1 + (1 - l1_ratio)/2 |b|^2).
/// Stops when the largest coefficient change in a sweep is below `tol`, or after
/// `max_iter` sweeps (flagged). `warm_start` is a standardized-scale starting point.
ElasticNetModel elastic_net_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, double l1_ratio,
                                double tol = 1e-7, int max_iter = 10000, std::vector<std::string> column_names = {},
                                const Eigen::VectorXd* warm_start = nullptr);

/// Smallest lambda at which every slope is zero: max_j |(1/n) z_j'(y - ybar)| / l1_ratio on
/// standardized columns.
double enet_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1_ratio);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> enet_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1_ratio,
                                     int count = 50, double ratio = 1e-3);

/// Penalised objective on the model's standardized scale for arbitrary standardized
/// coefficients (evaluated against the same standardization as the model).
double enet_objective(const ElasticNetModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& std_coefficients);

struct CvCell {
  double l1_ratio = 0.0;
  double lambda = 0.0;
  double mean_mse = 0.0;
  std::vector<double> fold_mse;
};

struct CvOptions {
  int folds = 5;
  std::vector<double> l1_grid = {0.1, 0.5, 0.9};
  /// Explicit lambda grid shared by every l1_ratio; empty = per-l1 default grid.
  std::vector<double> lambda_grid;
  int n_lambdas = 50;
  double lambda_min_ratio = 1e-3;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  int max_iter = 10000;
};

struct CvResult {
  double best_lambda = 0.0;
  double best_l1_ratio = 0.0;
  std::vector<CvCell> table;
};

/// K-fold CV over (l1_ratio, lambda); fold assignment by seeded shuffle. Picks the pair
/// with the lowest mean validation MSE; ties go to the larger lambda, then the larger l1_ratio.
CvResult cross_validate_enet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& options);

// ---------------------------------------------------------------------------
// Gradient boosting

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t count = 0;  // training rows reaching this node
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  bool uses_feature(int feature) const;
};

struct GbtOptions {
  int n_trees = 300;
  double learning_rate = 0.05;
  int max_depth = 3;
  int min_leaf = 2;
  std::uint64_t seed = 0;
};

struct GBTModel {
  std::vector<RegressionTree> trees;
  double initial_prediction = 0.0;
  GbtOptions options;

  /// Prediction using the first `n_trees` trees (all when negative).
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, int n_trees = -1) const;
};

/// Least-squares boosting: every tree is grown greedily on the current residuals, choosing
/// the split with the largest SSE reduction over (feature, midpoint) candidates; ties go to
/// the lower feature index, then the lower threshold. Leaves hold the mean residual.
GBTModel gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtOptions& options);

// ---------------------------------------------------------------------------
// Importance

using Predictor = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

/// Mean drop in test R^2 (or in negative MSE when y has no variance) when a column is
/// shuffled, over `repeats` seeded permutations. Sorted by descending score, ties by column
/// order.
std::vector<std::pair<std::string, double>> permutation_importance(const Predictor& model, const Eigen::MatrixXd& X,
                                                                   const Eigen::VectorXd& y,
                                                                   const std::vector<std::string>& columns,
                                                                   int repeats, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reporting

/// Held-out evaluation of one fitted model configuration.
struct ModelReport {
  std::string model_id;     // "elastic_net" / "gradient_boosting"
  std::string horizon;      // "24h" / "48h" / "7d"
  std::string feature_set;  // "pre_launch_only" / "with_leaky"
  bool leaky = false;
  Metrics metrics;
  std::size_t train_n = 0;
  std::size_t test_n = 0;
  std::vector<std::pair<std::string, double>> importance;  // descending
  std::vector<std::pair<std::string, std::string>> hyperparameters;
  std::vector<std::pair<std::string, double>> coefficients;  // elastic net, original scale
};

}  // namespace launchpulse::learn
