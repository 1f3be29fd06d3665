#include "launchpulse/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace launchpulse::learn {

SplitIndices train_test_split(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
  if (n < 5) throw std::invalid_argument(fmt::format("train/test split needs at least 5 rows, got {}", n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto test_n = static_cast<std::size_t>(std::llround((1.0 - ratio) * static_cast<double>(n)));
  SplitIndices out;
  out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_n));
  out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_n), order.end());
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Metrics evaluate(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument(fmt::format("evaluate: {} targets but {} predictions", y_true.size(), y_pred.size()));
  }
  const auto n = y_true.size();
  if (n < 2) throw std::invalid_argument("evaluate needs at least two observations");
  double abs_sum = 0.0, sq_sum = 0.0, mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = y_true(i) - y_pred(i);
    abs_sum += std::fabs(e);
    sq_sum += e * e;
    mean += y_true(i);
  }
  mean /= static_cast<double>(n);
  double sst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sst += (y_true(i) - mean) * (y_true(i) - mean);
  Metrics m;
  m.mae = abs_sum / static_cast<double>(n);
  m.rmse = std::sqrt(sq_sum / static_cast<double>(n));
  if (sst > 0.0) m.r2 = 1.0 - sq_sum / sst;
  return m;
}

// ---------------------------------------------------------------------------

Standardization standardize_columns(const Eigen::MatrixXd& X) {
  const auto n = static_cast<double>(X.rows());
  Standardization s;
  s.mean.resize(X.cols());
  s.scale.resize(X.cols());
  s.frozen.assign(static_cast<std::size_t>(X.cols()), false);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) m += X(i, j);
    m /= n;
    double v = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) v += (X(i, j) - m) * (X(i, j) - m);
    const double sd = std::sqrt(v / n);
    s.mean(j) = m;
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(m)))) {
      s.scale(j) = 1.0;
      s.frozen[static_cast<std::size_t>(j)] = true;
    } else {
      s.scale(j) = sd;
    }
  }
  return s;
}

namespace {

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& s) {
  Eigen::MatrixXd Z(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.frozen[static_cast<std::size_t>(j)]) {
      Z.col(j).setZero();
    } else {
      Z.col(j) = (X.col(j).array() - s.mean(j)) / s.scale(j);
    }
  }
  return Z;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("elastic net: non-finite input");
  if (X.rows() != y.size()) throw std::invalid_argument("elastic net: X and y row counts differ");
  if (X.rows() < 1) throw std::invalid_argument("elastic net: no rows");
}

}  // namespace

Eigen::VectorXd ElasticNetModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double v = intercept;
    for (Eigen::Index j = 0; j < X.cols(); ++j) v += X(i, j) * coefficients(j);
    out(i) = v;
  }
  return out;
}

ElasticNetModel elastic_net_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, double l1_ratio,
                                double tol, int max_iter, std::vector<std::string> column_names,
                                const Eigen::VectorXd* warm_start) {
  check_finite(X, y);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("elastic net: lambda must be >= 0");
  if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) throw std::invalid_argument("elastic net: l1_ratio must lie in [0, 1]");

  const auto n = static_cast<double>(X.rows());
  const auto k = X.cols();
  ElasticNetModel model;
  model.lambda = lambda;
  model.l1_ratio = l1_ratio;
  model.column_names = std::move(column_names);
  model.standardization = standardize_columns(X);
  model.y_mean = y.mean();

  const Eigen::MatrixXd Z = apply_standardization(X, model.standardization);
  const Eigen::VectorXd yc = y.array() - model.y_mean;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  if (warm_start != nullptr && warm_start->size() == k) beta = *warm_start;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (model.standardization.frozen[static_cast<std::size_t>(j)]) beta(j) = 0.0;
  }
  Eigen::VectorXd col_norm(k);
  for (Eigen::Index j = 0; j < k; ++j) col_norm(j) = Z.col(j).squaredNorm() / n;

  Eigen::VectorXd residual = yc - Z * beta;
  const double l1_penalty = lambda * l1_ratio;
  const double l2_penalty = lambda * (1.0 - l1_ratio);
  model.reached_max_iter = true;
  for (int iter = 1; iter <= max_iter; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (model.standardization.frozen[static_cast<std::size_t>(j)]) continue;
      const double old = beta(j);
      const double rho = Z.col(j).dot(residual) / n + col_norm(j) * old;
      const double updated = soft_threshold(rho, l1_penalty) / (col_norm(j) + l2_penalty);
      if (updated != old) {
        residual -= (updated - old) * Z.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::fabs(updated - old));
      }
    }
    model.iterations = iter;
    if (max_change < tol) {
      model.reached_max_iter = false;
      break;
    }
  }

  model.std_coefficients = beta;
  model.coefficients.resize(k);
  double shift = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    model.coefficients(j) = beta(j) / model.standardization.scale(j);
    shift += model.coefficients(j) * model.standardization.mean(j);
  }
  model.intercept = model.y_mean - shift;
  return model;
}

double enet_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1_ratio) {
  check_finite(X, y);
  const auto s = standardize_columns(X);
  const Eigen::MatrixXd Z = apply_standardization(X, s);
  const Eigen::VectorXd yc = y.array() - y.mean();
  double best = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    best = std::max(best, std::fabs(Z.col(j).dot(yc)) / static_cast<double>(X.rows()));
  }
  return best / std::max(l1_ratio, 1e-3);
}

std::vector<double> enet_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1_ratio, int count,
                                     double ratio) {
  const double top = enet_lambda_max(X, y, l1_ratio);
  if (!(top > 0.0) || count < 1) return {0.0};
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.push_back(top * std::pow(ratio, frac));
  }
  return grid;
}

double enet_objective(const ElasticNetModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& std_coefficients) {
  const Eigen::MatrixXd Z = apply_standardization(X, model.standardization);
  const Eigen::VectorXd r = (y.array() - model.y_mean).matrix() - Z * std_coefficients;
  const double n = static_cast<double>(X.rows());
  return r.squaredNorm() / (2.0 * n) +
         model.lambda * (model.l1_ratio * std_coefficients.lpNorm<1>() +
                         (1.0 - model.l1_ratio) / 2.0 * std_coefficients.squaredNorm());
}

CvResult cross_validate_enet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& options) {
  check_finite(X, y);
  const auto n = static_cast<std::size_t>(X.rows());
  if (options.folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (n < static_cast<std::size_t>(options.folds)) {
    throw std::invalid_argument(fmt::format("cross-validation: {} rows for {} folds", n, options.folds));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> fold_of(n);
  for (std::size_t p = 0; p < n; ++p) fold_of[order[p]] = static_cast<int>(p % static_cast<std::size_t>(options.folds));

  struct Fold {
    Eigen::MatrixXd X_train, X_val;
    Eigen::VectorXd y_train, y_val;
  };
  std::vector<Fold> folds;
  for (int f = 0; f < options.folds; ++f) {
    std::vector<std::size_t> tr, va;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? va : tr).push_back(i);
    folds.push_back({take_rows(X, tr), take_rows(X, va), take_rows(y, tr), take_rows(y, va)});
  }

  CvResult result;
  for (double l1 : options.l1_grid) {
    auto grid = options.lambda_grid.empty()
                    ? enet_lambda_grid(X, y, l1, options.n_lambdas, options.lambda_min_ratio)
                    : options.lambda_grid;
    // Warm starts along a decreasing path.
    std::sort(grid.begin(), grid.end(), std::greater<>());
    std::vector<CvCell> cells(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) cells[g] = {l1, grid[g], 0.0, {}};
    for (const auto& fold : folds) {
      Eigen::VectorXd warm = Eigen::VectorXd::Zero(X.cols());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        auto model = elastic_net_fit(fold.X_train, fold.y_train, grid[g], l1, options.tol, options.max_iter, {}, &warm);
        warm = model.std_coefficients;
        const Eigen::VectorXd pred = model.predict(fold.X_val);
        double mse = 0.0;
        for (Eigen::Index i = 0; i < pred.size(); ++i) mse += (fold.y_val(i) - pred(i)) * (fold.y_val(i) - pred(i));
        cells[g].fold_mse.push_back(mse / static_cast<double>(pred.size()));
      }
    }
    for (auto& c : cells) {
      double s = 0.0;
      for (double m : c.fold_mse) s += m;
      c.mean_mse = s / static_cast<double>(c.fold_mse.size());
      result.table.push_back(std::move(c));
    }
  }
  if (result.table.empty()) throw std::invalid_argument("cross-validation grid is empty");

  const CvCell* best = &result.table.front();
  for (const auto& c : result.table) {
    const bool better = c.mean_mse < best->mean_mse ||
                        (c.mean_mse == best->mean_mse &&
                         (c.lambda > best->lambda || (c.lambda == best->lambda && c.l1_ratio > best->l1_ratio)));
    if (better) best = &c;
  }
  result.best_lambda = best->lambda;
  result.best_l1_ratio = best->l1_ratio;
  return result;
}

// ---------------------------------------------------------------------------

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

bool RegressionTree::uses_feature(int feature) const {
  return std::any_of(nodes.begin(), nodes.end(), [feature](const TreeNode& n) { return n.feature == feature; });
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& residual;
  const GbtOptions& options;
  RegressionTree tree;

  int grow(std::vector<Eigen::Index> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0, sq = 0.0;
    for (auto i : rows) {
      sum += residual(i);
      sq += residual(i) * residual(i);
    }
    const auto n = rows.size();
    tree.nodes[static_cast<std::size_t>(id)].count = n;
    tree.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(n);

    const auto min_leaf = static_cast<std::size_t>(std::max(1, options.min_leaf));
    if (depth >= options.max_depth || n < 2 * min_leaf) return id;
    const double node_ss = sq - sum * sum / static_cast<double>(n);
    if (!(node_ss > 0.0)) return id;

    double best_gain = 1e-12 * std::max(node_ss, 1e-300);
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, Eigen::Index>> sorted(n);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      for (std::size_t p = 0; p < n; ++p) sorted[p] = {X(rows[p], j), rows[p]};
      std::sort(sorted.begin(), sorted.end());
      double left_sum = 0.0;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        left_sum += residual(sorted[p].second);
        const std::size_t nl = p + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double xl = sorted[p].first;
        const double xr = sorted[p + 1].first;
        if (!(xl < xr)) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - sum * sum / static_cast<double>(n);
        if (gain > best_gain) {
          double threshold = xl + (xr - xl) / 2.0;
          if (!(threshold < xr)) threshold = xl;
          best_gain = gain;
          best_feature = static_cast<int>(j);
          best_threshold = threshold;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (auto i : rows) (X(i, best_feature) <= best_threshold ? left : right).push_back(i);
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

Eigen::VectorXd GBTModel::predict(const Eigen::MatrixXd& X, int n_trees) const {
  const std::size_t use = n_trees < 0 ? trees.size() : std::min(trees.size(), static_cast<std::size_t>(n_trees));
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double v = initial_prediction;
    for (std::size_t t = 0; t < use; ++t) v += options.learning_rate * trees[t].predict(X.row(i));
    out(i) = v;
  }
  return out;
}

GBTModel gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtOptions& options) {
  if (X.rows() != y.size()) throw std::invalid_argument("gbt_fit: X and y row counts differ");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("gbt_fit: non-finite input");
  if (options.min_leaf < 1 || options.max_depth < 0 || options.n_trees < 0 || !(options.learning_rate > 0.0)) {
    throw std::invalid_argument("gbt_fit: invalid hyperparameters");
  }
  if (X.rows() < 2 * options.min_leaf) {
    throw std::invalid_argument(fmt::format("gbt_fit: need at least {} rows, got {}", 2 * options.min_leaf, X.rows()));
  }

  GBTModel model;
  model.options = options;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += y(i);
  model.initial_prediction = total / static_cast<double>(y.size());

  Eigen::VectorXd prediction = Eigen::VectorXd::Constant(y.size(), model.initial_prediction);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  for (int t = 0; t < options.n_trees; ++t) {
    const Eigen::VectorXd residual = y - prediction;
    TreeBuilder builder{X, residual, options, {}};
    builder.grow(all, 0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) prediction(i) += options.learning_rate * builder.tree.predict(X.row(i));
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, double>> permutation_importance(const Predictor& model, const Eigen::MatrixXd& X,
                                                                   const Eigen::VectorXd& y,
                                                                   const std::vector<std::string>& columns,
                                                                   int repeats, std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("permutation importance needs repeats >= 1");
  if (static_cast<Eigen::Index>(columns.size()) != X.cols()) {
    throw std::invalid_argument("permutation importance: column names do not match X");
  }
  auto score = [&y](const Eigen::VectorXd& pred) {
    const auto m = evaluate(y, pred);
    return m.r2 ? *m.r2 : -(m.rmse * m.rmse);
  };
  const double base = score(model(X));

  Rng rng(seed);
  std::vector<std::pair<std::string, double>> out;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double drop = 0.0;
    for (int r = 0; r < repeats; ++r) {
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      rng.shuffle(std::span<Eigen::Index>(perm));
      Eigen::MatrixXd shuffled = X;
      for (Eigen::Index i = 0; i < X.rows(); ++i) shuffled(i, j) = X(perm[static_cast<std::size_t>(i)], j);
      drop += base - score(model(shuffled));
    }
    out.emplace_back(columns[static_cast<std::size_t>(j)], drop / repeats);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace launchpulse::learn
