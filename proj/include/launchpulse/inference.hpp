#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "launchpulse/stats.hpp"

namespace launchpulse {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class RankDeficientError : public std::invalid_argument {
 public:
  RankDeficientError(const std::string& what, std::vector<Eigen::Index> columns)
      : std::invalid_argument(what), columns_(std::move(columns)) {}
  const std::vector<Eigen::Index>& columns() const { return columns_; }

 private:
  std::vector<Eigen::Index> columns_;
};

template <typename Scalar>
struct OlsSolution {
  Vec<Scalar> coefficients;
  Vec<Scalar> residuals;
};

namespace detail {

inline std::string column_label(const std::vector<std::string>* names, Eigen::Index j) {
  if (names != nullptr && static_cast<std::size_t>(j) < names->size()) return (*names)[static_cast<std::size_t>(j)];
  return fmt::format("#{}", j);
}

}  // namespace detail

/// Least squares via column-pivoted Householder QR. Throws on n <= k, non-finite input, or
/// rank deficiency (the error names the columns that are linear combinations of the others).
template <typename DerivedX, typename DerivedY>
OlsSolution<typename DerivedX::Scalar> ols_fit(const Eigen::MatrixBase<DerivedX>& X,
                                               const Eigen::MatrixBase<DerivedY>& y,
                                               const std::vector<std::string>* column_names = nullptr) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) throw std::invalid_argument(fmt::format("ols_fit: X has {} rows but y has {}", n, y.size()));
  if (n <= k) throw std::invalid_argument(fmt::format("ols_fit: need n > k (n={}, k={})", n, k));
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("ols_fit: non-finite input");

  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(X);
  if (qr.rank() < k) {
    std::vector<Eigen::Index> offending;
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      offending.push_back(perm(i));
      names += (names.empty() ? "" : ", ") + detail::column_label(column_names, perm(i));
    }
    throw RankDeficientError(fmt::format("ols_fit: design matrix is rank deficient (rank {} of {}); dependent columns: {}",
                                         qr.rank(), k, names),
                             std::move(offending));
  }
  OlsSolution<Scalar> out;
  out.coefficients = qr.solve(y.derived());
  out.residuals = y - X * out.coefficients;
  return out;
}

/// (X'X)^{-1} from the R factor of an unpivoted QR.
template <typename Derived>
Mat<typename Derived::Scalar> xtx_inverse(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = X.cols();
  Eigen::HouseholderQR<Mat<Scalar>> qr(X);
  const Mat<Scalar> R = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Mat<Scalar> R_inv = R.template triangularView<Eigen::Upper>().solve(Mat<Scalar>::Identity(k, k));
  return R_inv * R_inv.transpose();
}

/// HC1 sandwich: n/(n-k) (X'X)^{-1} X' diag(e^2) X (X'X)^{-1}.
template <typename DerivedX, typename DerivedE>
Mat<typename DerivedX::Scalar> hc1_covariance(const Eigen::MatrixBase<DerivedX>& X,
                                              const Eigen::MatrixBase<DerivedE>& residuals) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (residuals.size() != n) throw std::invalid_argument("hc1_covariance: residual length differs from rows of X");
  if (n <= k) throw std::invalid_argument(fmt::format("hc1_covariance: scale n/(n-k) undefined (n={}, k={})", n, k));
  const Mat<Scalar> bread = xtx_inverse(X);
  const Mat<Scalar> weighted = X.derived().array().colwise() * residuals.derived().array().square();
  const Mat<Scalar> meat = X.transpose() * weighted;
  Mat<Scalar> V = bread * meat * bread;
  V *= static_cast<Scalar>(n) / static_cast<Scalar>(n - k);
  return (V + V.transpose()) / Scalar(2);
}

struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance_hc1;
  Eigen::VectorXd se;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  std::vector<std::string> column_names;
  bool perfect_fit = false;  // all standard errors zero; p-values reported as 0
};

/// OLS + HC1 + Student-t (n - k dof) two-sided tests.
RegressionFit fit_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             std::vector<std::string> column_names);

struct CoefRow {
  std::string name;
  double coefficient = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool is_control = false;
  bool perfect_fit = false;
};

/// One row per coefficient. Columns listed in `controls` are flagged as controls.
std::vector<CoefRow> coef_table(const RegressionFit& fit, const std::vector<std::string>& controls);

}  // namespace launchpulse
