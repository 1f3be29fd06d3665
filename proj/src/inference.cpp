#include "launchpulse/inference.hpp"

#include <algorithm>

namespace launchpulse {

RegressionFit fit_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> column_names) {
  RegressionFit fit;
  auto ols = ols_fit(X, y, &column_names);
  fit.coefficients = std::move(ols.coefficients);
  fit.residuals = std::move(ols.residuals);
  fit.covariance_hc1 = hc1_covariance(X, fit.residuals);
  fit.n = X.rows();
  fit.k = X.cols();
  fit.column_names = std::move(column_names);
  // Residuals at rounding level are an exact fit; report zero variance rather than noise.
  fit.perfect_fit = fit.residuals.norm() <= 1e-12 * std::max(1.0, y.norm());
  if (fit.perfect_fit) fit.covariance_hc1.setZero();
  fit.se = fit.covariance_hc1.diagonal().cwiseMax(0.0).cwiseSqrt();

  const double dof = static_cast<double>(fit.n - fit.k);
  fit.t_stats.resize(fit.k);
  fit.p_values.resize(fit.k);
  for (Eigen::Index j = 0; j < fit.k; ++j) {
    const double b = fit.coefficients(j);
    const double s = fit.se(j);
    if (s > 0.0) {
      fit.t_stats(j) = b / s;
      fit.p_values(j) = stats::student_t_two_sided(fit.t_stats(j), dof);
    } else {
      fit.t_stats(j) = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
      fit.p_values(j) = fit.perfect_fit ? 0.0 : (b == 0.0 ? 1.0 : 0.0);
    }
  }
  return fit;
}

std::vector<CoefRow> coef_table(const RegressionFit& fit, const std::vector<std::string>& controls) {
  std::vector<CoefRow> rows;
  for (Eigen::Index j = 0; j < fit.k; ++j) {
    const auto& name = fit.column_names[static_cast<std::size_t>(j)];
    rows.push_back({name, fit.coefficients(j), fit.se(j), fit.t_stats(j), fit.p_values(j),
                    std::find(controls.begin(), controls.end(), name) != controls.end(), fit.perfect_fit});
  }
  return rows;
}

}  // namespace launchpulse
