#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace spreadlab {

struct AdfResult {
  double statistic = 0;
  int lag = 0;     // lagged differences included
  int n_obs = 0;   // observations in the final regression
  double critical_1pct = 0;
  double critical_5pct = 0;
  double critical_10pct = 0;
  bool stationary = false;  // statistic < critical_5pct
};

namespace adf_detail {

struct OlsFit {
  Eigen::VectorXd beta;
  double ssr = 0;
  Eigen::MatrixXd xtx_inverse;
};

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  OlsFit fit;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  fit.beta = qr.solve(y);
  Eigen::VectorXd resid = y - X * fit.beta;
  fit.ssr = resid.squaredNorm();
  const auto k = X.cols();
  Eigen::MatrixXd R = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  fit.xtx_inverse = Rinv * Rinv.transpose();
  return fit;
}

/// Gaussian log-likelihood AIC with k regressors; same expression the usual
/// reference implementations minimize, so lag choices line up exactly.
inline double aic_of(double ssr, int n, int k) {
  double llf = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(ssr / n) + 1.0);
  return -2.0 * llf + 2.0 * k;
}

/// MacKinnon (2010) response-surface critical values, constant-only case.
inline double mackinnon_crit_c(int nobs, int level_pct) {
  double n = static_cast<double>(nobs);
  switch (level_pct) {
    case 1:
      return -3.43035 - 6.5393 / n - 16.786 / (n * n) - 79.433 / (n * n * n);
    case 5:
      return -2.86154 - 2.8903 / n - 4.234 / (n * n) - 40.040 / (n * n * n);
    case 10:
      return -2.56677 - 1.5384 / n - 2.809 / (n * n);
    default:
      throw ComputeError("unsupported ADF significance level");
  }
}

}  // namespace adf_detail

inline int adf_default_max_lag(size_t n) {
  int by_size = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
  int cap = static_cast<int>(n) / 2 - 2;  // room for the constant and the diff
  int lag = std::min(by_size, cap);
  return lag < 0 ? 0 : lag;
}

/// Augmented Dickey-Fuller unit-root test with an intercept and no trend.
/// Delta y_t is regressed on y_{t-1}, `lag` lagged differences, and a
/// constant; the statistic is the t-ratio on y_{t-1}. The lag count is
/// chosen by minimum AIC over a common trimmed sample, up to max_lag
/// (default floor(12*(n/100)^0.25)).
inline AdfResult adf_test(const std::vector<double>& series, int max_lag = -1) {
  const int n = static_cast<int>(series.size());
  if (n < 4) throw ComputeError("adf_test: series too short");
  double lo = series[0], hi = series[0];
  for (double v : series) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) throw ComputeError("adf_test: degenerate (constant) series");

  if (max_lag < 0) max_lag = adf_default_max_lag(series.size());
  const int m = n - 1;  // differenced length
  const int trimmed_rows = m - max_lag;
  if (trimmed_rows < 20)
    throw ComputeError("adf_test: fewer than 20 observations after differencing and lagging");

  std::vector<double> diff(m);
  for (int t = 0; t < m; ++t) diff[t] = series[t + 1] - series[t];

  // Regressor block shared by every candidate: rows are aligned so all lag
  // counts see the same observations (comparable AIC).
  auto build = [&](int rows, int lag, bool const_last) {
    Eigen::MatrixXd X(rows, lag + 2);
    Eigen::VectorXd y(rows);
    int offset = m - rows;  // first usable diff index
    for (int r = 0; r < rows; ++r) {
      int t = offset + r;
      y(r) = diff[t];
      int level_col = const_last ? 0 : 1;
      X(r, const_last ? lag + 1 : 0) = 1.0;
      X(r, level_col) = series[t];
      for (int j = 1; j <= lag; ++j) X(r, level_col + j) = diff[t - j];
    }
    return std::make_pair(X, y);
  };

  int best_lag = 0;
  double best_aic = 0;
  for (int lag = 0; lag <= max_lag; ++lag) {
    auto [X, y] = build(trimmed_rows, lag, /*const_last=*/false);
    auto fit = adf_detail::ols(X, y);
    double aic = adf_detail::aic_of(fit.ssr, trimmed_rows, lag + 2);
    if (lag == 0 || aic < best_aic) {
      best_aic = aic;
      best_lag = lag;
    }
  }

  const int rows = m - best_lag;
  auto [X, y] = build(rows, best_lag, /*const_last=*/true);
  auto fit = adf_detail::ols(X, y);
  const int k = best_lag + 2;
  if (rows <= k) throw ComputeError("adf_test: not enough observations for the chosen lag");
  double sigma2 = fit.ssr / (rows - k);
  // column 0 holds y_{t-1} in the const-last layout built above
  double se = std::sqrt(sigma2 * fit.xtx_inverse(0, 0));
  double stat = fit.beta(0) / se;

  AdfResult result;
  result.statistic = stat;
  result.lag = best_lag;
  result.n_obs = rows;
  result.critical_1pct = adf_detail::mackinnon_crit_c(rows, 1);
  result.critical_5pct = adf_detail::mackinnon_crit_c(rows, 5);
  result.critical_10pct = adf_detail::mackinnon_crit_c(rows, 10);
  result.stationary = result.statistic < result.critical_5pct;
  return result;
}

}  // namespace spreadlab
