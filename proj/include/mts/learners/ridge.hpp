#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/matrix.hpp"

namespace mts::learners {

class RidgeModel final : public Regressor {
 public:
  RidgeModel(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {}

  std::size_t feature_dim() const override { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 protected:
  double predict_impl(std::span<const double> x) const override {
    double z = b_;
    for (std::size_t j = 0; j < w_.size(); ++j) z += w_[j] * x[j];
    return z;
  }

 private:
  std::vector<double> w_;
  double b_;
};

namespace detail {

// In-place lower Cholesky; returns false when the matrix is not positive
// definite within tolerance.
inline bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  return true;
}

inline void cholesky_solve(const std::vector<double>& l, std::size_t n,
                           std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) {  // forward: L z = rhs
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
    x[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // backward: L^T w = z
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * x[k];
    x[ii] = s / l[ii * n + ii];
  }
}

}  // namespace detail

// Closed-form ridge regression on standardized features: each column is
// centered and scaled to unit variance before the penalty applies, so alpha
// means the same thing regardless of raw feature scales, and the intercept
// absorbs the means unpenalized.  The learned scaling folds back into the
// returned weights.
inline RidgeModel fit_ridge(const Matrix& X, const std::vector<double>& y,
                            double alpha) {
  if (X.rows() == 0) throw DegenerateInputError("fit_ridge: empty input");
  if (y.size() != X.rows())
    throw ShapeError("fit_ridge: rows and targets must align");
  if (alpha < 0.0) throw ConfigurationError("fit_ridge: alpha must be >= 0");

  std::size_t n = X.rows(), d = X.cols();
  std::vector<double> xm(d, 0.0);
  double ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xm[j] += X.at(i, j);
    ym += y[i];
  }
  for (double& v : xm) v /= static_cast<double>(n);
  ym /= static_cast<double>(n);

  std::vector<double> xs(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double c = X.at(i, j) - xm[j];
      xs[j] += c * c;
    }
  for (double& v : xs) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < 1e-12) v = 1.0;  // constant column: keep it zero after centering
  }

  // A = Xs^T Xs + alpha I, rhs = Xs^T yc on the standardized columns.
  std::vector<double> a(d * d, 0.0), rhs(d, 0.0);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    double yc = y[i] - ym;
    for (std::size_t j = 0; j < d; ++j) row[j] = (X.at(i, j) - xm[j]) / xs[j];
    for (std::size_t j = 0; j < d; ++j) {
      rhs[j] += row[j] * yc;
      for (std::size_t k = 0; k <= j; ++k) a[j * d + k] += row[j] * row[k];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) a[j * d + k] = a[k * d + j];
    a[j * d + j] += alpha;
  }

  // Escalating jitter covers the alpha == 0 singular case.
  std::vector<double> l = a, w = rhs;
  double jitter = 1e-12;
  for (int attempt = 0; !detail::cholesky(l, d); ++attempt) {
    if (attempt >= 8)
      throw DegenerateInputError(
          "fit_ridge: normal equations are not positive definite");
    l = a;
    for (std::size_t j = 0; j < d; ++j) l[j * d + j] += jitter;
    jitter *= 10.0;
  }
  detail::cholesky_solve(l, d, w);

  for (std::size_t j = 0; j < d; ++j) w[j] /= xs[j];
  double b = ym;
  for (std::size_t j = 0; j < d; ++j) b -= w[j] * xm[j];
  return RidgeModel(std::move(w), b);
}

}  // namespace mts::learners
