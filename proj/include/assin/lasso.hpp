#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "assin/matrix.hpp"

namespace assin {

// K base features plus every product x_l * x_k with l < k.
constexpr std::size_t interaction_width(std::size_t k) noexcept { return k + k * (k - 1) / 2; }

// Base features in order, then products (l, k), l < k, row-major.
std::vector<double> expand_interactions(std::span<const double> x);
Matrix expand_interactions(const Matrix& x);

struct Standardization {
  std::vector<double> means;
  std::vector<double> scales;     // population standard deviation, or 1
  std::vector<bool> constant;     // zero-variance columns (scale forced to 1)
};

// Requires at least two rows.
Standardization standardize_fit(const Matrix& x);
Matrix standardize_apply(const Matrix& x, std::span<const double> means,
                         std::span<const double> scales);

/// Penalized Lasso on standardized columns:
///   minimize (1/2n) ||y - b0 - Z theta||^2 + lambda ||theta||_1.
/// This is the Lagrangian form of least squares under ||theta||_1 <= C; the
/// map between C and lambda is monotone, so sweeping lambda sweeps C.
struct LassoModel {
  double intercept = 0.0;
  std::vector<double> weights;        // one per design column (standardized scale)
  double lambda = 0.0;
  std::vector<double> column_means;
  std::vector<double> column_scales;
  std::size_t base_dim = 0;           // length of the raw input vector
  bool interactions = false;          // expand raw input before standardizing

  bool operator==(const LassoModel&) const = default;
};

struct LassoOptions {
  double lambda = 0.0;
  double tol = 1e-6;
  std::size_t max_sweeps = 10000;
};

struct LassoTrace {
  std::vector<double> objective;  // after each sweep
  std::size_t sweeps = 0;
  bool converged = false;
};

// Fits on the given design columns as-is (no expansion).
LassoModel lasso_fit(const Matrix& x, std::span<const double> y, const LassoOptions& opts,
                     LassoTrace* trace = nullptr);

// Expands the raw features with all two-way interactions, then fits.
LassoModel lasso_fit_interactions(const Matrix& x, std::span<const double> y,
                                  const LassoOptions& opts, LassoTrace* trace = nullptr);

// Smallest lambda for which the solution is identically zero, on the design
// after optional interaction expansion.
double lasso_lambda_max(const Matrix& x, std::span<const double> y, bool interactions);

// 20 log-spaced values from lambda_max down to lambda_max * 1e-4 by default.
std::vector<double> lasso_lambda_grid(double lambda_max, std::size_t points = 20,
                                      double min_ratio = 1e-4);

double lasso_predict(const LassoModel& model, std::span<const double> x);

}  // namespace assin
