#include "assin/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace assin {

std::vector<double> expand_interactions(std::span<const double> x) {
  const std::size_t k = x.size();
  std::vector<double> out;
  out.reserve(interaction_width(k));
  out.insert(out.end(), x.begin(), x.end());
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t m = l + 1; m < k; ++m) out.push_back(x[l] * x[m]);
  }
  return out;
}

Matrix expand_interactions(const Matrix& x) {
  Matrix out(x.rows(), interaction_width(x.cols()));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto e = expand_interactions(x.row(i));
    std::copy(e.begin(), e.end(), out.row(i).begin());
  }
  return out;
}

Standardization standardize_fit(const Matrix& x) {
  if (x.rows() < 2) throw data_error("standardization needs at least two rows");
  const std::size_t n = x.rows(), p = x.cols();
  Standardization s{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0),
                    std::vector<bool>(p, false)};
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x(i, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.means[j] = mean;
    // Rounding in the mean leaves ~1e-17 residue on constant columns.
    if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) {
      s.constant[j] = true;
    } else {
      s.scales[j] = sd;
    }
  }
  return s;
}

Matrix standardize_apply(const Matrix& x, std::span<const double> means,
                         std::span<const double> scales) {
  if (means.size() != x.cols() || scales.size() != x.cols()) {
    throw dimension_error("standardization has " + std::to_string(means.size()) +
                          " columns, data has " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - means[j]) / scales[j];
  }
  return out;
}

namespace {

void check_inputs(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) {
    throw dimension_error("design has " + std::to_string(x.rows()) + " rows but " +
                          std::to_string(y.size()) + " responses");
  }
  if (x.rows() < 2) throw data_error("lasso needs at least two observations");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw value_error("non-finite value in design matrix");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw value_error("non-finite response");
  }
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Column-major copy of the standardized design; constant columns are dropped
// to exact zeros.
std::vector<std::vector<double>> standardized_columns(const Matrix& x, const Standardization& s) {
  std::vector<std::vector<double>> cols(x.cols(), std::vector<double>(x.rows(), 0.0));
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (s.constant[j]) continue;
    for (std::size_t i = 0; i < x.rows(); ++i) cols[j][i] = (x(i, j) - s.means[j]) / s.scales[j];
  }
  return cols;
}

double mean_of(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

}  // namespace

double lasso_lambda_max(const Matrix& x_raw, std::span<const double> y, bool interactions) {
  const Matrix x = interactions ? expand_interactions(x_raw) : x_raw;
  check_inputs(x, y);
  const auto s = standardize_fit(x);
  const auto cols = standardized_columns(x, s);
  const double ybar = mean_of(y);
  const double n = static_cast<double>(y.size());
  double best = 0.0;
  for (const auto& c : cols) {
    double g = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) g += c[i] * (y[i] - ybar);
    best = std::max(best, std::fabs(g) / n);
  }
  return best;
}

std::vector<double> lasso_lambda_grid(double lambda_max, std::size_t points, double min_ratio) {
  std::vector<double> out;
  if (points == 0) return out;
  if (points == 1) return {lambda_max};
  const double step = std::log(min_ratio) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    out.push_back(lambda_max * std::exp(step * static_cast<double>(k)));
  }
  return out;
}

LassoModel lasso_fit(const Matrix& x, std::span<const double> y, const LassoOptions& opts,
                     LassoTrace* trace) {
  check_inputs(x, y);
  if (!(opts.lambda >= 0.0) || !std::isfinite(opts.lambda)) {
    throw value_error("lambda must be a finite non-negative number");
  }
  if (!(opts.tol > 0.0)) throw value_error("tolerance must be positive");
  if (opts.max_sweeps == 0) throw value_error("max_sweeps must be positive");

  const std::size_t n = x.rows(), p = x.cols();
  const double nd = static_cast<double>(n);
  const auto s = standardize_fit(x);
  const auto cols = standardized_columns(x, s);

  std::vector<double> col_sq(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (double v : cols[j]) col_sq[j] += v * v;
    col_sq[j] /= nd;
  }

  LassoModel model;
  model.intercept = mean_of(y);
  model.weights.assign(p, 0.0);
  model.lambda = opts.lambda;
  model.column_means = s.means;
  model.column_scales = s.scales;
  model.base_dim = p;

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - model.intercept;

  auto objective = [&] {
    double rss = 0.0;
    for (double r : resid) rss += r * r;
    double l1 = 0.0;
    for (double w : model.weights) l1 += std::fabs(w);
    return rss / (2.0 * nd) + opts.lambda * l1;
  };

  LassoTrace local;
  LassoTrace& tr = trace ? *trace : local;
  tr = {};

  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const auto& c = cols[j];
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) g += c[i] * resid[i];
      const double old = model.weights[j];
      const double updated = soft_threshold(g / nd + col_sq[j] * old, opts.lambda) / col_sq[j];
      const double delta = updated - old;
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * c[i];
        model.weights[j] = updated;
        max_change = std::max(max_change, std::fabs(delta));
      }
    }
    tr.sweeps = sweep + 1;
    if (trace) tr.objective.push_back(objective());
    if (max_change < opts.tol) {
      tr.converged = true;
      break;
    }
  }
  return model;
}

LassoModel lasso_fit_interactions(const Matrix& x, std::span<const double> y,
                                  const LassoOptions& opts, LassoTrace* trace) {
  LassoModel m = lasso_fit(expand_interactions(x), y, opts, trace);
  m.base_dim = x.cols();
  m.interactions = true;
  return m;
}

double lasso_predict(const LassoModel& model, std::span<const double> x) {
  if (x.size() != model.base_dim) {
    throw dimension_error("lasso model expects " + std::to_string(model.base_dim) +
                          " features, got " + std::to_string(x.size()));
  }
  std::vector<double> design;
  std::span<const double> row = x;
  if (model.interactions) {
    design = expand_interactions(x);
    row = design;
  }
  double out = model.intercept;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (model.weights[j] == 0.0) continue;
    out += model.weights[j] * ((row[j] - model.column_means[j]) / model.column_scales[j]);
  }
  return out;
}

}  // namespace assin
