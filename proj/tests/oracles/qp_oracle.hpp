#pragma once

// Dense primal-dual interior-point solver for
//   minimize 0.5 x'Hx + c'x  subject to  lo <= x <= hi,  a'x = b (optional)
// Used only as a reference for the SMO and Lasso solvers; bounds may be
// infinite above.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace oracle {

struct QpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

inline QpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             const std::optional<Eigen::VectorXd>& a = std::nullopt,
                             double b = 0.0) {
  const Eigen::Index n = c.size();
  const bool eq = a.has_value();
  const Eigen::Index m = eq ? 1 : 0;
  Eigen::VectorXd x(n), zl = Eigen::VectorXd::Ones(n), zu = Eigen::VectorXd::Zero(n);
  Eigen::Array<bool, Eigen::Dynamic, 1> has_hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    has_hi[i] = std::isfinite(hi[i]);
    x[i] = has_hi[i] ? 0.5 * (lo[i] + hi[i]) : lo[i] + 1.0;
    if (has_hi[i]) zu[i] = 1.0;
  }
  double y = 0.0;
  const double big = 1.0 + H.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();

  QpResult res;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd sl = x - lo;
    Eigen::VectorXd su(n);
    for (Eigen::Index i = 0; i < n; ++i) su[i] = has_hi[i] ? hi[i] - x[i] : 1.0;

    Eigen::VectorXd rd = H * x + c - zl + zu;
    if (eq) rd -= (*a) * y;
    const double rp = eq ? a->dot(x) - b : 0.0;

    double gap = 0.0;
    int pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      gap += sl[i] * zl[i];
      ++pairs;
      if (has_hi[i]) {
        gap += su[i] * zu[i];
        ++pairs;
      }
    }
    res.iterations = it;
    if (gap < 1e-13 * big && rd.cwiseAbs().maxCoeff() < 1e-12 * big && std::fabs(rp) < 1e-12 * big)
      break;

    const double mu = 0.1 * gap / pairs;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd rhs(n + m);
    K.topLeftCorner(n, n) = H;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = zl[i] / sl[i];
      double r = -rd[i] + (mu / sl[i] - zl[i]);
      if (has_hi[i]) {
        d += zu[i] / su[i];
        r -= (mu / su[i] - zu[i]);
      }
      K(i, i) += d;
      rhs[i] = r;
    }
    if (eq) {
      K.block(0, n, n, 1) = -(*a);
      K.block(n, 0, 1, n) = a->transpose();
      rhs[n] = -rp;
    }
    const Eigen::VectorXd step = K.fullPivLu().solve(rhs);
    const Eigen::VectorXd dx = step.head(n);
    const double dy = eq ? step[n] : 0.0;
    Eigen::VectorXd dzl(n), dzu = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dzl[i] = (mu - sl[i] * zl[i] - zl[i] * dx[i]) / sl[i];
      if (has_hi[i]) dzu[i] = (mu - su[i] * zu[i] + zu[i] * dx[i]) / su[i];
    }

    double alpha = 1.0;
    auto limit = [&](double v, double dv) {
      if (dv < 0.0) alpha = std::min(alpha, -0.99 * v / dv);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
      limit(sl[i], dx[i]);
      limit(zl[i], dzl[i]);
      if (has_hi[i]) {
        limit(su[i], -dx[i]);
        limit(zu[i], dzu[i]);
      }
    }
    x += alpha * dx;
    y += alpha * dy;
    zl += alpha * dzl;
    zu += alpha * dzu;
  }
  res.x = x;
  res.objective = 0.5 * x.dot(H * x) + c.dot(x);
  return res;
}

}  // namespace oracle
