#include "assin/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <list>
#include <unordered_map>

namespace assin {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) {
    throw dimension_error("kernel arguments differ in dimension: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

double KernelModel::decision(std::span<const double> x) const {
  // Positive and negative contributions are summed separately so that
  // mirrored expansions cancel exactly.
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < dual_coefs.size(); ++i) {
    const double t = dual_coefs[i] * rbf_kernel(support_vectors.row(i), x, gamma);
    if (t >= 0.0) pos += t; else neg -= t;
  }
  return (pos - neg) + bias;
}

namespace {

constexpr double kTau = 1e-12;

// LRU cache of kernel matrix rows.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows() * sizeof(double));
    capacity_ = std::clamp<std::size_t>(budget_bytes / row_bytes, 2, std::max<std::size_t>(2, x.rows()));
  }

  // The returned reference stays valid until two further distinct rows are requested.
  const std::vector<double>& row(std::size_t i) {
    if (auto it = rows_.find(i); it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.first);
      return it->second.second;
    }
    std::vector<double> values;
    if (rows_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      auto node = rows_.extract(victim);
      values = std::move(node.mapped().second);
    }
    values.resize(x_.rows());
    const auto xi = x_.row(i);
    for (std::size_t j = 0; j < x_.rows(); ++j) values[j] = rbf_kernel(xi, x_.row(j), gamma_);
    lru_.push_front(i);
    auto [it, ok] = rows_.emplace(i, std::make_pair(lru_.begin(), std::move(values)));
    return it->second.second;
  }

 private:
  const Matrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t,
                     std::pair<std::list<std::size_t>::iterator, std::vector<double>>>
      rows_;
};

// min 0.5 a'Qa + p'a  s.t.  y'a = 0,  0 <= a_t <= C,  Q_st = y_s y_t K(sample_s, sample_t).
struct DualProblem {
  std::vector<int> y;
  std::vector<std::size_t> sample;
  std::vector<double> p;
  double C;
};

struct DualSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;
  std::size_t iterations = 0;
};

class SmoSolver {
 public:
  SmoSolver(const DualProblem& prob, KernelCache& cache) : prob_(prob), cache_(cache) {}

  DualSolution solve(double tol, std::size_t max_iterations) {
    const std::size_t l = prob_.y.size();
    alpha_.assign(l, 0.0);
    grad_ = prob_.p;

    DualSolution out;
    std::size_t iter = 0;
    double violation = 0.0;
    for (;;) {
      std::size_t i = 0, j = 0;
      if (select_working_set(i, j, violation, tol)) break;
      if (iter >= max_iterations) {
        throw Error(ErrorCategory::Convergence,
                    "SMO did not converge within " + std::to_string(max_iterations) +
                        " iterations; max KKT violation " + std::to_string(violation));
      }
      ++iter;
      update_pair(i, j);
    }
    out.iterations = iter;
    out.max_violation = std::max(0.0, violation);
    out.rho = compute_rho();
    double obj = 0.0;
    for (std::size_t t = 0; t < l; ++t) obj += alpha_[t] * (grad_[t] + prob_.p[t]);
    out.objective = 0.5 * obj;
    out.alpha = std::move(alpha_);
    return out;
  }

 private:
  bool upper(std::size_t t) const { return alpha_[t] >= prob_.C; }
  bool lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  double q(std::size_t s, const std::vector<double>& krow_s, std::size_t t) const {
    return prob_.y[s] * prob_.y[t] * krow_s[prob_.sample[t]];
  }

  // Second-order working set selection; returns true when optimal.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j, double& violation, double tol) {
    const std::size_t l = prob_.y.size();
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gmax_idx = -1, gmin_idx = -1;
    double obj_diff_min = std::numeric_limits<double>::infinity();

    for (std::size_t t = 0; t < l; ++t) {
      if (prob_.y[t] == +1) {
        if (!upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          gmax_idx = static_cast<std::ptrdiff_t>(t);
        }
      } else {
        if (!lower(t) && grad_[t] >= gmax) {
          gmax = grad_[t];
          gmax_idx = static_cast<std::ptrdiff_t>(t);
        }
      }
    }

    const std::size_t i = gmax_idx >= 0 ? static_cast<std::size_t>(gmax_idx) : 0;
    const std::vector<double>* krow_i = gmax_idx >= 0 ? &cache_.row(prob_.sample[i]) : nullptr;

    for (std::size_t j = 0; j < l; ++j) {
      if (prob_.y[j] == +1) {
        if (lower(j)) continue;
        const double grad_diff = gmax + grad_[j];
        gmax2 = std::max(gmax2, grad_[j]);
        if (krow_i && grad_diff > 0.0) {
          const double quad = 2.0 - 2.0 * prob_.y[i] * q(i, *krow_i, j);
          const double od = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (od <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = od;
          }
        }
      } else {
        if (upper(j)) continue;
        const double grad_diff = gmax - grad_[j];
        gmax2 = std::max(gmax2, -grad_[j]);
        if (krow_i && grad_diff > 0.0) {
          const double quad = 2.0 + 2.0 * prob_.y[i] * q(i, *krow_i, j);
          const double od = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (od <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = od;
          }
        }
      }
    }

    violation = gmax + gmax2;
    if (!std::isfinite(violation)) violation = 0.0;
    if (violation < tol || gmin_idx < 0 || gmax_idx < 0) return true;
    out_i = i;
    out_j = static_cast<std::size_t>(gmin_idx);
    return false;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double C = prob_.C;
    // Row i is most recently used, so fetching row j cannot evict it.
    const std::vector<double>& krow_i = cache_.row(prob_.sample[i]);
    const std::vector<double>& krow_j = cache_.row(prob_.sample[j]);
    const double qij = q(i, krow_i, j);
    const double old_i = alpha_[i], old_j = alpha_[j];
    double ai = old_i, aj = old_j;

    if (prob_.y[i] != prob_.y[j]) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    ai = std::clamp(ai, 0.0, C);
    aj = std::clamp(aj, 0.0, C);
    alpha_[i] = ai;
    alpha_[j] = aj;

    const double dai = ai - old_i, daj = aj - old_j;
    const std::size_t l = prob_.y.size();
    const double si = prob_.y[i] * dai, sj = prob_.y[j] * daj;
    for (std::size_t t = 0; t < l; ++t) {
      const std::size_t s = prob_.sample[t];
      grad_[t] += prob_.y[t] * (si * krow_i[s] + sj * krow_j[s]);
    }
  }

  double compute_rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < prob_.y.size(); ++t) {
      const double yg = prob_.y[t] * grad_[t];
      if (upper(t)) {
        if (prob_.y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (prob_.y[t] == +1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    if (n_free > 0) return sum_free / static_cast<double>(n_free);
    return 0.5 * (ub + lb);
  }

  const DualProblem& prob_;
  KernelCache& cache_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
};

void check_kernel_inputs(const Matrix& x, std::size_t targets, const SmoOptions& o) {
  if (x.rows() != targets) {
    throw dimension_error("design has " + std::to_string(x.rows()) + " rows but " +
                          std::to_string(targets) + " targets");
  }
  if (x.rows() < 2) throw data_error("kernel learners need at least two samples");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw value_error("non-finite value in design matrix");
  }
  if (!(o.C > 0.0) || !std::isfinite(o.C)) throw value_error("C must be positive");
  if (!(o.gamma > 0.0) || !std::isfinite(o.gamma)) throw value_error("gamma must be positive");
  if (!(o.epsilon >= 0.0)) throw value_error("epsilon must be non-negative");
  if (!(o.tol > 0.0)) throw value_error("tolerance must be positive");
}

KernelModel collect(const Matrix& x, std::vector<double> coefs, double rho, KernelKind kind,
                    const SmoOptions& o) {
  KernelModel m;
  m.kind = kind;
  m.gamma = o.gamma;
  m.C = o.C;
  m.epsilon = kind == KernelKind::Svr ? o.epsilon : 0.0;
  m.bias = -rho;
  m.support_vectors = Matrix(0, x.cols());
  for (std::size_t i = 0; i < coefs.size(); ++i) {
    if (coefs[i] == 0.0) continue;
    m.support_vectors.append_row(x.row(i));
    m.dual_coefs.push_back(coefs[i]);
  }
  return m;
}

}  // namespace

KernelModel svr_fit(const Matrix& x, std::span<const double> y, const SmoOptions& opts,
                    SmoReport* report) {
  check_kernel_inputs(x, y.size(), opts);
  for (double v : y) {
    if (!std::isfinite(v)) throw value_error("non-finite regression target");
  }
  const std::size_t n = x.rows();
  DualProblem prob;
  prob.C = opts.C;
  prob.y.resize(2 * n);
  prob.sample.resize(2 * n);
  prob.p.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    prob.y[i] = +1;
    prob.sample[i] = i;
    prob.p[i] = opts.epsilon - y[i];
    prob.y[i + n] = -1;
    prob.sample[i + n] = i;
    prob.p[i + n] = opts.epsilon + y[i];
  }
  KernelCache cache(x, opts.gamma, opts.cache_bytes);
  SmoSolver solver(prob, cache);
  DualSolution sol = solver.solve(opts.tol, opts.max_iterations);

  std::vector<double> coefs(n);
  for (std::size_t i = 0; i < n; ++i) coefs[i] = sol.alpha[i] - sol.alpha[i + n];
  if (report) {
    report->iterations = sol.iterations;
    report->max_violation = sol.max_violation;
    report->dual_objective = sol.objective;
    report->coefficients = coefs;
  }
  return collect(x, std::move(coefs), sol.rho, KernelKind::Svr, opts);
}

KernelModel svm_fit_binary(const Matrix& x, std::span<const int> labels, const SmoOptions& opts,
                           SmoReport* report) {
  check_kernel_inputs(x, labels.size(), opts);
  const std::size_t n = x.rows();
  DualProblem prob;
  prob.C = opts.C;
  prob.y.assign(labels.begin(), labels.end());
  for (int v : prob.y) {
    if (v != 1 && v != -1) throw value_error("binary labels must be +1 or -1");
  }
  prob.sample.resize(n);
  for (std::size_t i = 0; i < n; ++i) prob.sample[i] = i;
  prob.p.assign(n, -1.0);
  KernelCache cache(x, opts.gamma, opts.cache_bytes);
  SmoSolver solver(prob, cache);
  DualSolution sol = solver.solve(opts.tol, opts.max_iterations);

  std::vector<double> coefs(n);
  for (std::size_t i = 0; i < n; ++i) coefs[i] = prob.y[i] * sol.alpha[i];
  if (report) {
    report->iterations = sol.iterations;
    report->max_violation = sol.max_violation;
    report->dual_objective = sol.objective;
    report->coefficients = coefs;
  }
  return collect(x, std::move(coefs), sol.rho, KernelKind::SvmBinary, opts);
}

EntailmentClass MulticlassSvm::predict(std::span<const double> x) const {
  if (machines.empty()) throw usage_error("multiclass SVM has not been trained");
  std::array<int, 3> votes{};
  std::array<double, 3> margin{};
  for (const auto& m : machines) {
    const double d = m.model.decision(x);
    const auto a = static_cast<std::size_t>(m.positive);
    const auto b = static_cast<std::size_t>(m.negative);
    if (d > 0.0) ++votes[a];
    if (d < 0.0) ++votes[b];
    margin[a] += d;
    margin[b] -= d;
  }
  EntailmentClass best = classes.front();
  for (auto c : classes) {
    const auto k = static_cast<std::size_t>(c);
    const auto kb = static_cast<std::size_t>(best);
    if (votes[k] > votes[kb] || (votes[k] == votes[kb] && margin[k] > margin[kb])) best = c;
  }
  return best;
}

MulticlassSvm svm_fit_multiclass(const Matrix& x, std::span<const EntailmentClass> labels,
                                 const SmoOptions& opts, std::vector<std::string>* warnings) {
  if (x.rows() != labels.size()) {
    throw dimension_error("design has " + std::to_string(x.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  std::array<std::size_t, 3> counts{};
  for (auto c : labels) ++counts[static_cast<std::size_t>(c)];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw data_error("multiclass SVM needs at least two classes in the training data");
  }
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg); else std::clog << "warning: " << msg << "\n";
  };

  MulticlassSvm out;
  out.classes.assign(kEntailmentClasses.begin(), kEntailmentClasses.end());
  for (std::size_t a = 0; a < out.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < out.classes.size(); ++b) {
      MulticlassSvm::Machine m{out.classes[a], out.classes[b], {}};
      const bool has_a = counts[a] > 0, has_b = counts[b] > 0;
      if (!has_a || !has_b) {
        m.model.kind = KernelKind::SvmBinary;
        m.model.gamma = opts.gamma;
        m.model.C = opts.C;
        m.model.support_vectors = Matrix(0, x.cols());
        m.model.bias = has_a ? 1.0 : (has_b ? -1.0 : 0.0);
        warn(std::string("class '") + std::string(to_string(has_a ? out.classes[b] : out.classes[a])) +
             "' absent; machine " + std::string(to_string(out.classes[a])) + "/" +
             std::string(to_string(out.classes[b])) + " votes constantly");
      } else {
        std::vector<std::size_t> idx;
        std::vector<int> y;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          const auto k = static_cast<std::size_t>(labels[i]);
          if (k == a || k == b) {
            idx.push_back(i);
            y.push_back(k == a ? +1 : -1);
          }
        }
        m.model = svm_fit_binary(x.select_rows(idx), y, opts);
      }
      out.machines.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace assin
