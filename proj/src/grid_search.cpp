#include "assin/grid_search.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "assin/error.hpp"
#include "assin/metrics.hpp"

namespace assin {

std::vector<ParamSet> ParamGrid::candidates() const {
  std::vector<ParamSet> out;
  if (axes.empty()) return out;
  for (const auto& [name, values] : axes) {
    if (values.empty()) return out;
  }
  std::vector<std::size_t> pos(axes.size(), 0);
  for (;;) {
    ParamSet p;
    for (std::size_t a = 0; a < axes.size(); ++a) p[axes[a].first] = axes[a].second[pos[a]];
    out.push_back(std::move(p));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].second.size()) break;
      pos[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::size_t ParamGrid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

void ParamGrid::set(const std::string& name, std::vector<double> values) {
  for (auto& [k, v] : axes) {
    if (k == name) {
      v = std::move(values);
      return;
    }
  }
  axes.emplace_back(name, std::move(values));
}

std::string_view to_string(LearnerKind k) noexcept {
  switch (k) {
    case LearnerKind::Lasso: return "lasso";
    case LearnerKind::Svr: return "svr";
    case LearnerKind::Svm: return "svm";
  }
  return "lasso";
}

LearnerKind parse_learner(std::string_view s) {
  if (s == "lasso") return LearnerKind::Lasso;
  if (s == "svr") return LearnerKind::Svr;
  if (s == "svm") return LearnerKind::Svm;
  throw usage_error("unknown learner '" + std::string(s) + "' (expected lasso, svr or svm)");
}

ParamGrid default_grid(LearnerKind k) {
  ParamGrid g;
  switch (k) {
    case LearnerKind::Lasso:
      break;
    case LearnerKind::Svr:
      g.set("C", {0.1, 1, 10, 100});
      g.set("gamma", {1.0 / 15.0, 0.01, 0.1, 1});
      g.set("epsilon", {0.05, 0.1, 0.2});
      break;
    case LearnerKind::Svm:
      g.set("C", {0.1, 1, 10, 100});
      g.set("gamma", {1.0 / 15.0, 0.01, 0.1, 1});
      break;
  }
  return g;
}

namespace {

// Uniform integer in [0, bound] by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % range);
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % range;
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw usage_error("cross validation needs at least two folds");
  if (n < folds) {
    throw data_error("cannot split " + std::to_string(n) + " samples into " +
                     std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[uniform_upto(rng, i)]);

  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t len = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                  idx.begin() + static_cast<std::ptrdiff_t>(start + len));
    start += len;
  }
  return out;
}

GridSearchResult grid_search_cv(const ParamGrid& grid, std::size_t n, std::size_t folds,
                                std::uint64_t seed, const FoldScorer& scorer, unsigned jobs) {
  GridSearchResult res;
  res.candidates = grid.candidates();
  if (res.candidates.empty()) throw usage_error("grid search needs a non-empty parameter grid");
  res.folds = folds;
  const auto parts = make_folds(n, folds, seed);

  std::vector<std::vector<std::size_t>> train(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    for (std::size_t g = 0; g < folds; ++g) {
      if (g != f) train[f].insert(train[f].end(), parts[g].begin(), parts[g].end());
    }
    std::sort(train[f].begin(), train[f].end());
  }

  const std::size_t tasks = res.candidates.size() * folds;
  res.fold_scores.assign(res.candidates.size(), std::vector<double>(folds, 0.0));
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t c = t / folds, f = t % folds;
      try {
        res.fold_scores[c][f] = scorer(res.candidates[c], train[f], parts[f]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  res.cv_scores.resize(res.candidates.size());
  for (std::size_t c = 0; c < res.candidates.size(); ++c) {
    double s = 0.0;
    for (double v : res.fold_scores[c]) s += v;
    res.cv_scores[c] = s / static_cast<double>(folds);
    if (res.cv_scores[c] > res.cv_scores[res.best_index]) res.best_index = c;
  }
  res.best_params = res.candidates[res.best_index];
  return res;
}

double clamp_similarity(double raw) { return std::clamp(raw, kMinSimilarity, kMaxSimilarity); }

namespace {

double param(const ParamSet& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw usage_error("grid candidate lacks parameter '" + name + "'");
  return it->second;
}

}  // namespace

GridSearchResult grid_search_regression(LearnerKind learner, const ParamGrid& grid,
                                        const Matrix& x, std::span<const double> y,
                                        const CvOptions& opts) {
  if (learner == LearnerKind::Svm) throw usage_error("svm is a classification learner");
  if (x.rows() != y.size()) throw dimension_error("design rows differ from target count");
  auto scorer = [&](const ParamSet& p, std::span<const std::size_t> tr,
                    std::span<const std::size_t> te) {
    const Matrix xt = x.select_rows(tr);
    std::vector<double> yt;
    for (auto i : tr) yt.push_back(y[i]);
    std::vector<double> pred, gold;
    if (learner == LearnerKind::Lasso) {
      LassoOptions lo{param(p, "lambda"), opts.lasso_tol, opts.lasso_max_sweeps};
      const LassoModel m = lasso_fit_interactions(xt, yt, lo);
      for (auto i : te) pred.push_back(clamp_similarity(lasso_predict(m, x.row(i))));
    } else {
      SmoOptions so;
      so.C = param(p, "C");
      so.gamma = param(p, "gamma");
      so.epsilon = param(p, "epsilon");
      so.tol = opts.smo_tol;
      so.max_iterations = opts.smo_max_iterations;
      const KernelModel m = svr_fit(xt, yt, so);
      for (auto i : te) pred.push_back(clamp_similarity(m.decision(x.row(i))));
    }
    for (auto i : te) gold.push_back(y[i]);
    try {
      return pearson(pred, gold);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Data) return 0.0;
      throw;
    }
  };
  return grid_search_cv(grid, x.rows(), opts.folds, opts.seed, scorer, opts.jobs);
}

GridSearchResult grid_search_classification(const ParamGrid& grid, const Matrix& x,
                                            std::span<const EntailmentClass> labels,
                                            const CvOptions& opts) {
  if (x.rows() != labels.size()) throw dimension_error("design rows differ from label count");
  std::mutex mu;
  std::vector<std::string> warnings;
  auto scorer = [&](const ParamSet& p, std::span<const std::size_t> tr,
                    std::span<const std::size_t> te) {
    const Matrix xt = x.select_rows(tr);
    std::vector<EntailmentClass> lt;
    for (auto i : tr) lt.push_back(labels[i]);
    SmoOptions so;
    so.C = param(p, "C");
    so.gamma = param(p, "gamma");
    so.tol = opts.smo_tol;
    so.max_iterations = opts.smo_max_iterations;
    std::vector<std::string> w;
    const MulticlassSvm m = svm_fit_multiclass(xt, lt, so, &w);
    if (!w.empty()) {
      std::lock_guard lock(mu);
      warnings.insert(warnings.end(), w.begin(), w.end());
    }
    std::vector<EntailmentClass> pred, gold;
    for (auto i : te) {
      pred.push_back(m.predict(x.row(i)));
      gold.push_back(labels[i]);
    }
    return accuracy(pred, gold);
  };
  auto res = grid_search_cv(grid, x.rows(), opts.folds, opts.seed, scorer, opts.jobs);
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  for (const auto& w : warnings) std::clog << "warning: cross-validation fold: " << w << "\n";
  return res;
}

}  // namespace assin
