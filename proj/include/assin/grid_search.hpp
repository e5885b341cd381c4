#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "assin/corpus.hpp"
#include "assin/kernel.hpp"
#include "assin/lasso.hpp"
#include "assin/matrix.hpp"

namespace assin {

using ParamSet = std::map<std::string, double>;

/// Named parameter axes; candidates enumerate the cartesian product with the
/// last axis varying fastest.
struct ParamGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::vector<ParamSet> candidates() const;
  std::size_t size() const;
  void set(const std::string& name, std::vector<double> values);
};

enum class LearnerKind { Lasso, Svr, Svm };

std::string_view to_string(LearnerKind k) noexcept;
LearnerKind parse_learner(std::string_view s);

// C in {0.1, 1, 10, 100}, gamma in {1/15, 0.01, 0.1, 1}, epsilon in {0.05, 0.1, 0.2}.
// The Lasso grid is data dependent; see lasso_lambda_grid.
ParamGrid default_grid(LearnerKind k);

// Shuffles 0..n-1 once with a seeded Mersenne twister and cuts the result
// into `folds` contiguous blocks whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed);

struct GridSearchResult {
  ParamSet best_params;
  std::size_t best_index = 0;
  std::vector<ParamSet> candidates;
  std::vector<double> cv_scores;                 // mean over folds, per candidate
  std::vector<std::vector<double>> fold_scores;  // [candidate][fold]
  std::size_t folds = 5;
};

// Scores one candidate on one fold: (params, train indices, held-out indices).
using FoldScorer = std::function<double(const ParamSet&, std::span<const std::size_t>,
                                        std::span<const std::size_t>)>;

// Higher scores win; ties go to the earliest candidate.
GridSearchResult grid_search_cv(const ParamGrid& grid, std::size_t n, std::size_t folds,
                                std::uint64_t seed, const FoldScorer& scorer, unsigned jobs = 1);

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  double lasso_tol = 1e-6;
  std::size_t lasso_max_sweeps = 10000;
  double smo_tol = 1e-3;
  std::size_t smo_max_iterations = 10'000'000;
};

// Regression learners (Lasso with interactions, SVR) scored by held-out Pearson
// of clamped predictions; an undefined correlation scores 0.
GridSearchResult grid_search_regression(LearnerKind learner, const ParamGrid& grid,
                                        const Matrix& x, std::span<const double> y,
                                        const CvOptions& opts);

// Multiclass SVM scored by held-out accuracy.
GridSearchResult grid_search_classification(const ParamGrid& grid, const Matrix& x,
                                            std::span<const EntailmentClass> labels,
                                            const CvOptions& opts);

// Clamp to the similarity scale [1, 5].
double clamp_similarity(double raw);

}  // namespace assin
