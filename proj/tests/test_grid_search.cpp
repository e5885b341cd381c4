#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "assin/grid_search.hpp"
#include "expect_error.hpp"

using namespace assin;

TEST(ParamGrid, CartesianOrderLastAxisFastest) {
  ParamGrid g;
  g.set("a", {1, 2});
  g.set("b", {10, 20, 30});
  const auto c = g.candidates();
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(g.size(), 6u);
  EXPECT_EQ(c[0].at("a"), 1);
  EXPECT_EQ(c[0].at("b"), 10);
  EXPECT_EQ(c[1].at("b"), 20);
  EXPECT_EQ(c[3].at("a"), 2);
  g.set("a", {5});
  EXPECT_EQ(g.size(), 3u);
}

TEST(ParamGrid, Defaults) {
  EXPECT_EQ(default_grid(LearnerKind::Svr).size(), 48u);
  EXPECT_EQ(default_grid(LearnerKind::Svm).size(), 16u);
  EXPECT_EQ(default_grid(LearnerKind::Lasso).size(), 0u);
  EXPECT_EQ(parse_learner("svr"), LearnerKind::Svr);
  expect_category(ErrorCategory::Usage, [] { parse_learner("forest"); });
}

TEST(Folds, PartitionSizesAndDeterminism) {
  for (std::size_t n : {5u, 17u, 100u, 803u}) {
    const auto f = make_folds(n, 5, 42);
    ASSERT_EQ(f.size(), 5u);
    std::set<std::size_t> all;
    std::size_t lo = n, hi = 0;
    for (const auto& part : f) {
      all.insert(part.begin(), part.end());
      lo = std::min(lo, part.size());
      hi = std::max(hi, part.size());
    }
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(*all.rbegin(), n - 1);
    EXPECT_LE(hi - lo, 1u);
    EXPECT_EQ(make_folds(n, 5, 42), f);
  }
  EXPECT_NE(make_folds(100, 5, 1), make_folds(100, 5, 2));
  expect_category(ErrorCategory::Data, [] { make_folds(3, 5, 1); });
  expect_category(ErrorCategory::Usage, [] { make_folds(10, 1, 1); });
}

TEST(GridSearch, PicksBestAndBreaksTiesEarly) {
  ParamGrid g;
  g.set("v", {1, 3, 3, 2});
  auto scorer = [](const ParamSet& p, std::span<const std::size_t> tr,
                   std::span<const std::size_t> te) {
    EXPECT_EQ(tr.size() + te.size(), 20u);
    return p.at("v");
  };
  for (unsigned jobs : {1u, 3u}) {
    const auto r = grid_search_cv(g, 20, 5, 9, scorer, jobs);
    EXPECT_EQ(r.best_index, 1u);
    EXPECT_EQ(r.best_params.at("v"), 3);
    EXPECT_EQ(r.cv_scores, (std::vector<double>{1, 3, 3, 2}));
  }
}

TEST(GridSearch, TrainAndTestAreDisjoint) {
  ParamGrid g;
  g.set("x", {0});
  grid_search_cv(g, 23, 5, 3, [](const ParamSet&, std::span<const std::size_t> tr,
                                 std::span<const std::size_t> te) {
    std::set<std::size_t> a(tr.begin(), tr.end());
    for (auto i : te) EXPECT_FALSE(a.contains(i));
    EXPECT_EQ(a.size() + te.size(), 23u);
    return 0.0;
  });
}

TEST(GridSearch, ScorerErrorsPropagate) {
  ParamGrid g;
  g.set("x", {0, 1});
  expect_category(ErrorCategory::Value, [&] {
    grid_search_cv(g, 10, 2, 1, [](const ParamSet& p, auto, auto) -> double {
      if (p.at("x") == 1) throw value_error("boom");
      return 0.0;
    });
  }, "boom");
  expect_category(ErrorCategory::Usage, [] {
    grid_search_cv(ParamGrid{}, 10, 2, 1, [](const ParamSet&, auto, auto) { return 0.0; });
  });
}

TEST(GridSearch, RegressionSelectsAUsefulSvr) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Matrix x(80, 2);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    x(i, 0) = g(rng);
    x(i, 1) = g(rng);
    y[i] = clamp_similarity(3 + x(i, 0) + 0.1 * g(rng));
  }
  ParamGrid grid;
  grid.set("C", {0.1, 10});
  grid.set("gamma", {0.1});
  grid.set("epsilon", {0.1});
  const CvOptions opts;
  const auto r = grid_search_regression(LearnerKind::Svr, grid, x, y, opts);
  EXPECT_EQ(r.best_params.at("C"), 10);
  EXPECT_GT(r.cv_scores[r.best_index], 0.9);
  EXPECT_EQ(grid_search_regression(LearnerKind::Svr, grid, x, y, opts).cv_scores, r.cv_scores);
}

TEST(GridSearch, LassoAndClassification) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Matrix x(60, 3);
  std::vector<double> y(60);
  std::vector<EntailmentClass> labels(60);
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = g(rng);
    y[i] = 3 + x(i, 0) * x(i, 1) + 0.1 * g(rng);
    labels[i] = x(i, 2) > 0.5 ? EntailmentClass::Paraphrase
                : x(i, 2) < -0.5 ? EntailmentClass::None
                                 : EntailmentClass::Entailment;
  }
  ParamGrid lg;
  lg.set("lambda", lasso_lambda_grid(lasso_lambda_max(x, y, true), 5));
  const auto lr = grid_search_regression(LearnerKind::Lasso, lg, x, y, CvOptions{});
  EXPECT_GT(lr.cv_scores[lr.best_index], 0.8);
  ParamGrid huge;
  huge.set("lambda", {1e6});
  // constant predictions score zero
  EXPECT_EQ(grid_search_regression(LearnerKind::Lasso, huge, x, y, CvOptions{}).cv_scores[0], 0.0);

  ParamGrid sg;
  sg.set("C", {10});
  sg.set("gamma", {0.5});
  const auto sr = grid_search_classification(sg, x, labels, CvOptions{});
  EXPECT_GT(sr.cv_scores[0], 0.7);
  expect_category(ErrorCategory::Usage,
                  [&] { grid_search_regression(LearnerKind::Svm, sg, x, y, CvOptions{}); });
}

TEST(Clamp, SimilarityScale) {
  EXPECT_EQ(clamp_similarity(0.3), 1.0);
  EXPECT_EQ(clamp_similarity(7), 5.0);
  EXPECT_EQ(clamp_similarity(2.5), 2.5);
}
