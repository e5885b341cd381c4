#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assin/corpus.hpp"

namespace assin {

// Sample Pearson correlation. Throws when lengths differ, fewer than two
// values are given, or either vector is constant.
double pearson(std::span<const double> pred, std::span<const double> gold);

double mse(std::span<const double> pred, std::span<const double> gold);

double accuracy(std::span<const EntailmentClass> pred, std::span<const EntailmentClass> gold);

struct F1Scores {
  std::array<double, 3> per_class{};  // None, Entailment, Paraphrase
  double macro = 0.0;
};

// Per-class F1 with 0 for empty denominators; macro is the plain mean.
F1Scores f1(std::span<const EntailmentClass> pred, std::span<const EntailmentClass> gold);

struct EvalReport {
  std::optional<double> pearson;
  std::optional<double> mse;
  std::optional<double> accuracy;  // fraction in [0, 1]
  std::optional<F1Scores> f1;
  std::size_t n = 0;
};

// Either task may be absent (empty spans).
EvalReport evaluate(std::span<const double> sim_pred, std::span<const double> sim_gold,
                    std::span<const EntailmentClass> ent_pred,
                    std::span<const EntailmentClass> ent_gold);

// Flat JSON object: pearson, mse, accuracy_pct, f1_none, f1_entailment,
// f1_paraphrase, f1_macro, n. Missing metrics are null.
std::string serialize_report(const EvalReport& r);

// Cosine of term-frequency vectors of the tokenized sentences, per pair.
std::vector<double> bow_baseline_similarity(const Dataset& ds);

struct AffineMap {
  double slope = 1.0;
  double intercept = 0.0;
  double operator()(double x) const { return slope * x + intercept; }
};

// Least-squares fit gold ~ slope * x + intercept.
AffineMap fit_affine(std::span<const double> x, std::span<const double> gold);

}  // namespace assin
