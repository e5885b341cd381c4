#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "assin/corpus.hpp"
#include "assin/matrix.hpp"

namespace assin {

// exp(-gamma * ||a - b||^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

enum class KernelKind { Svr, SvmBinary };

/// Gaussian-kernel expansion f(x) = sum_i coef_i k(sv_i, x) + bias.
///
/// For SVR coef_i = alpha_i - alpha*_i; for binary SVM coef_i = y_i alpha_i
/// with y = +1 for the first class of the pair.
struct KernelModel {
  KernelKind kind = KernelKind::Svr;
  Matrix support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  double epsilon = 0.0;

  double decision(std::span<const double> x) const;

  bool operator==(const KernelModel&) const = default;
};

struct SmoOptions {
  double C = 1.0;
  double gamma = 1.0;
  double epsilon = 0.1;  // SVR only
  double tol = 1e-3;     // stop when the maximal KKT violation falls below this
  std::size_t max_iterations = 10'000'000;
  std::size_t cache_bytes = 128u << 20;
};

struct SmoReport {
  std::size_t iterations = 0;
  double max_violation = 0.0;
  double dual_objective = 0.0;
  // Per training sample: SVR alpha_i - alpha*_i, SVM y_i alpha_i.
  std::vector<double> coefficients;
};

KernelModel svr_fit(const Matrix& x, std::span<const double> y, const SmoOptions& opts,
                    SmoReport* report = nullptr);

// labels[i] is +1 or -1.
KernelModel svm_fit_binary(const Matrix& x, std::span<const int> labels, const SmoOptions& opts,
                           SmoReport* report = nullptr);

/// One-vs-one machines over the three entailment classes.
struct MulticlassSvm {
  struct Machine {
    EntailmentClass positive;
    EntailmentClass negative;
    KernelModel model;

    bool operator==(const Machine&) const = default;
  };

  std::vector<EntailmentClass> classes;  // canonical order
  std::vector<Machine> machines;

  // Majority vote; a zero decision abstains. Ties go to the larger summed
  // signed margin, then to the earlier class.
  EntailmentClass predict(std::span<const double> x) const;

  bool operator==(const MulticlassSvm&) const = default;
};

// Requires at least two distinct classes. A pair with one class missing
// becomes a constant vote for the present class; the fact is appended to
// `warnings` (or written to std::clog when null).
MulticlassSvm svm_fit_multiclass(const Matrix& x, std::span<const EntailmentClass> labels,
                                 const SmoOptions& opts,
                                 std::vector<std::string>* warnings = nullptr);

}  // namespace assin
