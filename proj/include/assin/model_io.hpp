#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "assin/corpus.hpp"
#include "assin/features.hpp"
#include "assin/grid_search.hpp"
#include "assin/kernel.hpp"
#include "assin/lasso.hpp"

namespace assin {

enum class Task { Similarity, Entailment };

std::string_view to_string(Task t) noexcept;
Task parse_task(std::string_view s);

// Lasso and SVR predict similarity; SVM predicts entailment.
void check_compatible(Task task, LearnerKind learner);

inline constexpr int kModelFormatVersion = 1;

/// Everything needed to turn a sentence pair into a prediction: the fitted
/// learner plus the IDF table used by the feature extractor.
struct TrainedModel {
  Task task = Task::Similarity;
  LearnerKind learner = LearnerKind::Svr;
  std::size_t feature_dim = kFeatureCount;
  std::size_t embedding_dim = 0;
  IdfModel idf;
  ParamSet hyperparameters;
  std::optional<GridSearchResult> cv;
  std::uint64_t seed = 42;
  std::variant<std::monostate, LassoModel, KernelModel, MulticlassSvm> model;

  // Clamped to [1, 5].
  double predict_similarity(std::span<const double> features) const;
  EntailmentClass predict_entailment(std::span<const double> features) const;
};

std::string serialize_model(const TrainedModel& m);
TrainedModel parse_model(std::string_view text);

}  // namespace assin
