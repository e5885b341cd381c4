#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "assin/grid_search.hpp"
#include "assin/metrics.hpp"
#include "assin/model_io.hpp"

namespace assin {

enum class IdfSource { Train, File };

/// Options shared by the command-line subcommands. Each command reads only
/// the fields it needs.
struct RunConfig {
  std::filesystem::path embeddings;
  std::vector<std::filesystem::path> train;
  std::filesystem::path test;
  std::optional<Task> task;
  std::optional<LearnerKind> learner;
  std::vector<std::pair<std::string, std::vector<double>>> grid_overrides;
  std::uint64_t seed = 42;
  std::filesystem::path out;
  std::filesystem::path model;
  std::filesystem::path predictions;
  std::filesystem::path cv_report;
  IdfSource idf_from = IdfSource::Train;
  std::filesystem::path idf_path;
  std::vector<std::string> tokens;  // inspect-embeddings lookups
  unsigned jobs = 1;
};

// "C=0.1,1,10" -> ("C", {0.1, 1, 10})
std::pair<std::string, std::vector<double>> parse_grid_override(std::string_view spec);

// Each command writes its output file atomically and returns a short
// human-readable summary.
std::string cmd_build_idf(const RunConfig& cfg);
std::string cmd_extract(const RunConfig& cfg);
std::string cmd_train(const RunConfig& cfg);
std::string cmd_predict(const RunConfig& cfg);
std::string cmd_evaluate(const RunConfig& cfg);
std::string cmd_baseline(const RunConfig& cfg);
std::string cmd_inspect_embeddings(const RunConfig& cfg);

// In-memory pieces of the commands, exposed for tests.
TrainedModel train_model(const std::vector<Dataset>& train, const EmbeddingTable& emb,
                         const IdfModel& idf, Task task, LearnerKind learner,
                         const ParamGrid& grid_overrides, std::uint64_t seed, unsigned jobs = 1);

struct Prediction {
  std::string id;
  std::optional<double> similarity;
  std::optional<EntailmentClass> entailment;
};

std::vector<Prediction> predict_dataset(const TrainedModel& model, const Dataset& ds,
                                        const EmbeddingTable& emb, unsigned jobs = 1);
std::string serialize_predictions(std::span<const Prediction> preds);
std::vector<Prediction> parse_predictions(std::string_view csv);

// Joins predictions to gold labels by pair id.
EvalReport evaluate_predictions(std::span<const Prediction> preds, const Dataset& gold);

}  // namespace assin
