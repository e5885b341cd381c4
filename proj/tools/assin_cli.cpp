#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "assin/error.hpp"
#include "assin/pipeline.hpp"

namespace {

using assin::RunConfig;

struct Flags {
  RunConfig cfg;
  std::string task, learner, idf_from = "train";
  std::vector<std::string> grid;
};

void add_embeddings(CLI::App* sub, Flags& f) {
  sub->add_option("--embeddings", f.cfg.embeddings, "word2vec file (binary or text)");
}
void add_train(CLI::App* sub, Flags& f) {
  sub->add_option("--train", f.cfg.train, "ASSIN XML training file (repeatable)");
}
void add_test(CLI::App* sub, Flags& f) {
  sub->add_option("--test", f.cfg.test, "ASSIN XML file");
}
void add_out(CLI::App* sub, Flags& f) {
  sub->add_option("--out", f.cfg.out, "output file");
}
void add_idf(CLI::App* sub, Flags& f) {
  sub->add_option("--idf-from", f.idf_from, "where IDF statistics come from")
      ->check(CLI::IsMember({"train", "file"}));
  sub->add_option("--idf", f.cfg.idf_path, "IDF file written by build-idf");
}
void add_jobs(CLI::App* sub, Flags& f) {
  sub->add_option("--jobs", f.cfg.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
}

RunConfig finish(Flags& f) {
  RunConfig cfg = f.cfg;
  if (!f.task.empty()) cfg.task = assin::parse_task(f.task);
  if (!f.learner.empty()) cfg.learner = assin::parse_learner(f.learner);
  cfg.idf_from = f.idf_from == "file" ? assin::IdfSource::File : assin::IdfSource::Train;
  for (const auto& g : f.grid) cfg.grid_overrides.push_back(assin::parse_grid_override(g));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic similarity and entailment for ASSIN sentence pairs"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);
  Flags f;

  auto* extract = app.add_subcommand("extract", "write the 15 pair features as CSV");
  add_embeddings(extract, f);
  add_test(extract, f);
  add_train(extract, f);
  add_idf(extract, f);
  add_out(extract, f);
  add_jobs(extract, f);

  auto* train = app.add_subcommand("train", "cross-validate a learner and save the model");
  add_embeddings(train, f);
  add_train(train, f);
  train->add_option("--task", f.task, "similarity or entailment");
  train->add_option("--learner", f.learner, "lasso, svr or svm");
  train->add_option("--seed", f.cfg.seed, "cross-validation seed");
  train->add_option("--grid", f.grid, "hyperparameter axis, e.g. C=0.1,1,10 (repeatable)");
  train->add_option("--cv-report", f.cfg.cv_report, "write per-candidate scores as JSON");
  add_idf(train, f);
  add_out(train, f);
  add_jobs(train, f);

  auto* predict = app.add_subcommand("predict", "apply a saved model");
  predict->add_option("--model", f.cfg.model, "model file written by train");
  add_embeddings(predict, f);
  add_test(predict, f);
  add_out(predict, f);
  add_jobs(predict, f);

  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold labels");
  evaluate->add_option("--predictions", f.cfg.predictions, "CSV written by predict");
  add_test(evaluate, f);
  evaluate->add_option("--out", f.cfg.out, "also write the JSON report here");

  auto* build_idf = app.add_subcommand("build-idf", "count document frequencies");
  add_train(build_idf, f);
  add_out(build_idf, f);

  auto* inspect = app.add_subcommand("inspect-embeddings", "summarize an embedding file");
  add_embeddings(inspect, f);
  inspect->add_option("tokens", f.cfg.tokens, "tokens to look up");

  auto* baseline = app.add_subcommand("baseline", "bag-of-words cosine with an affine fit");
  add_train(baseline, f);
  add_test(baseline, f);
  add_out(baseline, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    const RunConfig cfg = finish(f);
    std::string summary;
    if (*extract) summary = assin::cmd_extract(cfg);
    else if (*train) summary = assin::cmd_train(cfg);
    else if (*predict) summary = assin::cmd_predict(cfg);
    else if (*evaluate) summary = assin::cmd_evaluate(cfg);
    else if (*build_idf) summary = assin::cmd_build_idf(cfg);
    else if (*inspect) summary = assin::cmd_inspect_embeddings(cfg);
    else if (*baseline) summary = assin::cmd_baseline(cfg);
    std::cout << summary;
    return 0;
  } catch (const assin::Error& e) {
    std::cerr << "error[" << assin::category_name(e.category()) << "]: " << e.what() << "\n";
    return e.category() == assin::ErrorCategory::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}
