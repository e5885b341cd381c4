#include "assin/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "assin/error.hpp"
#include "assin/features.hpp"
#include "assin/io_util.hpp"
#include "assin/metrics.hpp"

namespace assin {

namespace {

double parse_number(std::string_view s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw value_error(context + ": '" + std::string(s) + "' is not a finite number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

void require(const std::filesystem::path& p, const char* flag) {
  if (p.empty()) throw usage_error(std::string("missing required option ") + flag);
}

std::vector<Dataset> load_train(const RunConfig& cfg) {
  if (cfg.train.empty()) throw usage_error("missing required option --train");
  std::vector<Dataset> out;
  for (const auto& p : cfg.train) out.push_back(parse_assin_xml(p));
  return out;
}

IdfModel resolve_idf(const RunConfig& cfg, const std::vector<Dataset>& train) {
  if (cfg.idf_from == IdfSource::File) {
    require(cfg.idf_path, "--idf");
    return parse_idf(read_file(cfg.idf_path));
  }
  return build_idf(std::span<const Dataset>(train));
}

Matrix feature_matrix(std::span<const PairFeatures> feats) {
  Matrix x(feats.size(), kFeatureCount);
  for (std::size_t i = 0; i < feats.size(); ++i) {
    std::copy(feats[i].values.begin(), feats[i].values.end(), x.row(i).begin());
  }
  return x;
}

std::string grid_summary(const GridSearchResult& r) {
  std::ostringstream ss;
  ss << "cross-validation: " << r.candidates.size() << " candidates, " << r.folds << " folds\n";
  ss << "best candidate #" << r.best_index << ":";
  for (const auto& [k, v] : r.best_params) ss << ' ' << k << '=' << format_double(v);
  ss << " (mean score " << format_double(r.cv_scores[r.best_index]) << ")\n";
  return ss.str();
}

nlohmann::ordered_json cv_report_json(const GridSearchResult& r) {
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.candidates.size(); ++c) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.candidates[c]) params[k] = v;
    cands.push_back({{"params", std::move(params)},
                     {"mean_score", r.cv_scores[c]},
                     {"fold_scores", r.fold_scores[c]}});
  }
  return {{"folds", r.folds}, {"best_index", r.best_index}, {"candidates", std::move(cands)}};
}

}  // namespace

std::pair<std::string, std::vector<double>> parse_grid_override(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
    throw usage_error("grid override '" + std::string(spec) + "' is not of the form key=v1,v2");
  }
  std::pair<std::string, std::vector<double>> out{std::string(spec.substr(0, eq)), {}};
  for (auto part : split(spec.substr(eq + 1), ',')) {
    // Allow fractions such as 1/15 for gamma.
    if (const auto slash = part.find('/'); slash != std::string_view::npos) {
      const double num = parse_number(part.substr(0, slash), "grid value");
      const double den = parse_number(part.substr(slash + 1), "grid value");
      out.second.push_back(num / den);
    } else {
      out.second.push_back(parse_number(part, "grid value"));
    }
  }
  return out;
}

TrainedModel train_model(const std::vector<Dataset>& train, const EmbeddingTable& emb,
                         const IdfModel& idf, Task task, LearnerKind learner,
                         const ParamGrid& grid_overrides, std::uint64_t seed, unsigned jobs) {
  check_compatible(task, learner);
  std::vector<PairFeatures> feats;
  std::vector<double> sim;
  std::vector<EntailmentClass> ent;
  for (const auto& ds : train) {
    for (const auto& p : ds.pairs) {
      if (task == Task::Similarity && !p.similarity) {
        throw data_error("pair '" + p.id + "' in " + ds.variant_tag + " has no similarity label");
      }
      if (task == Task::Entailment && !p.entailment) {
        throw data_error("pair '" + p.id + "' in " + ds.variant_tag + " has no entailment label");
      }
    }
    auto f = extract_all(ds, emb, idf, jobs);
    feats.insert(feats.end(), f.begin(), f.end());
    for (const auto& p : ds.pairs) {
      if (task == Task::Similarity) sim.push_back(*p.similarity); else ent.push_back(*p.entailment);
    }
  }
  const Matrix x = feature_matrix(feats);

  ParamGrid grid = default_grid(learner);
  if (learner == LearnerKind::Lasso) {
    grid.set("lambda", lasso_lambda_grid(lasso_lambda_max(x, sim, true)));
  }
  for (const auto& [k, v] : grid_overrides.axes) grid.set(k, v);

  CvOptions cv;
  cv.seed = seed;
  cv.jobs = jobs;

  TrainedModel m;
  m.task = task;
  m.learner = learner;
  m.embedding_dim = emb.dim();
  m.idf = idf;
  m.seed = seed;

  if (learner == LearnerKind::Svm) {
    m.cv = grid_search_classification(grid, x, ent, cv);
  } else {
    m.cv = grid_search_regression(learner, grid, x, sim, cv);
  }
  m.hyperparameters = m.cv->best_params;
  const auto& hp = m.hyperparameters;

  switch (learner) {
    case LearnerKind::Lasso: {
      LassoOptions lo{hp.at("lambda"), cv.lasso_tol, cv.lasso_max_sweeps};
      m.model = lasso_fit_interactions(x, sim, lo);
      break;
    }
    case LearnerKind::Svr: {
      SmoOptions so;
      so.C = hp.at("C");
      so.gamma = hp.at("gamma");
      so.epsilon = hp.at("epsilon");
      so.tol = cv.smo_tol;
      m.model = svr_fit(x, sim, so);
      break;
    }
    case LearnerKind::Svm: {
      SmoOptions so;
      so.C = hp.at("C");
      so.gamma = hp.at("gamma");
      so.tol = cv.smo_tol;
      m.model = svm_fit_multiclass(x, ent, so);
      break;
    }
  }
  return m;
}

std::vector<Prediction> predict_dataset(const TrainedModel& model, const Dataset& ds,
                                        const EmbeddingTable& emb, unsigned jobs) {
  if (emb.dim() != model.embedding_dim) {
    throw dimension_error("model was trained with " + std::to_string(model.embedding_dim) +
                          "-dimensional embeddings, got " + std::to_string(emb.dim()));
  }
  if (model.feature_dim != kFeatureCount) {
    throw dimension_error("model expects " + std::to_string(model.feature_dim) +
                          " features; this build extracts " + std::to_string(kFeatureCount));
  }
  const auto feats = extract_all(ds, emb, model.idf, jobs);
  std::vector<Prediction> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Prediction p{ds.pairs[i].id, {}, {}};
    if (model.task == Task::Similarity) {
      p.similarity = model.predict_similarity(feats[i].values);
    } else {
      p.entailment = model.predict_entailment(feats[i].values);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_predictions(std::span<const Prediction> preds) {
  const bool sim = !preds.empty() && preds.front().similarity.has_value();
  const bool ent = !preds.empty() && preds.front().entailment.has_value();
  std::string out = "id";
  if (sim || preds.empty()) out += ",similarity";
  if (ent) out += ",entailment";
  out += '\n';
  for (const auto& p : preds) {
    out += p.id;
    if (sim || preds.empty()) {
      out += ',';
      if (p.similarity) out += format_fixed(*p.similarity, 4);
    }
    if (ent) {
      out += ',';
      if (p.entailment) out += to_string(*p.entailment);
    }
    out += '\n';
  }
  return out;
}

std::vector<Prediction> parse_predictions(std::string_view csv) {
  std::vector<std::string_view> lines = split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw parse_error("predictions file is empty");
  auto strip_cr = [](std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  };
  const auto header = split(strip_cr(lines[0]), ',');
  if (header.empty() || header[0] != "id") {
    throw parse_error("predictions line 1: header must start with 'id'");
  }
  int sim_col = -1, ent_col = -1;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "similarity") sim_col = static_cast<int>(c);
    else if (header[c] == "entailment") ent_col = static_cast<int>(c);
    else throw parse_error("predictions line 1: unknown column '" + std::string(header[c]) + "'");
  }
  std::vector<Prediction> out;
  std::unordered_set<std::string> seen;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto fields = split(strip_cr(lines[ln]), ',');
    const std::string where = "predictions line " + std::to_string(ln + 1);
    if (fields.size() != header.size()) {
      throw parse_error(where + ": expected " + std::to_string(header.size()) + " fields");
    }
    Prediction p{std::string(fields[0]), {}, {}};
    if (!seen.insert(p.id).second) throw structure_error(where + ": duplicate id '" + p.id + "'");
    if (sim_col >= 0 && !fields[static_cast<std::size_t>(sim_col)].empty()) {
      p.similarity = parse_number(fields[static_cast<std::size_t>(sim_col)], where);
    }
    if (ent_col >= 0 && !fields[static_cast<std::size_t>(ent_col)].empty()) {
      p.entailment = parse_entailment_class(fields[static_cast<std::size_t>(ent_col)]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport evaluate_predictions(std::span<const Prediction> preds, const Dataset& gold) {
  std::unordered_map<std::string_view, const Prediction*> by_id;
  for (const auto& p : preds) by_id.emplace(p.id, &p);
  std::unordered_set<std::string_view> gold_ids;
  std::vector<double> sp, sg;
  std::vector<EntailmentClass> ep, eg;
  for (const auto& g : gold.pairs) {
    gold_ids.insert(g.id);
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw data_error("no prediction for pair id '" + g.id + "'");
    const Prediction& p = *it->second;
    if (p.similarity) {
      if (!g.similarity) throw data_error("gold pair '" + g.id + "' has no similarity label");
      sp.push_back(*p.similarity);
      sg.push_back(*g.similarity);
    }
    if (p.entailment) {
      if (!g.entailment) throw data_error("gold pair '" + g.id + "' has no entailment label");
      ep.push_back(*p.entailment);
      eg.push_back(*g.entailment);
    }
  }
  for (const auto& p : preds) {
    if (!gold_ids.contains(p.id)) throw data_error("prediction id '" + p.id + "' is not in the gold file");
  }
  if (sp.empty() && ep.empty()) throw data_error("predictions carry no similarity or entailment values");
  return evaluate(sp, sg, ep, eg);
}

// ---------------------------------------------------------------------------

std::string cmd_build_idf(const RunConfig& cfg) {
  require(cfg.out, "--out");
  const auto train = load_train(cfg);
  const IdfModel idf = build_idf(std::span<const Dataset>(train));
  write_file_atomic(cfg.out, serialize_idf(idf));
  return "wrote IDF over " + std::to_string(idf.doc_count()) + " sentences (" +
         std::to_string(idf.doc_freqs().size()) + " terms) to " + cfg.out.string() + "\n";
}

std::string cmd_extract(const RunConfig& cfg) {
  require(cfg.embeddings, "--embeddings");
  require(cfg.test, "--test");
  require(cfg.out, "--out");
  const Dataset ds = parse_assin_xml(cfg.test);
  std::vector<Dataset> idf_source;
  if (cfg.idf_from == IdfSource::Train) {
    if (cfg.train.empty()) idf_source.push_back(ds); else idf_source = load_train(cfg);
  }
  const IdfModel idf = resolve_idf(cfg, idf_source);
  const EmbeddingTable emb = load_word2vec(cfg.embeddings);
  const auto feats = extract_all(ds, emb, idf, cfg.jobs);
  write_file_atomic(cfg.out, feature_dump_csv(ds, feats));
  return "wrote " + std::to_string(feats.size()) + " feature rows to " + cfg.out.string() + "\n";
}

std::string cmd_train(const RunConfig& cfg) {
  require(cfg.embeddings, "--embeddings");
  require(cfg.out, "--out");
  if (!cfg.task) throw usage_error("missing required option --task");
  if (!cfg.learner) throw usage_error("missing required option --learner");
  check_compatible(*cfg.task, *cfg.learner);
  const auto train = load_train(cfg);
  const IdfModel idf = resolve_idf(cfg, train);
  const EmbeddingTable emb = load_word2vec(cfg.embeddings);
  ParamGrid overrides;
  for (const auto& [k, v] : cfg.grid_overrides) overrides.set(k, v);
  const TrainedModel m =
      train_model(train, emb, idf, *cfg.task, *cfg.learner, overrides, cfg.seed, cfg.jobs);
  write_file_atomic(cfg.out, serialize_model(m));
  if (!cfg.cv_report.empty()) write_file_atomic(cfg.cv_report, cv_report_json(*m.cv).dump(1) + "\n");
  return grid_summary(*m.cv) + "wrote model to " + cfg.out.string() + "\n";
}

std::string cmd_predict(const RunConfig& cfg) {
  require(cfg.model, "--model");
  require(cfg.embeddings, "--embeddings");
  require(cfg.test, "--test");
  require(cfg.out, "--out");
  const TrainedModel m = parse_model(read_file(cfg.model));
  const Dataset ds = parse_assin_xml(cfg.test);
  const EmbeddingTable emb = load_word2vec(cfg.embeddings);
  const auto preds = predict_dataset(m, ds, emb, cfg.jobs);
  write_file_atomic(cfg.out, serialize_predictions(preds));
  return "wrote " + std::to_string(preds.size()) + " predictions to " + cfg.out.string() + "\n";
}

std::string cmd_evaluate(const RunConfig& cfg) {
  require(cfg.predictions, "--predictions");
  require(cfg.test, "--test");
  const auto preds = parse_predictions(read_file(cfg.predictions));
  const Dataset gold = parse_assin_xml(cfg.test);
  const std::string report = serialize_report(evaluate_predictions(preds, gold));
  if (!cfg.out.empty()) write_file_atomic(cfg.out, report);
  return report;
}

std::string cmd_baseline(const RunConfig& cfg) {
  require(cfg.test, "--test");
  require(cfg.out, "--out");
  const auto train = load_train(cfg);
  std::vector<double> x, gold;
  for (const auto& ds : train) {
    const auto s = bow_baseline_similarity(ds);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!ds.pairs[i].similarity) {
        throw data_error("pair '" + ds.pairs[i].id + "' in " + ds.variant_tag +
                         " has no similarity label");
      }
      x.push_back(s[i]);
      gold.push_back(*ds.pairs[i].similarity);
    }
  }
  const AffineMap map = fit_affine(x, gold);
  const Dataset test = parse_assin_xml(cfg.test);
  const auto s = bow_baseline_similarity(test);
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < test.size(); ++i) {
    preds.push_back({test.pairs[i].id, clamp_similarity(map(s[i])), {}});
  }
  write_file_atomic(cfg.out, serialize_predictions(preds));
  return "wrote " + std::to_string(preds.size()) + " baseline predictions to " +
         cfg.out.string() + "\n";
}

std::string cmd_inspect_embeddings(const RunConfig& cfg) {
  require(cfg.embeddings, "--embeddings");
  const EmbeddingTable emb = load_word2vec(cfg.embeddings);
  std::ostringstream ss;
  ss << "count " << emb.count() << "\ndim " << emb.dim() << "\n";
  for (const auto& t : cfg.tokens) {
    ss << t << ": ";
    if (auto v = emb.lookup(t)) {
      double norm = 0.0;
      for (float c : *v) norm += static_cast<double>(c) * c;
      ss << "present, norm " << format_double(std::sqrt(norm)) << "\n";
    } else {
      ss << "absent\n";
    }
  }
  return ss.str();
}

}  // namespace assin
