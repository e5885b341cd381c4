#include "assin/model_io.hpp"

#include <json.hpp>

#include "assin/error.hpp"

namespace assin {

using nlohmann::ordered_json;

std::string_view to_string(Task t) noexcept {
  return t == Task::Similarity ? "similarity" : "entailment";
}

Task parse_task(std::string_view s) {
  if (s == "similarity") return Task::Similarity;
  if (s == "entailment") return Task::Entailment;
  throw usage_error("unknown task '" + std::string(s) + "' (expected similarity or entailment)");
}

void check_compatible(Task task, LearnerKind learner) {
  const bool ok = task == Task::Similarity ? learner != LearnerKind::Svm
                                           : learner == LearnerKind::Svm;
  if (!ok) {
    throw usage_error("learner '" + std::string(to_string(learner)) +
                      "' cannot be used for the " + std::string(to_string(task)) + " task");
  }
}

double TrainedModel::predict_similarity(std::span<const double> features) const {
  if (features.size() != feature_dim) {
    throw dimension_error("model expects " + std::to_string(feature_dim) + " features, got " +
                          std::to_string(features.size()));
  }
  if (const auto* l = std::get_if<LassoModel>(&model)) {
    return clamp_similarity(lasso_predict(*l, features));
  }
  if (const auto* k = std::get_if<KernelModel>(&model); k && k->kind == KernelKind::Svr) {
    return clamp_similarity(k->decision(features));
  }
  throw usage_error("model has no trained similarity learner");
}

EntailmentClass TrainedModel::predict_entailment(std::span<const double> features) const {
  if (features.size() != feature_dim) {
    throw dimension_error("model expects " + std::to_string(feature_dim) + " features, got " +
                          std::to_string(features.size()));
  }
  if (const auto* s = std::get_if<MulticlassSvm>(&model)) return s->predict(features);
  throw usage_error("model has no trained entailment learner");
}

// ---------------------------------------------------------------------------

namespace {

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"cols", m.cols()}, {"rows", std::move(rows)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(0, j.at("cols").get<std::size_t>());
  for (const auto& r : j.at("rows")) m.append_row(r.get<std::vector<double>>());
  return m;
}

ordered_json params_to_json(const ParamSet& p) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

ParamSet params_from_json(const nlohmann::json& j) {
  ParamSet p;
  for (const auto& [k, v] : j.items()) p[k] = v.get<double>();
  return p;
}

ordered_json kernel_to_json(const KernelModel& k) {
  return {{"kind", k.kind == KernelKind::Svr ? "svr" : "svm-binary"},
          {"gamma", k.gamma},
          {"C", k.C},
          {"epsilon", k.epsilon},
          {"bias", k.bias},
          {"dual_coefs", k.dual_coefs},
          {"support_vectors", matrix_to_json(k.support_vectors)}};
}

KernelModel kernel_from_json(const nlohmann::json& j) {
  KernelModel k;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "svr") k.kind = KernelKind::Svr;
  else if (kind == "svm-binary") k.kind = KernelKind::SvmBinary;
  else throw structure_error("unknown kernel model kind '" + kind + "'");
  k.gamma = j.at("gamma").get<double>();
  k.C = j.at("C").get<double>();
  k.epsilon = j.at("epsilon").get<double>();
  k.bias = j.at("bias").get<double>();
  k.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
  k.support_vectors = matrix_from_json(j.at("support_vectors"));
  if (k.support_vectors.rows() != k.dual_coefs.size()) {
    throw structure_error("support vector count differs from coefficient count");
  }
  return k;
}

ordered_json lasso_to_json(const LassoModel& l) {
  return {{"objective",
           "(1/2n)||y - b0 - Z theta||^2 + lambda ||theta||_1 on standardized columns Z; "
           "Lagrangian form of least squares subject to ||theta||_1 <= C, with C decreasing "
           "monotonically in lambda"},
          {"lambda", l.lambda},
          {"intercept", l.intercept},
          {"base_dim", l.base_dim},
          {"interactions", l.interactions},
          {"column_means", l.column_means},
          {"column_scales", l.column_scales},
          {"weights", l.weights}};
}

LassoModel lasso_from_json(const nlohmann::json& j) {
  LassoModel l;
  l.lambda = j.at("lambda").get<double>();
  l.intercept = j.at("intercept").get<double>();
  l.base_dim = j.at("base_dim").get<std::size_t>();
  l.interactions = j.at("interactions").get<bool>();
  l.column_means = j.at("column_means").get<std::vector<double>>();
  l.column_scales = j.at("column_scales").get<std::vector<double>>();
  l.weights = j.at("weights").get<std::vector<double>>();
  const std::size_t width = l.interactions ? interaction_width(l.base_dim) : l.base_dim;
  if (l.weights.size() != width || l.column_means.size() != width ||
      l.column_scales.size() != width) {
    throw structure_error("lasso coefficient arrays do not match the design width");
  }
  return l;
}

ordered_json cv_to_json(const GridSearchResult& r) {
  ordered_json cands = ordered_json::array();
  for (const auto& c : r.candidates) cands.push_back(params_to_json(c));
  return {{"folds", r.folds},
          {"best_index", r.best_index},
          {"best_params", params_to_json(r.best_params)},
          {"candidates", std::move(cands)},
          {"cv_scores", r.cv_scores},
          {"fold_scores", r.fold_scores}};
}

GridSearchResult cv_from_json(const nlohmann::json& j) {
  GridSearchResult r;
  r.folds = j.at("folds").get<std::size_t>();
  r.best_index = j.at("best_index").get<std::size_t>();
  r.best_params = params_from_json(j.at("best_params"));
  for (const auto& c : j.at("candidates")) r.candidates.push_back(params_from_json(c));
  r.cv_scores = j.at("cv_scores").get<std::vector<double>>();
  r.fold_scores = j.at("fold_scores").get<std::vector<std::vector<double>>>();
  return r;
}

}  // namespace

std::string serialize_model(const TrainedModel& m) {
  ordered_json j;
  j["format"] = "assin-model";
  j["version"] = kModelFormatVersion;
  j["task"] = to_string(m.task);
  j["learner"] = to_string(m.learner);
  j["feature_dim"] = m.feature_dim;
  j["embedding_dim"] = m.embedding_dim;
  j["seed"] = m.seed;
  j["hyperparameters"] = params_to_json(m.hyperparameters);
  j["cv"] = m.cv ? cv_to_json(*m.cv) : ordered_json(nullptr);
  if (const auto* l = std::get_if<LassoModel>(&m.model)) {
    j["model"] = lasso_to_json(*l);
  } else if (const auto* k = std::get_if<KernelModel>(&m.model)) {
    j["model"] = kernel_to_json(*k);
  } else if (const auto* s = std::get_if<MulticlassSvm>(&m.model)) {
    ordered_json machines = ordered_json::array();
    for (const auto& mc : s->machines) {
      machines.push_back({{"positive", to_string(mc.positive)},
                          {"negative", to_string(mc.negative)},
                          {"kernel", kernel_to_json(mc.model)}});
    }
    ordered_json classes = ordered_json::array();
    for (auto c : s->classes) classes.push_back(to_string(c));
    j["model"] = {{"classes", std::move(classes)}, {"machines", std::move(machines)}};
  } else {
    throw usage_error("cannot serialize an untrained model");
  }
  ordered_json df = ordered_json::object();
  for (const auto& [tok, n] : m.idf.doc_freqs()) df[tok] = n;
  j["idf"] = {{"doc_count", m.idf.doc_count()}, {"doc_freq", std::move(df)}};
  return j.dump(1) + "\n";
}

TrainedModel parse_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("model file: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "assin-model") {
    throw structure_error("not a model file");
  }
  const int version = j.value("version", 0);
  if (version != kModelFormatVersion) {
    throw structure_error("model file version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kModelFormatVersion) + ")");
  }
  try {
    TrainedModel m;
    m.task = parse_task(j.at("task").get<std::string>());
    m.learner = parse_learner(j.at("learner").get<std::string>());
    check_compatible(m.task, m.learner);
    m.feature_dim = j.at("feature_dim").get<std::size_t>();
    m.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hyperparameters = params_from_json(j.at("hyperparameters"));
    if (!j.at("cv").is_null()) m.cv = cv_from_json(j.at("cv"));
    const auto& mj = j.at("model");
    switch (m.learner) {
      case LearnerKind::Lasso:
        m.model = lasso_from_json(mj);
        break;
      case LearnerKind::Svr:
        m.model = kernel_from_json(mj);
        break;
      case LearnerKind::Svm: {
        MulticlassSvm s;
        for (const auto& c : mj.at("classes")) {
          s.classes.push_back(parse_entailment_class(c.get<std::string>()));
        }
        for (const auto& mc : mj.at("machines")) {
          s.machines.push_back({parse_entailment_class(mc.at("positive").get<std::string>()),
                                parse_entailment_class(mc.at("negative").get<std::string>()),
                                kernel_from_json(mc.at("kernel"))});
        }
        if (s.classes.empty() || s.machines.empty()) {
          throw structure_error("multiclass model has no machines");
        }
        m.model = std::move(s);
        break;
      }
    }
    std::map<std::string, std::size_t> df;
    for (const auto& [tok, n] : j.at("idf").at("doc_freq").items()) df[tok] = n.get<std::size_t>();
    m.idf = IdfModel(j.at("idf").at("doc_count").get<std::size_t>(), std::move(df));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw structure_error(std::string("model file: ") + e.what());
  }
}

}  // namespace assin
