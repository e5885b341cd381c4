#include "assin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "assin/error.hpp"
#include "assin/io_util.hpp"

namespace assin {

namespace {

template <typename A, typename B>
void check_lengths(std::span<A> a, std::span<B> b, std::size_t min_len, const char* what) {
  if (a.size() != b.size()) {
    throw dimension_error(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < min_len) {
    throw data_error(std::string(what) + ": needs at least " + std::to_string(min_len) +
                     " values");
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double pearson(std::span<const double> pred, std::span<const double> gold) {
  check_lengths(pred, gold, 2, "pearson");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(pred) || constant(gold)) {
    throw data_error("pearson: correlation undefined for a constant vector");
  }
  const double mp = mean_of(pred), mg = mean_of(gold);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dp = pred[i] - mp, dg = gold[i] - mg;
    sxy += dp * dg;
    sxx += dp * dp;
    syy += dg * dg;
  }
  if (sxx == 0.0 || syy == 0.0) throw data_error("pearson: correlation undefined for a constant vector");
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

double mse(std::span<const double> pred, std::span<const double> gold) {
  check_lengths(pred, gold, 1, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gold[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

double accuracy(std::span<const EntailmentClass> pred, std::span<const EntailmentClass> gold) {
  check_lengths(pred, gold, 1, "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

F1Scores f1(std::span<const EntailmentClass> pred, std::span<const EntailmentClass> gold) {
  check_lengths(pred, gold, 0, "f1");
  std::array<std::size_t, 3> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = static_cast<std::size_t>(pred[i]);
    const auto g = static_cast<std::size_t>(gold[i]);
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  F1Scores out;
  for (std::size_t c = 0; c < 3; ++c) {
    // 2PR/(P+R) == 2tp/(2tp+fp+fn); zero when nothing was predicted or expected.
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    out.per_class[c] = tp[c] == 0 ? 0.0 : 2.0 * static_cast<double>(tp[c]) / denom;
  }
  out.macro = (out.per_class[0] + out.per_class[1] + out.per_class[2]) / 3.0;
  return out;
}

EvalReport evaluate(std::span<const double> sim_pred, std::span<const double> sim_gold,
                    std::span<const EntailmentClass> ent_pred,
                    std::span<const EntailmentClass> ent_gold) {
  EvalReport r;
  if (!sim_pred.empty() || !sim_gold.empty()) {
    r.pearson = pearson(sim_pred, sim_gold);
    r.mse = mse(sim_pred, sim_gold);
    r.n = sim_pred.size();
  }
  if (!ent_pred.empty() || !ent_gold.empty()) {
    r.accuracy = accuracy(ent_pred, ent_gold);
    r.f1 = f1(ent_pred, ent_gold);
    r.n = std::max(r.n, ent_pred.size());
  }
  return r;
}

std::string serialize_report(const EvalReport& r) {
  nlohmann::ordered_json j;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v; else j[key] = nullptr;
  };
  put("pearson", r.pearson);
  put("mse", r.mse);
  if (r.accuracy) {
    // Percentage with two decimals, e.g. 81.65.
    j["accuracy_pct"] = std::stod(format_fixed(100.0 * *r.accuracy, 2));
  } else {
    j["accuracy_pct"] = nullptr;
  }
  if (r.f1) {
    j["f1_none"] = r.f1->per_class[0];
    j["f1_entailment"] = r.f1->per_class[1];
    j["f1_paraphrase"] = r.f1->per_class[2];
    j["f1_macro"] = r.f1->macro;
  } else {
    j["f1_none"] = j["f1_entailment"] = j["f1_paraphrase"] = j["f1_macro"] = nullptr;
  }
  j["n"] = r.n;
  return j.dump(2) + "\n";
}

std::vector<double> bow_baseline_similarity(const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& p : ds.pairs) {
    std::map<std::string, double> a, b;
    for (auto& t : tokenize(p.text_t)) a[t] += 1.0;
    for (auto& t : tokenize(p.text_h)) b[t] += 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [t, c] : a) {
      na += c * c;
      if (auto it = b.find(t); it != b.end()) dot += c * it->second;
    }
    for (const auto& [t, c] : b) nb += c * c;
    out.push_back(na == 0.0 || nb == 0.0 ? 0.0
                                         : std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb))));
  }
  return out;
}

AffineMap fit_affine(std::span<const double> x, std::span<const double> gold) {
  check_lengths(x, gold, 1, "fit_affine");
  const double mx = mean_of(x), mg = mean_of(gold);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (gold[i] - mg);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return {0.0, mg};
  const double slope = sxy / sxx;
  return {slope, mg - slope * mx};
}

}  // namespace assin
