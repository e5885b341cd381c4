#include "assin/features.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "assin/io_util.hpp"

namespace assin {

BinSpec::BinSpec(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw value_error("bin specification needs at least one edge");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw value_error("bin edges must be strictly ascending");
  }
}

std::size_t BinSpec::bin_of(double v) const noexcept {
  std::size_t k = 0;
  while (k + 1 < edges_.size() && v >= edges_[k + 1]) ++k;
  return k;
}

const BinSpec& saliency_bins() {
  static const BinSpec spec({0.0, 0.15, 0.4});
  return spec;
}

const BinSpec& unweighted_bins() {
  static const BinSpec spec({-1.0, 0.45, 0.8});
  return spec;
}

const BinSpec& dimension_bins_spec() {
  static const BinSpec spec({-std::numeric_limits<double>::infinity(), 0.001, 0.01, 0.02});
  return spec;
}

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names{
      "sal_0_015",   "sal_015_04",   "sal_04_inf",  "all_m1_045",   "all_045_08",
      "all_08_inf",  "max_m1_045",   "max_045_08",  "max_08_inf",   "mean_cosine",
      "mean_euclid", "dim_minf_0001", "dim_0001_001", "dim_001_002", "dim_002_inf"};
  return names;
}

namespace {

struct Term {
  std::span<const float> vec;
  const std::string* token;
};

std::vector<Term> known_terms(std::span<const std::string> tokens, const EmbeddingTable& emb) {
  std::vector<Term> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto v = emb.lookup(t)) out.push_back({*v, &t});
  }
  return out;
}

// One direction of a best-match network; returns an unnormalized histogram and
// its total mass.
template <typename WeightFn>
Histogram3 best_match_direction(const std::vector<Term>& source, const std::vector<Term>& target,
                                const BinSpec& bins, WeightFn weight) {
  Histogram3 h{};
  if (source.empty() || target.empty()) return h;
  double mass = 0.0;
  for (const auto& w : source) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : target) best = std::max(best, cosine_similarity(w.vec, v.vec));
    const double wt = weight(w);
    h[bins.bin_of(best)] += wt;
    mass += wt;
  }
  for (double& x : h) x /= mass;
  return h;
}

template <typename WeightFn>
Histogram3 symmetric_best_match(std::span<const std::string> tokens_1,
                                std::span<const std::string> tokens_2, const EmbeddingTable& emb,
                                const BinSpec& bins, WeightFn weight) {
  const auto a = known_terms(tokens_1, emb);
  const auto b = known_terms(tokens_2, emb);
  const Histogram3 fwd = best_match_direction(a, b, bins, weight);
  const Histogram3 bwd = best_match_direction(b, a, bins, weight);
  Histogram3 out{};
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (fwd[k] + bwd[k]);
  return out;
}

}  // namespace

Histogram3 saliency_weighted_histogram(std::span<const std::string> tokens_1,
                                       std::span<const std::string> tokens_2,
                                       const EmbeddingTable& emb, const IdfModel& idf) {
  return symmetric_best_match(tokens_1, tokens_2, emb, saliency_bins(),
                              [&](const Term& t) { return idf.idf(*t.token); });
}

Histogram3 unweighted_max_histogram(std::span<const std::string> tokens_1,
                                    std::span<const std::string> tokens_2,
                                    const EmbeddingTable& emb) {
  return symmetric_best_match(tokens_1, tokens_2, emb, unweighted_bins(),
                              [](const Term&) { return 1.0; });
}

Histogram3 unweighted_all_pairs_histogram(std::span<const std::string> tokens_1,
                                          std::span<const std::string> tokens_2,
                                          const EmbeddingTable& emb) {
  const auto a = known_terms(tokens_1, emb);
  const auto b = known_terms(tokens_2, emb);
  Histogram3 h{};
  if (a.empty() || b.empty()) return h;
  for (const auto& w : a) {
    for (const auto& v : b) h[unweighted_bins().bin_of(cosine_similarity(w.vec, v.vec))] += 1.0;
  }
  const double n = static_cast<double>(a.size() * b.size());
  for (double& x : h) x /= n;
  return h;
}

MeanDistances mean_vector_distances(std::span<const std::string> tokens_1,
                                    std::span<const std::string> tokens_2,
                                    const EmbeddingTable& emb) {
  const auto m1 = mean_vector(emb, tokens_1);
  const auto m2 = mean_vector(emb, tokens_2);
  return {cosine_similarity(m1.mean, m2.mean), euclidean_distance(m1.mean, m2.mean)};
}

Histogram4 dimension_bins(std::span<const std::string> tokens_1,
                          std::span<const std::string> tokens_2, const EmbeddingTable& emb) {
  const auto m1 = mean_vector(emb, tokens_1);
  const auto m2 = mean_vector(emb, tokens_2);
  Histogram4 h{};
  for (std::size_t d = 0; d < emb.dim(); ++d) {
    h[dimension_bins_spec().bin_of(std::fabs(m1.mean[d] - m2.mean[d]))] += 1.0;
  }
  const double n = static_cast<double>(emb.dim());
  for (double& x : h) x /= n;
  return h;
}

PairFeatures extract_features(std::span<const std::string> tokens_1,
                              std::span<const std::string> tokens_2, const EmbeddingTable& emb,
                              const IdfModel& idf) {
  namespace fi = feature_index;
  PairFeatures f;
  auto put = [&](std::size_t at, std::span<const double> xs) {
    std::copy(xs.begin(), xs.end(), f.values.begin() + static_cast<std::ptrdiff_t>(at));
  };
  put(fi::kSaliency, saliency_weighted_histogram(tokens_1, tokens_2, emb, idf));
  put(fi::kAllPairs, unweighted_all_pairs_histogram(tokens_1, tokens_2, emb));
  put(fi::kMaxSim, unweighted_max_histogram(tokens_1, tokens_2, emb));
  const auto md = mean_vector_distances(tokens_1, tokens_2, emb);
  f.values[fi::kMeanCosine] = md.cosine;
  f.values[fi::kMeanEuclid] = md.euclidean;
  put(fi::kDimBins, dimension_bins(tokens_1, tokens_2, emb));
  return f;
}

PairFeatures extract_features(const SentencePair& pair, const EmbeddingTable& emb,
                              const IdfModel& idf) {
  const auto t1 = tokenize(pair.text_t);
  const auto t2 = tokenize(pair.text_h);
  return extract_features(t1, t2, emb, idf);
}

std::vector<PairFeatures> extract_all(const Dataset& ds, const EmbeddingTable& emb,
                                      const IdfModel& idf, unsigned jobs) {
  std::vector<PairFeatures> out(ds.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ds.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = extract_features(ds.pairs[i], emb, idf);
    return out;
  }
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < ds.size(); i += jobs) {
        out[i] = extract_features(ds.pairs[i], emb, idf);
      }
    });
  }
  for (auto& t : workers) t.join();
  return out;
}

std::string feature_dump_csv(const Dataset& ds, std::span<const PairFeatures> features) {
  if (features.size() != ds.size()) throw dimension_error("feature count differs from pair count");
  std::string out = "id";
  for (auto name : feature_names()) {
    out += ',';
    out += name;
  }
  out += ",similarity,entailment\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.pairs[i];
    out += p.id;
    for (double v : features[i].values) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (p.similarity) out += format_double(*p.similarity);
    out += ',';
    if (p.entailment) out += to_string(*p.entailment);
    out += '\n';
  }
  return out;
}

}  // namespace assin
