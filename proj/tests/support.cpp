#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>

namespace testing_support {

long TempDir::getpid_portable() { return static_cast<long>(::getpid()); }

assin::EmbeddingTable random_table(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  assin::EmbeddingTable t(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& c : v) c = g(rng);
    t.add("w" + std::to_string(i), v);
  }
  return t;
}

namespace {

std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (const auto& t : toks) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s + ".";
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(std::size_t n_train, std::size_t n_test,
                                      std::uint64_t seed, double noise_sd, std::size_t vocab,
                                      std::size_t dim) {
  std::mt19937_64 rng(seed);
  SyntheticCorpus out;
  out.embeddings = random_table(vocab, dim, rng);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  std::uniform_int_distribution<std::size_t> len(4, 12);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sd);

  auto make = [&](std::size_t n, const std::string& prefix) {
    assin::Dataset ds;
    ds.variant_tag = prefix;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<std::string> s1(len(rng));
      for (auto& t : s1) t = "w" + std::to_string(word(rng));
      auto s2 = s1;
      const double r = frac(rng);
      for (auto& t : s2) {
        if (frac(rng) < r) t = "w" + std::to_string(word(rng));
      }
      const auto m1 = assin::mean_vector(out.embeddings, s1);
      const auto m2 = assin::mean_vector(out.embeddings, s2);
      const double cos = assin::cosine_similarity(m1.mean, m2.mean);
      assin::SentencePair p;
      p.id = prefix + std::to_string(k + 1);
      p.text_t = join(s1);
      p.text_h = join(s2);
      p.similarity = std::clamp(1.0 + 4.0 * cos + noise(rng), 1.0, 5.0);
      p.entailment = cos > 0.97   ? assin::EntailmentClass::Paraphrase
                     : cos > 0.75 ? assin::EntailmentClass::Entailment
                                  : assin::EntailmentClass::None;
      ds.pairs.push_back(std::move(p));
    }
    return ds;
  };
  out.train = make(n_train, "train-");
  out.test = make(n_test, "test-");
  return out;
}

}  // namespace testing_support
