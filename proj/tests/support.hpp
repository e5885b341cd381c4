#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "assin/corpus.hpp"
#include "assin/embeddings.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("assin_" + tag + "_" + std::to_string(getpid_portable()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static long getpid_portable();
  std::filesystem::path path_;
};

// Gaussian table with tokens "w0", "w1", ...
assin::EmbeddingTable random_table(std::size_t count, std::size_t dim, std::mt19937_64& rng);

struct SyntheticCorpus {
  assin::EmbeddingTable embeddings{1};
  assin::Dataset train;
  assin::Dataset test;
};

// Sentence pairs where the second sentence is the first with a random
// fraction of its tokens replaced; gold similarity is an affine map of the
// mean-vector cosine plus Gaussian noise, clamped to [1, 5]. Entailment is
// derived from the same cosine by thresholds.
SyntheticCorpus make_synthetic_corpus(std::size_t n_train, std::size_t n_test,
                                      std::uint64_t seed, double noise_sd = 0.2,
                                      std::size_t vocab = 400, std::size_t dim = 20);

}  // namespace testing_support
