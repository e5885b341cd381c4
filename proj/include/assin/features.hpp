#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "assin/corpus.hpp"
#include "assin/embeddings.hpp"

namespace assin {

/// Histogram bins given by ascending edges. Bin k covers [edges[k], edges[k+1]),
/// the last bin is unbounded above, and values below edges[0] fall in bin 0.
class BinSpec {
 public:
  explicit BinSpec(std::vector<double> edges);

  std::size_t size() const noexcept { return edges_.size(); }
  std::size_t bin_of(double v) const noexcept;
  const std::vector<double>& edges() const noexcept { return edges_; }

 private:
  std::vector<double> edges_;
};

const BinSpec& saliency_bins();    // 0, .15, .4
const BinSpec& unweighted_bins();  // -1, .45, .8
const BinSpec& dimension_bins_spec();  // -inf, .001, .01, .02

inline constexpr std::size_t kFeatureCount = 15;

// Layout of PairFeatures::values.
namespace feature_index {
inline constexpr std::size_t kSaliency = 0;    // 3 bins
inline constexpr std::size_t kAllPairs = 3;    // 3 bins
inline constexpr std::size_t kMaxSim = 6;      // 3 bins
inline constexpr std::size_t kMeanCosine = 9;
inline constexpr std::size_t kMeanEuclid = 10;
inline constexpr std::size_t kDimBins = 11;    // 4 bins
}  // namespace feature_index

struct PairFeatures {
  std::array<double, kFeatureCount> values{};

  bool operator==(const PairFeatures&) const = default;
};

// Column names used by the CSV feature dump, in layout order.
const std::array<std::string_view, kFeatureCount>& feature_names();

using Histogram3 = std::array<double, 3>;
using Histogram4 = std::array<double, 4>;

// Best-match cosine of each source term against the other sentence, weighted
// by IDF and normalized per direction; the two directions are averaged.
Histogram3 saliency_weighted_histogram(std::span<const std::string> tokens_1,
                                       std::span<const std::string> tokens_2,
                                       const EmbeddingTable& emb, const IdfModel& idf);

// Cosine of every (s1 term, s2 term) pair, normalized by the pair count.
Histogram3 unweighted_all_pairs_histogram(std::span<const std::string> tokens_1,
                                          std::span<const std::string> tokens_2,
                                          const EmbeddingTable& emb);

// Same as the saliency network but with unit weights and the unweighted bins.
Histogram3 unweighted_max_histogram(std::span<const std::string> tokens_1,
                                    std::span<const std::string> tokens_2,
                                    const EmbeddingTable& emb);

struct MeanDistances {
  double cosine = 0.0;
  double euclidean = 0.0;
};

MeanDistances mean_vector_distances(std::span<const std::string> tokens_1,
                                    std::span<const std::string> tokens_2,
                                    const EmbeddingTable& emb);

// Histogram of |mean_1 - mean_2| over the embedding dimensions.
Histogram4 dimension_bins(std::span<const std::string> tokens_1,
                          std::span<const std::string> tokens_2, const EmbeddingTable& emb);

PairFeatures extract_features(std::span<const std::string> tokens_1,
                              std::span<const std::string> tokens_2, const EmbeddingTable& emb,
                              const IdfModel& idf);
PairFeatures extract_features(const SentencePair& pair, const EmbeddingTable& emb,
                              const IdfModel& idf);

// Extracts every pair of the dataset, in order, using up to `jobs` threads.
std::vector<PairFeatures> extract_all(const Dataset& ds, const EmbeddingTable& emb,
                                      const IdfModel& idf, unsigned jobs = 1);

// CSV with header "id,<15 feature names>,similarity,entailment"; labels may be empty.
std::string feature_dump_csv(const Dataset& ds, std::span<const PairFeatures> features);

}  // namespace assin
