#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "assin/error.hpp"

namespace assin {

// Vectors produced by reductions (means, differences). Word vectors themselves
// are stored as float32 inside EmbeddingTable and exposed as spans.
using DenseVector = std::vector<double>;

/// Immutable token -> float32 vector map in word2vec file order.
///
/// Tokens are unique and non-empty; every vector has exactly dim() finite
/// components. Safe for concurrent reads once built.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  // Appends a token. Throws on duplicate or empty tokens, wrong length, or
  // non-finite components.
  void add(std::string token, std::span<const float> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return tokens_.size(); }

  std::optional<std::span<const float>> lookup(std::string_view token) const;
  bool contains(std::string_view token) const { return lookup(token).has_value(); }

  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::span<const float> vector(std::size_t i) const;

  // Returns a copy with every component multiplied by `factor`.
  EmbeddingTable scaled(float factor) const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

EmbeddingTable load_word2vec_binary(const std::filesystem::path& path);
EmbeddingTable parse_word2vec_binary(std::string_view bytes);
EmbeddingTable load_word2vec_text(const std::filesystem::path& path);
EmbeddingTable parse_word2vec_text(std::string_view text);

// `record_newline` controls the optional 0x0A after each binary record; the
// reference word2vec tool writes it.
std::string serialize_word2vec_binary(const EmbeddingTable& table, bool record_newline = true);
std::string serialize_word2vec_text(const EmbeddingTable& table);
void write_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path,
                           bool record_newline = true);
void write_word2vec_text(const EmbeddingTable& table, const std::filesystem::path& path);

// Picks the binary or text loader by sniffing the first record.
EmbeddingTable load_word2vec(const std::filesystem::path& path);

struct MeanVector {
  DenseVector mean;
  std::size_t in_vocab_count = 0;
};

// Mean over in-vocabulary occurrences; zero vector when none is known.
MeanVector mean_vector(const EmbeddingTable& table, std::span<const std::string> tokens);

namespace detail {

template <typename A, typename B>
void check_same_dim(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw dimension_error("vector dimensions differ: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

template <typename A, typename B>
double cosine(std::span<const A> a, std::span<const B> b) {
  check_same_dim(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

template <typename A, typename B>
double euclidean(std::span<const A> a, std::span<const B> b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// Cosine similarity clamped to [-1, 1]; 0 when either vector has zero norm.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  return detail::cosine(a, b);
}
inline double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return detail::cosine(a, b);
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return detail::euclidean(a, b);
}
inline double euclidean_distance(std::span<const float> a, std::span<const float> b) {
  return detail::euclidean(a, b);
}

}  // namespace assin
