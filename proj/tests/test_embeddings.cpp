#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cstring>
#include <random>

#include "assin/embeddings.hpp"
#include "assin/io_util.hpp"
#include "expect_error.hpp"
#include "support.hpp"

using namespace assin;
using testing_support::random_table;
using testing_support::TempDir;

namespace {

std::string le_floats(std::initializer_list<float> vs) {
  std::string out;
  for (float v : vs) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
  }
  return out;
}

}  // namespace

TEST(Embeddings, ParsesHandBuiltBinary) {
  const std::string bytes = "2 2\nog " + le_floats({1.0f, 0.5f}) + "\ngato " +
                            le_floats({-2.0f, 0.25f}) + "\n";
  const auto t = parse_word2vec_binary(bytes);
  ASSERT_EQ(t.count(), 2u);
  ASSERT_EQ(t.dim(), 2u);
  EXPECT_EQ(t.token(1), "gato");
  auto v = t.lookup("gato");
  ASSERT_TRUE(v);
  EXPECT_EQ((*v)[0], -2.0f);
  EXPECT_EQ((*v)[1], 0.25f);
  EXPECT_FALSE(t.lookup("cao"));
}

TEST(Embeddings, BinaryRecordsWithoutNewline) {
  const std::string bytes = "2 1\na " + le_floats({3.0f}) + "b " + le_floats({4.0f});
  const auto t = parse_word2vec_binary(bytes);
  EXPECT_EQ(t.count(), 2u);
  EXPECT_EQ((*t.lookup("b"))[0], 4.0f);
}

TEST(Embeddings, BinaryRoundTripIsByteIdentical) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_table(1 + trial * 3, 1 + trial % 7, rng);
    for (bool nl : {true, false}) {
      const std::string bytes = serialize_word2vec_binary(t, nl);
      EXPECT_EQ(serialize_word2vec_binary(parse_word2vec_binary(bytes), nl), bytes);
    }
  }
}

TEST(Embeddings, TextRoundTripIsExact) {
  std::mt19937_64 rng(8);
  const auto t = random_table(50, 9, rng);
  const auto back = parse_word2vec_text(serialize_word2vec_text(t));
  ASSERT_EQ(back.count(), t.count());
  for (std::size_t i = 0; i < t.count(); ++i) {
    EXPECT_EQ(back.token(i), t.token(i));
    const auto a = t.vector(i), b = back.vector(i);
    for (std::size_t d = 0; d < t.dim(); ++d) EXPECT_EQ(a[d], b[d]);
  }
}

TEST(Embeddings, FileLoaderSniffsFormat) {
  std::mt19937_64 rng(9);
  const auto t = random_table(10, 4, rng);
  TempDir dir("emb");
  write_word2vec_binary(t, dir / "vectors.data");
  write_word2vec_text(t, dir / "vectors.txt");
  for (const auto* name : {"vectors.data", "vectors.txt"}) {
    const auto back = load_word2vec(dir / name);
    ASSERT_EQ(back.count(), 10u) << name;
    EXPECT_EQ(back.vector(3)[2], t.vector(3)[2]) << name;
  }
}

TEST(Embeddings, TruncatedRecordNamesTokenIndex) {
  const std::string bytes = "2 2\na " + le_floats({1.0f, 2.0f}) + "\nb " + le_floats({1.0f});
  expect_category(ErrorCategory::Parse, [&] { parse_word2vec_binary(bytes); }, "token index 1");
}

TEST(Embeddings, MalformedHeaderNamesByteOffset) {
  expect_category(ErrorCategory::Parse, [] { parse_word2vec_binary("2 x\n"); }, "byte");
  expect_category(ErrorCategory::Parse, [] { parse_word2vec_binary(""); }, "byte");
}

TEST(Embeddings, TextNonNumericNamesLine) {
  expect_category(ErrorCategory::Parse, [] { parse_word2vec_text("1 2\nab 1.0 zz\n"); },
                  "line 2");
}

TEST(Embeddings, DuplicateTokenRejected) {
  const std::string bytes = "2 1\na " + le_floats({1.0f}) + "\na " + le_floats({2.0f}) + "\n";
  expect_category(ErrorCategory::Parse, [&] { parse_word2vec_binary(bytes); }, "a");
  EmbeddingTable t(1);
  const float v[1] = {1.0f};
  t.add("x", v);
  EXPECT_THROW(t.add("x", v), Error);
}

TEST(Embeddings, MeanOfOneTokenIsItsVector) {
  std::mt19937_64 rng(3);
  const auto t = random_table(5, 6, rng);
  const std::vector<std::string> toks{"w2", "unknown"};
  const auto m = mean_vector(t, toks);
  EXPECT_EQ(m.in_vocab_count, 1u);
  for (std::size_t d = 0; d < 6; ++d) EXPECT_EQ(m.mean[d], static_cast<double>(t.vector(2)[d]));
}

TEST(Embeddings, AllUnknownMeanIsZero) {
  EmbeddingTable t(3);
  const std::vector<std::string> toks{"a", "b"};
  const auto m = mean_vector(t, toks);
  EXPECT_EQ(m.in_vocab_count, 0u);
  EXPECT_EQ(m.mean, DenseVector(3, 0.0));
  const DenseVector v{1, 2, 3};
  EXPECT_EQ(cosine_similarity(m.mean, v), 0.0);
}

TEST(Embeddings, CosineAndDistanceMatchExtendedPrecision) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + trial % 30;
    DenseVector a(dim), b(dim);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng);
    Big dot = 0, na = 0, nb = 0, d2 = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      dot += Big(a[i]) * b[i];
      na += Big(a[i]) * a[i];
      nb += Big(b[i]) * b[i];
      d2 += (Big(a[i]) - b[i]) * (Big(a[i]) - b[i]);
    }
    const double cos = static_cast<double>(dot / boost::multiprecision::sqrt(na * nb));
    EXPECT_NEAR(cosine_similarity(a, b), cos, 1e-12);
    EXPECT_NEAR(euclidean_distance(a, b), static_cast<double>(boost::multiprecision::sqrt(d2)),
                1e-12);
  }
}

TEST(Embeddings, CosineIsClampedAndScaleInvariant) {
  const DenseVector a{0.1, 0.2, 0.3};
  DenseVector b = a;
  for (auto& v : b) v *= 3.0;
  EXPECT_LE(cosine_similarity(a, b), 1.0);
  EXPECT_NEAR(cosine_similarity(a, b), 1.0, 1e-15);
  const DenseVector c{1.0, 2.0};
  expect_category(ErrorCategory::Dimension, [&] { cosine_similarity(a, c); });
}

TEST(Embeddings, InvalidVectorsRejected) {
  EmbeddingTable t(2);
  const float bad[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
  EXPECT_THROW(t.add("nan", bad), Error);
  const float one[1] = {1.0f};
  EXPECT_THROW(t.add("short", one), Error);
  const float ok[2] = {1.0f, 2.0f};
  EXPECT_THROW(t.add("", ok), Error);
}
