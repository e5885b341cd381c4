#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "assin/corpus.hpp"
#include "assin/io_util.hpp"
#include "expect_error.hpp"
#include "support.hpp"

using namespace assin;

using Toks = std::vector<std::string>;

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("O Brasil venceu."), (Toks{"o", "brasil", "venceu"}));
  EXPECT_EQ(tokenize("guarda-chuva, 2016"), (Toks{"guarda-chuva", "2016"}));
  EXPECT_EQ(tokenize("  \"Ação\"  É   ÓTIMA! "), (Toks{"ação", "é", "ótima"}));
  EXPECT_EQ(tokenize("d'água (R$ 3,50)"), (Toks{"d'água", "r", "3,50"}));
  EXPECT_TRUE(tokenize("... -- !").empty());
  EXPECT_TRUE(tokenize("").empty());
}

TEST(Tokenize, IdempotentNonEmptyLowercase) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pieces{"Ação", "público", "-", "--X--", "É", "Çedilha", "2016,",
                                        "(entre)", "guarda-chuva", "ÑANDÚ", "«aspas»", "x.y",
                                        "\t", "São", "ÀS", "'", "Über", "Ελλάδα", "МОСКВА"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::string line;
    for (int k = 0; k < 8; ++k) line += pieces[pick(rng)] + (k % 3 ? " " : "  ");
    const auto toks = tokenize(line);
    std::string joined;
    for (const auto& t : toks) {
      EXPECT_FALSE(t.empty());
      for (unsigned char c : t) EXPECT_FALSE(c >= 'A' && c <= 'Z') << t;
      joined += t + " ";
    }
    EXPECT_EQ(tokenize(joined), toks) << line;
  }
}

TEST(Tokenize, NonAsciiUppercaseIsLowered) {
  EXPECT_EQ(tokenize("ÁÉÍÓÚÂÊÔÃÕÇ"), (Toks{"áéíóúâêôãõç"}));
  EXPECT_EQ(tokenize("ΑΒΓ БВГ"), (Toks{"αβγ", "бвг"}));
}

TEST(Idf, SmallExample) {
  const std::vector<Toks> docs{{"a", "b"}, {"a"}};
  const auto m = build_idf(docs);
  EXPECT_EQ(m.doc_count(), 2u);
  EXPECT_EQ(m.doc_freq("a"), 2u);
  EXPECT_EQ(m.doc_freq("b"), 1u);
  EXPECT_EQ(m.doc_freq("c"), 0u);
}

TEST(Idf, FormulaValues) {
  const std::vector<Toks> one{{"x"}};
  const auto m = build_idf(one);
  EXPECT_DOUBLE_EQ(m.idf("x"), 1.0);
  EXPECT_NEAR(m.idf("unseen"), std::log(2.0) + 1.0, 1e-15);
  EXPECT_NEAR(m.idf("unseen"), 1.6931, 1e-4);
}

TEST(Idf, MatchesSetScanOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> word(0, 30), len(0, 12), ndocs(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Toks> docs(static_cast<std::size_t>(ndocs(rng)));
    for (auto& d : docs) {
      const int l = len(rng);
      for (int k = 0; k < l; ++k) d.push_back("t" + std::to_string(word(rng)));
    }
    const auto m = build_idf(docs);
    std::set<std::string> vocab;
    for (const auto& d : docs) vocab.insert(d.begin(), d.end());
    EXPECT_EQ(m.doc_freqs().size(), vocab.size());
    std::size_t everywhere = 0;
    for (const auto& w : vocab) {
      std::size_t df = 0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), w) != d.end();
      EXPECT_EQ(m.doc_freq(w), df);
      EXPECT_LE(df, docs.size());
      everywhere += df == docs.size();
      const double expect =
          std::log((docs.size() + 1.0) / (static_cast<double>(df) + 1.0)) + 1.0;
      EXPECT_NEAR(m.idf(w), expect, 1e-15);
    }
    std::size_t full = 0;
    for (const auto& [tok, df] : m.doc_freqs()) full += df == m.doc_count();
    EXPECT_EQ(full, everywhere);
  }
}

TEST(Idf, MonotoneInDocFrequency) {
  const IdfModel m(10, {{"a", 1}, {"b", 2}, {"c", 10}});
  EXPECT_GT(m.idf("zzz"), m.idf("a"));
  EXPECT_GT(m.idf("a"), m.idf("b"));
  EXPECT_GT(m.idf("b"), m.idf("c"));
  EXPECT_GT(m.idf("c"), 0.0);
}

TEST(Idf, EmptyCollectionAndBadCountsRejected) {
  const std::vector<Toks> none;
  expect_category(ErrorCategory::Data, [&] { build_idf(none); });
  EXPECT_THROW(IdfModel(2, {{"a", 3}}), Error);
  EXPECT_THROW(IdfModel(2, {{"a", 0}}), Error);
}

TEST(Idf, SerializationRoundTrip) {
  const IdfModel m(7, {{"á", 3}, {"b\"q", 1}, {"c", 7}});
  EXPECT_EQ(parse_idf(serialize_idf(m)), m);
  expect_category(ErrorCategory::Parse, [] { parse_idf("{not json"); });
}

TEST(AssinXml, MinimalPair) {
  const auto ds = parse_assin_xml_string(
      R"(<entailment-corpus><pair id="1" similarity="4.0" entailment="Paraphrase"><t>A</t><h>B</h></pair></entailment-corpus>)");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.pairs[0].id, "1");
  EXPECT_EQ(ds.pairs[0].text_t, "A");
  EXPECT_EQ(ds.pairs[0].text_h, "B");
  EXPECT_EQ(ds.pairs[0].similarity, 4.0);
  EXPECT_EQ(ds.pairs[0].entailment, EntailmentClass::Paraphrase);
}

TEST(AssinXml, BlindPairsAndCaseInsensitiveClasses) {
  const auto ds = parse_assin_xml_string(R"(<?xml version="1.0" encoding="utf-8"?>
<entailment-corpus>
  <pair id="a"><t>x</t><h>y</h></pair>
  <pair id="b" entailment="ENTAILMENT" similarity="1"><t>x</t><h>y</h></pair>
  <pair id="c" entailment="none" similarity="5"><t>  espaço  </t><h>y</h></pair>
</entailment-corpus>)");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_FALSE(ds.pairs[0].similarity);
  EXPECT_FALSE(ds.pairs[0].entailment);
  EXPECT_EQ(ds.pairs[1].entailment, EntailmentClass::Entailment);
  EXPECT_EQ(ds.pairs[2].entailment, EntailmentClass::None);
  EXPECT_EQ(ds.pairs[2].text_t, "espaço");
  EXPECT_EQ(ds.pairs[1].id, "b");
}

TEST(AssinXml, Errors) {
  expect_category(ErrorCategory::Parse,
                  [] { parse_assin_xml_string("<entailment-corpus><pair id='1'>", "f.xml"); },
                  "f.xml");
  expect_category(ErrorCategory::Structure, [] {
    parse_assin_xml_string("<entailment-corpus><pair id='p7'><t>a</t></pair></entailment-corpus>");
  }, "p7");
  expect_category(ErrorCategory::Value, [] {
    parse_assin_xml_string(
        "<entailment-corpus><pair id='1' similarity='5.5'><t>a</t><h>b</h></pair>"
        "</entailment-corpus>");
  });
  expect_category(ErrorCategory::Value, [] {
    parse_assin_xml_string(
        "<entailment-corpus><pair id='1' entailment='Maybe'><t>a</t><h>b</h></pair>"
        "</entailment-corpus>");
  }, "Maybe");
  expect_category(ErrorCategory::Structure, [] { parse_assin_xml_string("<other/>"); });
  expect_category(ErrorCategory::Structure, [] {
    parse_assin_xml_string(
        "<entailment-corpus><pair id='1'><t>a</t><h>b</h></pair>"
        "<pair id='1'><t>a</t><h>b</h></pair></entailment-corpus>");
  });
}

TEST(AssinXml, RoundTripOnRandomDatasets) {
  std::mt19937_64 rng(23);
  const std::vector<std::string> words{"a", "<b>", "&", "ção", "\"q\"", "it's", "x>y", "Ω"};
  std::uniform_int_distribution<std::size_t> w(0, words.size() - 1);
  std::uniform_int_distribution<int> lab(0, 3), n(1, 20);
  std::uniform_real_distribution<double> sim(1.0, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    Dataset ds;
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
      SentencePair p;
      p.id = std::to_string(i * 3 + 1);
      for (int k = 0; k < 5; ++k) {
        p.text_t += (k ? " " : "") + words[w(rng)];
        p.text_h += (k ? " " : "") + words[w(rng)];
      }
      const int l = lab(rng);
      if (l != 0) p.similarity = sim(rng);
      if (l != 1) p.entailment = kEntailmentClasses[static_cast<std::size_t>(l % 3)];
      ds.pairs.push_back(p);
    }
    const auto back = parse_assin_xml_string(serialize_assin_xml(ds));
    ASSERT_EQ(back.size(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(back.pairs[i], ds.pairs[i]);
  }
}

TEST(AssinXml, FileLoaderAndTokenExport) {
  testing_support::TempDir dir("xml");
  write_file_atomic(dir / "c.xml",
                    "<entailment-corpus><pair id='1'><t>O Gato.</t><h>Um cão</h></pair>"
                    "</entailment-corpus>");
  const auto ds = parse_assin_xml(dir / "c.xml");
  EXPECT_EQ(export_tokenized(ds), "o gato\num cão\n");
  expect_category(ErrorCategory::Io, [&] { parse_assin_xml(dir / "missing.xml"); });
}
