#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace assin {

enum class EntailmentClass { None = 0, Entailment = 1, Paraphrase = 2 };

inline constexpr std::array<EntailmentClass, 3> kEntailmentClasses{
    EntailmentClass::None, EntailmentClass::Entailment, EntailmentClass::Paraphrase};

std::string_view to_string(EntailmentClass c) noexcept;
// Case-insensitive; throws a value error on anything else.
EntailmentClass parse_entailment_class(std::string_view s);

inline constexpr double kMinSimilarity = 1.0;
inline constexpr double kMaxSimilarity = 5.0;

struct SentencePair {
  std::string id;
  std::string text_t;  // first sentence
  std::string text_h;  // second sentence
  std::optional<double> similarity;
  std::optional<EntailmentClass> entailment;

  bool operator==(const SentencePair&) const = default;
};

struct Dataset {
  std::vector<SentencePair> pairs;
  std::string variant_tag;

  std::size_t size() const noexcept { return pairs.size(); }
};

// Throws if ids repeat or a similarity label lies outside [1, 5].
void validate(const Dataset& ds);

// Lowercases (Latin, Greek and Cyrillic letters), splits on whitespace and
// strips leading/trailing punctuation from each piece. Internal hyphens,
// apostrophes, digits and accented letters survive.
std::vector<std::string> tokenize(std::string_view text);

/// Document frequencies over a collection of token sequences.
class IdfModel {
 public:
  IdfModel() = default;
  IdfModel(std::size_t doc_count, std::map<std::string, std::size_t> doc_freq);

  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t doc_freq(std::string_view token) const;
  const std::map<std::string, std::size_t, std::less<>>& doc_freqs() const noexcept { return df_; }

  // ln((N + 1) / (df + 1)) + 1, with df = 0 for unseen tokens.
  double idf(std::string_view token) const;

  bool operator==(const IdfModel&) const = default;

 private:
  std::size_t doc_count_ = 0;
  std::map<std::string, std::size_t, std::less<>> df_;
};

IdfModel build_idf(std::span<const std::vector<std::string>> documents);

// Every t and h sentence of every dataset is one document.
IdfModel build_idf(std::span<const Dataset> datasets);

std::string serialize_idf(const IdfModel& model);
IdfModel parse_idf(std::string_view text);

Dataset parse_assin_xml_string(std::string_view xml, const std::string& source_name = "<string>");
Dataset parse_assin_xml(const std::filesystem::path& path);
std::string serialize_assin_xml(const Dataset& ds);

// One tokenized sentence per line (t then h for each pair), tokens joined by spaces.
std::string export_tokenized(const Dataset& ds);

}  // namespace assin
