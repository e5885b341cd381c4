#include "assin/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "assin/error.hpp"
#include "assin/io_util.hpp"

namespace assin {

std::string_view to_string(EntailmentClass c) noexcept {
  switch (c) {
    case EntailmentClass::None: return "None";
    case EntailmentClass::Entailment: return "Entailment";
    case EntailmentClass::Paraphrase: return "Paraphrase";
  }
  return "None";
}

EntailmentClass parse_entailment_class(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "none") return EntailmentClass::None;
  if (lower == "entailment") return EntailmentClass::Entailment;
  if (lower == "paraphrase") return EntailmentClass::Paraphrase;
  throw value_error("unknown entailment class '" + std::string(s) + "'");
}

void validate(const Dataset& ds) {
  std::unordered_set<std::string> seen;
  for (const auto& p : ds.pairs) {
    if (!seen.insert(p.id).second) throw structure_error("duplicate pair id '" + p.id + "'");
    if (p.similarity && !(*p.similarity >= kMinSimilarity && *p.similarity <= kMaxSimilarity)) {
      throw value_error("pair '" + p.id + "': similarity outside [1, 5]");
    }
  }
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed
  bool valid;
};

CodePoint decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  int extra = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    return {b0, 1, false};
  }
  if (i + extra >= s.size()) return {b0, 1, false};
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, static_cast<std::size_t>(extra) + 1, true};
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
  if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x1E00 && c <= 0x1EFF && !(c >= 0x1E96 && c <= 0x1E9F)) return (c % 2 == 0) ? c + 1 : c;
  return c;
}

bool is_whitespace(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

// Letters, digits and anything outside the known punctuation/symbol blocks.
bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
  }
  if (c <= 0xBF) return c == 0xAA || c == 0xB2 || c == 0xB3 || c == 0xB5 || c == 0xB9 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if ((c >= 0xFF00 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
      (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65)) {
    return false;
  }
  if (c == 0xFFFD) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;
  return true;
}

struct Unit {
  std::string bytes;  // lowercased encoding
  bool word;
};

void flush_piece(std::vector<Unit>& piece, std::vector<std::string>& out) {
  std::size_t b = 0, e = piece.size();
  while (b < e && !piece[b].word) ++b;
  while (e > b && !piece[e - 1].word) --e;
  if (b < e) {
    std::string tok;
    for (std::size_t k = b; k < e; ++k) tok += piece[k].bytes;
    out.push_back(std::move(tok));
  }
  piece.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::vector<Unit> piece;
  for (std::size_t i = 0; i < text.size();) {
    const CodePoint cp = decode_utf8(text, i);
    if (!cp.valid) {
      piece.push_back({std::string(1, text[i]), true});
      i += 1;
      continue;
    }
    i += cp.length;
    if (is_whitespace(cp.value)) {
      flush_piece(piece, out);
      continue;
    }
    Unit u{{}, is_word_char(cp.value)};
    encode_utf8(to_lower(cp.value), u.bytes);
    piece.push_back(std::move(u));
  }
  flush_piece(piece, out);
  return out;
}

// ---------------------------------------------------------------------------
// IDF

IdfModel::IdfModel(std::size_t doc_count, std::map<std::string, std::size_t> doc_freq)
    : doc_count_(doc_count), df_(doc_freq.begin(), doc_freq.end()) {
  if (doc_count_ == 0) throw value_error("IDF model needs at least one document");
  for (const auto& [tok, df] : df_) {
    if (df < 1 || df > doc_count_) {
      throw value_error("document frequency of '" + tok + "' outside [1, N]");
    }
  }
}

std::size_t IdfModel::doc_freq(std::string_view token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double IdfModel::idf(std::string_view token) const {
  const double n = static_cast<double>(doc_count_);
  const double df = static_cast<double>(doc_freq(token));
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

IdfModel build_idf(std::span<const std::vector<std::string>> documents) {
  if (documents.empty()) throw data_error("cannot build IDF from an empty document collection");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::set<std::string_view> uniq(doc.begin(), doc.end());
    for (auto tok : uniq) ++df[std::string(tok)];
  }
  return IdfModel(documents.size(), std::move(df));
}

IdfModel build_idf(std::span<const Dataset> datasets) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& ds : datasets) {
    for (const auto& p : ds.pairs) {
      docs.push_back(tokenize(p.text_t));
      docs.push_back(tokenize(p.text_h));
    }
  }
  return build_idf(std::span<const std::vector<std::string>>(docs));
}

std::string serialize_idf(const IdfModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "assin-idf";
  j["version"] = 1;
  j["doc_count"] = model.doc_count();
  nlohmann::ordered_json df = nlohmann::ordered_json::object();
  for (const auto& [tok, n] : model.doc_freqs()) df[tok] = n;
  j["doc_freq"] = std::move(df);
  return j.dump(1) + "\n";
}

IdfModel parse_idf(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("IDF file: ") + e.what());
  }
  if (j.value("format", "") != "assin-idf") throw structure_error("not an IDF file");
  if (j.value("version", 0) != 1) throw structure_error("unsupported IDF file version");
  try {
    std::map<std::string, std::size_t> df;
    for (const auto& [tok, n] : j.at("doc_freq").items()) df[tok] = n.get<std::size_t>();
    return IdfModel(j.at("doc_count").get<std::size_t>(), std::move(df));
  } catch (const nlohmann::json::exception& e) {
    throw structure_error(std::string("IDF file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// ASSIN XML

namespace {

std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

void escape_xml(std::string_view s, std::string& out, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;"; else out += c;
        break;
      case '\n':
        if (attribute) out += "&#10;"; else out += c;
        break;
      default: out += c;
    }
  }
}

}  // namespace

Dataset parse_assin_xml_string(std::string_view xml, const std::string& source_name) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw parse_error(source_name + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  auto root = tree.get_child_optional("entailment-corpus");
  if (!root) throw structure_error(source_name + ": root element 'entailment-corpus' not found");

  Dataset ds;
  ds.variant_tag = source_name;
  std::size_t index = 0;
  for (const auto& [name, node] : *root) {
    if (name != "pair") continue;
    ++index;
    SentencePair p;
    auto id = node.get_optional<std::string>("<xmlattr>.id");
    if (!id) throw structure_error(source_name + ": pair #" + std::to_string(index) + " has no id");
    p.id = *id;
    auto t = node.get_child_optional("t");
    auto h = node.get_child_optional("h");
    if (!t || !h) {
      throw structure_error(source_name + ": pair '" + p.id + "' is missing its " +
                            (!t ? "<t>" : "<h>") + " element");
    }
    p.text_t = std::string(trim(t->data()));
    p.text_h = std::string(trim(h->data()));

    if (auto sim = node.get_optional<std::string>("<xmlattr>.similarity")) {
      const std::string_view s = trim(*sim);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw value_error(source_name + ": pair '" + p.id + "': similarity '" + *sim +
                          "' is not a number");
      }
      if (!(v >= kMinSimilarity && v <= kMaxSimilarity)) {
        throw value_error(source_name + ": pair '" + p.id + "': similarity " + *sim +
                          " out of range [1, 5]");
      }
      p.similarity = v;
    }
    if (auto ent = node.get_optional<std::string>("<xmlattr>.entailment")) {
      try {
        p.entailment = parse_entailment_class(trim(*ent));
      } catch (const Error& e) {
        throw value_error(source_name + ": pair '" + p.id + "': " + e.what());
      }
    }
    ds.pairs.push_back(std::move(p));
  }
  try {
    validate(ds);
  } catch (const Error& e) {
    throw Error(e.category(), source_name + ": " + e.what());
  }
  return ds;
}

Dataset parse_assin_xml(const std::filesystem::path& path) {
  return parse_assin_xml_string(read_file(path), path.string());
}

std::string serialize_assin_xml(const Dataset& ds) {
  std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<entailment-corpus>\n";
  for (const auto& p : ds.pairs) {
    out += "  <pair id=\"";
    escape_xml(p.id, out, true);
    out += '"';
    if (p.entailment) {
      out += " entailment=\"";
      out += to_string(*p.entailment);
      out += '"';
    }
    if (p.similarity) {
      out += " similarity=\"";
      out += format_double(*p.similarity);
      out += '"';
    }
    out += ">\n    <t>";
    escape_xml(p.text_t, out, false);
    out += "</t>\n    <h>";
    escape_xml(p.text_h, out, false);
    out += "</h>\n  </pair>\n";
  }
  out += "</entailment-corpus>\n";
  return out;
}

std::string export_tokenized(const Dataset& ds) {
  std::string out;
  auto line = [&](std::string_view text) {
    const auto toks = tokenize(text);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) out += ' ';
      out += toks[i];
    }
    out += '\n';
  };
  for (const auto& p : ds.pairs) {
    line(p.text_t);
    line(p.text_h);
  }
  return out;
}

}  // namespace assin
