#include "assin/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>

#include "assin/io_util.hpp"

namespace assin {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw value_error("embedding dimension must be positive");
}

void EmbeddingTable::add(std::string token, std::span<const float> vector) {
  if (token.empty()) throw value_error("empty token at entry " + std::to_string(count()));
  if (vector.size() != dim_) {
    throw dimension_error("token '" + token + "' has " + std::to_string(vector.size()) +
                          " components, expected " + std::to_string(dim_));
  }
  for (float v : vector) {
    if (!std::isfinite(v)) throw value_error("token '" + token + "' has a non-finite component");
  }
  if (index_.contains(token)) throw value_error("duplicate token '" + token + "'");
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::span<const float>> EmbeddingTable::lookup(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

std::span<const float> EmbeddingTable::vector(std::size_t i) const {
  if (i >= count()) throw value_error("embedding index out of range");
  return {data_.data() + i * dim_, dim_};
}

EmbeddingTable EmbeddingTable::scaled(float factor) const {
  EmbeddingTable out(dim_);
  std::vector<float> buf(dim_);
  for (std::size_t i = 0; i < count(); ++i) {
    auto v = vector(i);
    std::transform(v.begin(), v.end(), buf.begin(), [&](float x) { return x * factor; });
    out.add(tokens_[i], buf);
  }
  return out;
}

namespace {

struct Header {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::size_t end = 0;  // offset just past the header newline
};

Header parse_header(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw parse_error("malformed header at byte 0: missing newline");
  std::string_view line = bytes.substr(0, nl);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  Header h;
  const char* first = line.data();
  const char* last = line.data() + line.size();
  auto fail = [&](const char* at, const std::string& what) {
    return parse_error("malformed header at byte " + std::to_string(at - bytes.data()) + ": " + what);
  };
  auto [p1, ec1] = std::from_chars(first, last, h.count);
  if (ec1 != std::errc{}) throw fail(first, "expected entry count");
  if (p1 == last || *p1 != ' ') throw fail(p1, "expected a space after the entry count");
  const char* q = p1;
  while (q != last && *q == ' ') ++q;
  auto [p2, ec2] = std::from_chars(q, last, h.dim);
  if (ec2 != std::errc{}) throw fail(q, "expected dimension");
  while (p2 != last && *p2 == ' ') ++p2;
  if (p2 != last) throw fail(p2, "unexpected trailing characters");
  if (h.dim == 0) throw fail(q, "dimension must be positive");
  h.end = nl + 1;
  return h;
}

float read_le_float(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
  }
  return std::bit_cast<float>(bits);
}

void append_le_float(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
  }
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.append(buf, 4);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

}  // namespace

EmbeddingTable parse_word2vec_binary(std::string_view bytes) {
  const Header h = parse_header(bytes);
  EmbeddingTable table(h.dim);
  std::vector<float> buf(h.dim);
  std::size_t pos = h.end;
  const std::size_t record_bytes = h.dim * sizeof(float);

  for (std::size_t i = 0; i < h.count; ++i) {
    // Tolerate the newline some writers emit before (rather than after) a record.
    while (pos < bytes.size() && bytes[pos] == '\n') ++pos;
    const auto sp = bytes.find(' ', pos);
    if (sp == std::string_view::npos) {
      throw parse_error("truncated record at token index " + std::to_string(i) +
                        ": missing token terminator");
    }
    std::string token(bytes.substr(pos, sp - pos));
    pos = sp + 1;
    if (bytes.size() - pos < record_bytes) {
      throw parse_error("truncated record at token index " + std::to_string(i) + " ('" + token +
                        "'): expected " + std::to_string(h.dim) + " floats, found " +
                        std::to_string((bytes.size() - pos) / sizeof(float)));
    }
    for (std::size_t d = 0; d < h.dim; ++d) buf[d] = read_le_float(bytes.data() + pos + 4 * d);
    pos += record_bytes;
    if (pos < bytes.size() && bytes[pos] == '\n') ++pos;
    try {
      table.add(std::move(token), buf);
    } catch (const Error& e) {
      throw parse_error("record at token index " + std::to_string(i) + ": " + e.what());
    }
  }
  for (; pos < bytes.size(); ++pos) {
    if (!is_space(bytes[pos])) {
      throw parse_error("unexpected data after " + std::to_string(h.count) + " records at byte " +
                        std::to_string(pos));
    }
  }
  return table;
}

EmbeddingTable load_word2vec_binary(const std::filesystem::path& path) {
  return parse_word2vec_binary(read_file(path));
}

EmbeddingTable parse_word2vec_text(std::string_view text) {
  const Header h = parse_header(text);
  EmbeddingTable table(h.dim);
  std::vector<float> buf(h.dim);
  std::size_t pos = h.end;
  std::size_t line_no = 1;

  for (std::size_t i = 0; i < h.count; ++i) {
    std::string_view line;
    do {
      if (pos >= text.size()) {
        throw parse_error("line " + std::to_string(line_no + 1) + ": expected " +
                          std::to_string(h.count) + " records, found " + std::to_string(i));
      }
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    } while (line.empty());

    auto err = [&](const std::string& what) {
      return parse_error("line " + std::to_string(line_no) + ": " + what);
    };
    std::size_t p = 0;
    while (p < line.size() && is_space(line[p])) ++p;
    std::size_t tok_end = p;
    while (tok_end < line.size() && !is_space(line[tok_end])) ++tok_end;
    std::string token(line.substr(p, tok_end - p));
    p = tok_end;
    for (std::size_t d = 0; d < h.dim; ++d) {
      while (p < line.size() && is_space(line[p])) ++p;
      if (p >= line.size()) {
        throw err("expected " + std::to_string(h.dim) + " components, found " + std::to_string(d));
      }
      const char* b = line.data() + p;
      const char* e = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(b, e, buf[d]);
      if (ec != std::errc{} || (ptr != e && !is_space(*ptr))) {
        auto stop = std::find_if(b, e, is_space);
        throw err("non-numeric component '" + std::string(b, stop) + "'");
      }
      p = static_cast<std::size_t>(ptr - line.data());
    }
    while (p < line.size() && is_space(line[p])) ++p;
    if (p != line.size()) throw err("more than " + std::to_string(h.dim) + " components");
    try {
      table.add(std::move(token), buf);
    } catch (const Error& e) {
      throw err(e.what());
    }
  }
  for (; pos < text.size(); ++pos) {
    if (!is_space(text[pos])) throw parse_error("unexpected data after the last record");
  }
  return table;
}

EmbeddingTable load_word2vec_text(const std::filesystem::path& path) {
  return parse_word2vec_text(read_file(path));
}

std::string serialize_word2vec_binary(const EmbeddingTable& table, bool record_newline) {
  std::string out = std::to_string(table.count()) + " " + std::to_string(table.dim()) + "\n";
  out.reserve(out.size() + table.count() * (table.dim() * 4 + 16));
  for (std::size_t i = 0; i < table.count(); ++i) {
    out += table.token(i);
    out += ' ';
    for (float v : table.vector(i)) append_le_float(out, v);
    if (record_newline) out += '\n';
  }
  return out;
}

std::string serialize_word2vec_text(const EmbeddingTable& table) {
  std::string out = std::to_string(table.count()) + " " + std::to_string(table.dim()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < table.count(); ++i) {
    out += table.token(i);
    for (float v : table.vector(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out += ' ';
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

void write_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path,
                           bool record_newline) {
  write_file_atomic(path, serialize_word2vec_binary(table, record_newline));
}

void write_word2vec_text(const EmbeddingTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_word2vec_text(table));
}

EmbeddingTable load_word2vec(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const auto ext = path.extension().string();
  if (ext == ".bin") return parse_word2vec_binary(bytes);
  if (ext == ".txt" || ext == ".vec") return parse_word2vec_text(bytes);
  // Text records contain only printable ASCII or UTF-8 bytes and whitespace;
  // raw float payloads almost always contain control bytes.
  const Header h = parse_header(bytes);
  const std::size_t probe_end = std::min(bytes.size(), h.end + 64 + 4 * h.dim);
  for (std::size_t i = h.end; i < probe_end; ++i) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x20 && c != '\n' && c != '\t' && c != '\r') return parse_word2vec_binary(bytes);
  }
  return parse_word2vec_text(bytes);
}

MeanVector mean_vector(const EmbeddingTable& table, std::span<const std::string> tokens) {
  MeanVector out{DenseVector(table.dim(), 0.0), 0};
  for (const auto& t : tokens) {
    auto v = table.lookup(t);
    if (!v) continue;
    for (std::size_t d = 0; d < table.dim(); ++d) out.mean[d] += (*v)[d];
    ++out.in_vocab_count;
  }
  if (out.in_vocab_count > 0) {
    const double n = static_cast<double>(out.in_vocab_count);
    for (double& x : out.mean) x /= n;
  }
  return out;
}

}  // namespace assin
