#include "assin/io_util.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "assin/error.hpp"

namespace assin {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Structure: return "structure";
    case ErrorCategory::Value: return "value";
    case ErrorCategory::Dimension: return "dimension";
    case ErrorCategory::Convergence: return "convergence";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Data: return "data";
  }
  return "unknown";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failure on '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw io_error("write failure on '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw io_error("cannot rename temporary file onto '" + path.string() + "'");
  }
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, decimals);
  return std::string(buf.data(), end);
}

}  // namespace assin
