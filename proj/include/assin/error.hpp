#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assin {

// Every failure raised by the library carries one of these categories so the
// CLI can print a one-line, machine-parsable diagnostic.
enum class ErrorCategory {
  Parse,        // malformed input file
  Structure,    // well-formed input that violates the schema
  Value,        // out-of-range or unknown value
  Dimension,    // mismatched vector / matrix shapes
  Convergence,  // iterative solver hit its cap
  Io,           // file system failure
  Usage,        // invalid configuration or arguments
  Data,         // data unsuitable for the requested operation
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

inline Error parse_error(const std::string& msg) { return {ErrorCategory::Parse, msg}; }
inline Error structure_error(const std::string& msg) { return {ErrorCategory::Structure, msg}; }
inline Error value_error(const std::string& msg) { return {ErrorCategory::Value, msg}; }
inline Error dimension_error(const std::string& msg) { return {ErrorCategory::Dimension, msg}; }
inline Error io_error(const std::string& msg) { return {ErrorCategory::Io, msg}; }
inline Error usage_error(const std::string& msg) { return {ErrorCategory::Usage, msg}; }
inline Error data_error(const std::string& msg) { return {ErrorCategory::Data, msg}; }

}  // namespace assin
