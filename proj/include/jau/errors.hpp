#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jau {

/// Inconsistent dimensions, invalid parameters or unusable input data.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system and serialization failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input; `offset` is the byte position where parsing stopped.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : IoError(what + " (at byte " + std::to_string(offset) + ")"), message_(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }
  /// The description without the offset suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

class UnsupportedVersionError : public IoError {
 public:
  explicit UnsupportedVersionError(unsigned version)
      : IoError("unsupported container version " + std::to_string(version)), version_(version) {}

  unsigned version() const noexcept { return version_; }

 private:
  unsigned version_;
};

}  // namespace jau
