#include "jau/io.hpp"

#include "jau/errors.hpp"
#include "jau/random.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace jau {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (value > 0xffffffffUL) throw ParseError(std::string("PGM ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("PGM: expected ") + what,
                       pos_ < bytes_.size() ? pos_ : bytes_.size());
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from binary samples.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("PGM: expected whitespace before raster", pos_);
    }
    ++pos_;
  }

  unsigned byte() {
    if (pos_ >= bytes_.size()) throw ParseError("PGM: truncated raster", pos_);
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int k = 0; k < width; ++k) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + k])) << (8 * k);
  }
  return v;
}

constexpr std::size_t kJaudHeader = 14;

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  PgmReader in(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ParseError("PGM: missing P5/P2 magic", 0);
  }
  const bool binary = bytes[1] == '5';
  in.pos_ = 2;
  GrayImage image;
  image.width = static_cast<Index>(in.number("width"));
  image.height = static_cast<Index>(in.number("height"));
  const std::size_t maxval_at = in.offset();
  const unsigned long maxval = in.number("maxval");
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM: maxval out of range", maxval_at);
  if (image.width < 1 || image.height < 1) throw ParseError("PGM: empty image", maxval_at);
  image.max_value = static_cast<std::uint16_t>(maxval);

  const auto count = static_cast<std::size_t>(image.width * image.height);
  image.pixels.resize(count);
  if (binary) {
    in.single_whitespace();
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (bytes.size() - in.offset() < count * width) {
      throw ParseError("PGM: truncated raster, expected " + std::to_string(count * width) +
                           " bytes",
                       bytes.size());
    }
    for (std::size_t k = 0; k < count; ++k) {
      unsigned v = in.byte();
      if (width == 2) v = (v << 8) | in.byte();
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", in.offset() - width);
      image.pixels[k] = static_cast<std::uint16_t>(v);
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      in.skip_space_and_comments();
      if (in.offset() >= bytes.size()) throw ParseError("PGM: truncated raster", in.offset());
      const std::size_t at = in.offset();
      const unsigned long v = in.number("sample");
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", at);
      image.pixels[k] = static_cast<std::uint16_t>(v);
    }
  }
  return image;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

std::string encode_pgm(const GrayImage& image, bool binary) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width * image.height)) {
    throw ConfigError("image pixel count does not match its dimensions");
  }
  std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n" + std::to_string(image.max_value) + "\n";
  if (binary) {
    const bool wide = image.max_value > 255;
    out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
    for (std::uint16_t v : image.pixels) {
      if (wide) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  } else {
    for (Index y = 0; y < image.height; ++y) {
      for (Index x = 0; x < image.width; ++x) {
        out += std::to_string(image.at(x, y));
        out.push_back(x + 1 == image.width ? '\n' : ' ');
      }
    }
  }
  return out;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path, bool binary) {
  write_file(path, encode_pgm(image, binary));
}

SignalSet extract_patches(std::span<const GrayImage> images, Index count, std::uint64_t seed,
                          const PatchOptions& options) {
  const Index size = options.patch_size;
  if (size < 1) throw ConfigError("patch size must be positive");
  if (count < 1) throw ConfigError("patch count must be positive");
  std::vector<const GrayImage*> usable;
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (images[k].width < size || images[k].height < size) {
      std::clog << "warning: image " << k << " (" << images[k].width << "x" << images[k].height
                << ") is smaller than a " << size << "x" << size << " patch; skipped\n";
      continue;
    }
    usable.push_back(&images[k]);
  }
  if (usable.empty()) throw ConfigError("no image is large enough for patch extraction");

  Rng rng(seed);
  Matrix out(size * size, count);
  for (Index c = 0; c < count; ++c) {
    const GrayImage& img = *usable[rng.below(usable.size())];
    const auto x0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(img.width - size + 1)));
    const auto y0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(img.height - size + 1)));
    const double scale = 1.0 / static_cast<double>(img.max_value);
    for (Index col = 0; col < size; ++col) {
      for (Index row = 0; row < size; ++row) {
        out(col * size + row, c) = scale * img.at(x0 + col, y0 + row);
      }
    }
    if (options.remove_mean) out.col(c).array() -= out.col(c).mean();
  }
  return SignalSet(std::move(out));
}

std::string encode_matrix(const Matrix& matrix) {
  if (matrix.rows() > 0xffffffffLL || matrix.cols() > 0xffffffffLL) {
    throw ConfigError("matrix too large for the JAUD container");
  }
  std::string out = "JAUD";
  out.reserve(kJaudHeader + static_cast<std::size_t>(matrix.size()) * 8);
  put_u16(out, kJaudVersion);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (Index c = 0; c < matrix.cols(); ++c) {
    for (Index r = 0; r < matrix.rows(); ++r) put_u64(out, std::bit_cast<std::uint64_t>(matrix(r, c)));
  }
  return out;
}

Matrix decode_matrix(std::string_view bytes) {
  if (bytes.size() < 6) throw ParseError("JAUD: truncated header", bytes.size());
  if (bytes.substr(0, 4) != "JAUD") throw ParseError("JAUD: bad magic", 0);
  const auto version = static_cast<unsigned>(get_le(bytes, 4, 2));
  if (version != kJaudVersion) throw UnsupportedVersionError(version);
  if (bytes.size() < kJaudHeader) throw ParseError("JAUD: truncated header", bytes.size());
  const auto rows = static_cast<Index>(get_le(bytes, 6, 4));
  const auto cols = static_cast<Index>(get_le(bytes, 10, 4));
  const auto expected = kJaudHeader + static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8;
  if (bytes.size() < expected) throw ParseError("JAUD: truncated payload", bytes.size());
  if (bytes.size() > expected) throw ParseError("JAUD: trailing bytes", expected);
  Matrix out(rows, cols);
  std::size_t at = kJaudHeader;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r, at += 8) out(r, c) = std::bit_cast<double>(get_le(bytes, at, 8));
  }
  return out;
}

void save_matrix(const Matrix& matrix, const std::filesystem::path& path) {
  write_file(path, encode_matrix(matrix));
}

Matrix load_matrix(const std::filesystem::path& path) {
  try {
    return decode_matrix(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

void save_dictionary(const Dictionary& dictionary, const std::filesystem::path& path) {
  save_matrix(dictionary.atoms(), path);
}

Dictionary load_dictionary(const std::filesystem::path& path) { return Dictionary(load_matrix(path)); }

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_run_trace(std::ostream& out, const RunTrace& trace, bool timings) {
  out << "iteration,rmse,coding_seconds,update_seconds\n";
  for (std::size_t k = 0; k < trace.rmse.size(); ++k) {
    const StageTiming t = timings && k < trace.timing.size() ? trace.timing[k] : StageTiming{};
    out << (k + 1) << ',' << format_double(trace.rmse[k]) << ',' << format_double(t.coding_seconds)
        << ',' << format_double(t.update_seconds) << '\n';
  }
}

void save_run_trace(const RunTrace& trace, const std::filesystem::path& path, bool timings) {
  std::ostringstream out;
  write_run_trace(out, trace, timings);
  write_file(path, out.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace jau
