#pragma once

// Image ingestion, patch extraction and on-disk formats.
//
// JAUD dictionary container (all integers and floats little-endian):
//
//   offset  size  field
//   0       4     magic "JAUD"
//   4       2     version (u16, currently 1)
//   6       4     rows p (u32)
//   10      4     cols n (u32)
//   14      8pn   entries, f64, column-major
//
// The same container holds patch matrices (p x m) for `train --patches`.

#include "jau/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jau {

/// Grayscale raster, row-major, samples in [0, max_value].
struct GrayImage {
  Index width = 0;
  Index height = 0;
  std::uint16_t max_value = 255;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(Index x, Index y) const { return pixels[static_cast<std::size_t>(y * width + x)]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Parses binary (P5) or ASCII (P2) PGM; throws ParseError with the byte offset.
GrayImage parse_pgm(std::string_view bytes);
GrayImage load_pgm(const std::filesystem::path& path);

/// P5 when `binary`, otherwise P2. Samples wider than 8 bits use two bytes, big-endian.
std::string encode_pgm(const GrayImage& image, bool binary = true);
void save_pgm(const GrayImage& image, const std::filesystem::path& path, bool binary = true);

struct PatchOptions {
  Index patch_size = 8;
  /// Subtract each patch's mean after scaling.
  bool remove_mean = false;
};

/// Draws `count` patches at uniformly random positions: an image is picked
/// uniformly among those large enough, then a top-left corner uniformly
/// inside it. Pixels are scaled by 1/max_value and each patch is flattened
/// column-major. Images smaller than a patch are skipped with a warning;
/// throws ConfigError when none is usable.
SignalSet extract_patches(std::span<const GrayImage> images, Index count, std::uint64_t seed,
                          const PatchOptions& options = {});

inline constexpr std::uint16_t kJaudVersion = 1;

std::string encode_matrix(const Matrix& matrix);
/// Throws ParseError on malformed data, UnsupportedVersionError on a version mismatch.
Matrix decode_matrix(std::string_view bytes);

void save_matrix(const Matrix& matrix, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

void save_dictionary(const Dictionary& dictionary, const std::filesystem::path& path);
/// Also validates the unit-norm invariant (ConfigError).
Dictionary load_dictionary(const std::filesystem::path& path);

/// Shortest text with 17 significant digits (round-trips any finite double).
std::string format_double(double value);

/// `iteration,rmse,coding_seconds,update_seconds`, one row per iteration
/// (numbered from 1). With `timings` false the time columns are written as 0
/// so the file depends only on the computed values.
void write_run_trace(std::ostream& out, const RunTrace& trace, bool timings = true);
void save_run_trace(const RunTrace& trace, const std::filesystem::path& path, bool timings = true);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace jau
