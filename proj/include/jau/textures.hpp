#pragma once

#include "jau/io.hpp"

#include <cstdint>
#include <vector>

namespace jau {

/// Built-in 8-bit grayscale test images standing in for a natural image
/// database: smooth shading, hard and soft edged shapes, oriented gratings
/// and fine grain. Fully determined by `seed`.
std::vector<GrayImage> synthetic_textures(std::size_t count, Index width, Index height,
                                          std::uint64_t seed);

/// The default set used when no images are supplied: 8 images of 256 x 256.
std::vector<GrayImage> default_texture_set();

}  // namespace jau
