#include "jau/textures.hpp"

#include "jau/errors.hpp"
#include "jau/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jau {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double edge, double softness, double t) {
  const double u = std::clamp((t - edge) / softness + 0.5, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Low-frequency shading: a gradient plus a few broad cosine bumps.
void paint_background(Matrix& canvas, Rng& rng) {
  const Index w = canvas.cols(), h = canvas.rows();
  const double base = rng.uniform(0.25, 0.75);
  const double gx = rng.uniform(-0.3, 0.3) / static_cast<double>(w);
  const double gy = rng.uniform(-0.3, 0.3) / static_cast<double>(h);
  struct Wave { double fx, fy, phase, amp; };
  std::vector<Wave> waves(3);
  for (auto& v : waves) {
    v = {rng.uniform(0.5, 3.0) * 2.0 * kPi / static_cast<double>(w),
         rng.uniform(0.5, 3.0) * 2.0 * kPi / static_cast<double>(h), rng.uniform(0.0, 2.0 * kPi),
         rng.uniform(0.02, 0.08)};
  }
  for (Index x = 0; x < w; ++x) {
    for (Index y = 0; y < h; ++y) {
      double v = base + gx * static_cast<double>(x) + gy * static_cast<double>(y);
      for (const auto& wv : waves) v += wv.amp * std::cos(wv.fx * static_cast<double>(x) + wv.fy * static_cast<double>(y) + wv.phase);
      canvas(y, x) = v;
    }
  }
}

// One shape: ellipse or rotated rectangle, filled flat, shaded or with a
// grating, composited with an antialiased or blurred edge.
void paint_shape(Matrix& canvas, Rng& rng) {
  const Index w = canvas.cols(), h = canvas.rows();
  const double cx = rng.uniform(0.0, static_cast<double>(w));
  const double cy = rng.uniform(0.0, static_cast<double>(h));
  const double ra = rng.uniform(6.0, 0.3 * static_cast<double>(w));
  const double rb = ra * rng.uniform(0.3, 1.0);
  const double angle = rng.uniform(0.0, kPi);
  const bool ellipse = rng.uniform() < 0.5;
  const double softness = rng.uniform() < 0.6 ? 1.0 : rng.uniform(2.0, 6.0);
  const double level = rng.uniform(0.05, 0.95);
  const double slope_x = rng.uniform(-0.004, 0.004), slope_y = rng.uniform(-0.004, 0.004);
  const int fill = static_cast<int>(rng.below(3));  // 0 flat, 1 shaded, 2 grating
  const double period = rng.uniform(3.0, 14.0);
  const double grating_angle = rng.uniform(0.0, kPi);
  const double grating_amp = rng.uniform(0.05, 0.2);
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double kx = std::cos(grating_angle) * 2.0 * kPi / period;
  const double ky = std::sin(grating_angle) * 2.0 * kPi / period;

  const double reach = ra + 4.0 * softness;
  const Index x0 = std::max<Index>(0, static_cast<Index>(cx - reach));
  const Index x1 = std::min<Index>(w, static_cast<Index>(cx + reach) + 1);
  const Index y0 = std::max<Index>(0, static_cast<Index>(cy - reach));
  const Index y1 = std::min<Index>(h, static_cast<Index>(cy + reach) + 1);
  for (Index x = x0; x < x1; ++x) {
    for (Index y = y0; y < y1; ++y) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      const double u = ca * dx + sa * dy;
      const double v = -sa * dx + ca * dy;
      // Signed distance (in pixels, approximately) to the boundary, negative inside.
      double dist;
      if (ellipse) {
        const double r = std::sqrt((u * u) / (ra * ra) + (v * v) / (rb * rb));
        dist = (r - 1.0) * std::min(ra, rb);
      } else {
        dist = std::max(std::abs(u) - ra, std::abs(v) - rb);
      }
      const double alpha = 1.0 - smoothstep(0.0, softness, dist);
      if (alpha <= 0.0) continue;
      double value = level;
      if (fill == 1) value += slope_x * dx + slope_y * dy;
      if (fill == 2) value += grating_amp * std::sin(kx * dx + ky * dy);
      canvas(y, x) = (1.0 - alpha) * canvas(y, x) + alpha * value;
    }
  }
}

GrayImage quantize(const Matrix& canvas) {
  GrayImage img;
  img.width = canvas.cols();
  img.height = canvas.rows();
  img.max_value = 255;
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  for (Index y = 0; y < img.height; ++y) {
    for (Index x = 0; x < img.width; ++x) {
      const double v = std::clamp(canvas(y, x), 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(y * img.width + x)] =
          static_cast<std::uint16_t>(std::lround(255.0 * v));
    }
  }
  return img;
}

}  // namespace

std::vector<GrayImage> synthetic_textures(std::size_t count, Index width, Index height,
                                          std::uint64_t seed) {
  if (width < 1 || height < 1) throw ConfigError("texture dimensions must be positive");
  std::vector<GrayImage> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, Stream::kTextures, {k}));
    Matrix canvas(height, width);
    paint_background(canvas, rng);
    const auto shapes = 20 + static_cast<int>(rng.below(30));
    for (int s = 0; s < shapes; ++s) paint_shape(canvas, rng);
    const double grain = rng.uniform(0.002, 0.01);
    for (Index x = 0; x < width; ++x) {
      for (Index y = 0; y < height; ++y) canvas(y, x) += grain * rng.normal();
    }
    out.push_back(quantize(canvas));
  }
  return out;
}

std::vector<GrayImage> default_texture_set() { return synthetic_textures(8, 256, 256, 0x7e57u); }

}  // namespace jau
