#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rrseg {

/// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const noexcept { return pixels.size(); }
  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Binary foreground map aligned to a source image; bits[i] == 1 is foreground.
struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  SegMask() = default;
  SegMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t foreground_count() const noexcept;
  double foreground_fraction() const noexcept;
  bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool fg) { bits[static_cast<std::size_t>(row) * width + col] = fg ? 1 : 0; }

  friend bool operator==(const SegMask&, const SegMask&) = default;
};

/// ITU-R BT.601 luma, rounded to nearest. Gray input is copied through.
GrayImage to_luma(const Image& image);
GrayImage extract_channel(const Image& image, int channel);
Image to_image(const GrayImage& gray);

/// Bitwise OR of equally sized masks.
SegMask mask_union(const SegMask& a, const SegMask& b);

}  // namespace rrseg
