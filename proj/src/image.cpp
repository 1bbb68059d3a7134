#include "rrseg/image.hpp"

#include <algorithm>
#include <cmath>

#include "rrseg/error.hpp"

namespace rrseg {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {
  require(w >= 0 && h >= 0, "image dimensions must be non-negative");
  require(c == 1 || c == 3, "image must have 1 or 3 channels");
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
  require(w >= 0 && h >= 0, "image dimensions must be non-negative");
}

std::size_t SegMask::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

double SegMask::foreground_fraction() const noexcept {
  return bits.empty() ? 0.0 : static_cast<double>(foreground_count()) / static_cast<double>(bits.size());
}

GrayImage to_luma(const Image& image) {
  GrayImage out(image.width, image.height);
  if (image.channels == 1) {
    out.pixels = image.data;
    return out;
  }
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double r = image.data[3 * i];
    const double g = image.data[3 * i + 1];
    const double b = image.data[3 * i + 2];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
  }
  return out;
}

GrayImage extract_channel(const Image& image, int channel) {
  require(channel >= 0 && channel < image.channels, "channel index out of range");
  GrayImage out(image.width, image.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = image.data[i * image.channels + channel];
  }
  return out;
}

Image to_image(const GrayImage& gray) {
  Image out(gray.width, gray.height, 1);
  out.data = gray.pixels;
  return out;
}

SegMask mask_union(const SegMask& a, const SegMask& b) {
  require(a.width == b.width && a.height == b.height, "mask dimensions differ");
  SegMask out = a;
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = (a.bits[i] | b.bits[i]) ? 1 : 0;
  return out;
}

}  // namespace rrseg
