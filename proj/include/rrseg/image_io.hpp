#pragma once

#include <string>

#include "rrseg/image.hpp"

namespace rrseg {

/// Reads PGM/PPM (P2, P3, P5, P6; maxval up to 65535, rescaled to 8 bits) or
/// PNG, chosen by the file's magic bytes. Throws Io when the file cannot be
/// opened and Decode when its content is malformed.
Image read_image(const std::string& path);

/// Binary PGM (P5) for 1 channel, binary PPM (P6) for 3.
void write_pnm(const std::string& path, const Image& image);
void write_pgm(const std::string& path, const GrayImage& image);

/// Binary PGM with 0 = background and 255 = foreground.
void write_mask(const std::string& path, const SegMask& mask);

/// Reads a mask image; any non-zero gray value is foreground.
SegMask read_mask(const std::string& path);

}  // namespace rrseg
